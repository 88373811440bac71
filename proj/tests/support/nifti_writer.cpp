#include "nifti_writer.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace testsupport {
namespace {

template <typename T>
void put(std::vector<std::uint8_t>& buf, std::size_t off, T v, bool big_endian) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[off + i] = big_endian ? b[sizeof(T) - 1 - i] : b[i];
}

std::vector<std::uint8_t> gzip(const std::vector<std::uint8_t>& raw) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 31, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw std::runtime_error("deflateInit2");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, raw.size()) + 64);
  zs.next_in = const_cast<Bytef*>(raw.data());
  zs.avail_in = static_cast<uInt>(raw.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw std::runtime_error("deflate");
  out.resize(zs.total_out);
  return out;
}

}  // namespace

NiftiSpec float_volume(int nx, int ny, int nz, const std::vector<float>& values, std::array<float, 3> spacing) {
  NiftiSpec s;
  s.dim = {3, static_cast<std::int16_t>(nx), static_cast<std::int16_t>(ny), static_cast<std::int16_t>(nz), 1, 1, 1, 1};
  s.pixdim = {1, spacing[0], spacing[1], spacing[2], 1, 1, 1, 1};
  s.data.resize(values.size() * 4);
  if (!values.empty()) std::memcpy(s.data.data(), values.data(), s.data.size());
  return s;
}

NiftiSpec int16_volume(int nx, int ny, int nz, const std::vector<std::int16_t>& values, std::array<float, 3> spacing) {
  NiftiSpec s = float_volume(nx, ny, nz, {}, spacing);
  s.datatype = 4;
  s.bitpix = 16;
  s.data.resize(values.size() * 2);
  if (!values.empty()) std::memcpy(s.data.data(), values.data(), s.data.size());
  return s;
}

std::vector<std::uint8_t> nifti_bytes(const NiftiSpec& s) {
  const bool be = s.big_endian;
  std::vector<std::uint8_t> buf(352, 0);
  put<std::int32_t>(buf, 0, 348, be);
  for (int i = 0; i < 8; ++i) put<std::int16_t>(buf, 40 + 2 * i, s.dim[i], be);
  put<std::int16_t>(buf, 70, s.datatype, be);
  put<std::int16_t>(buf, 72, s.bitpix, be);
  for (int i = 0; i < 8; ++i) put<float>(buf, 76 + 4 * i, s.pixdim[i], be);
  put<float>(buf, 108, 352.0f, be);
  put<float>(buf, 112, s.scl_slope, be);
  put<float>(buf, 116, s.scl_inter, be);
  put<std::int16_t>(buf, 252, s.qform_code, be);
  put<std::int16_t>(buf, 254, s.sform_code, be);
  for (int i = 0; i < 3; ++i) put<float>(buf, 256 + 4 * i, s.quatern[i], be);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) put<float>(buf, 280 + 16 * r + 4 * c, s.srow[r][c], be);
  }
  std::memcpy(buf.data() + 344, s.magic.data(), std::min<std::size_t>(4, s.magic.size()));
  buf.insert(buf.end(), s.data.begin(), s.data.end());
  return buf;
}

void write_nifti(const std::filesystem::path& path, const NiftiSpec& spec) {
  auto bytes = nifti_bytes(spec);
  if (path.extension() == ".gz") bytes = gzip(bytes);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace testsupport
