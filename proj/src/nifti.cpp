#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "cxr/error.hpp"
#include "cxr/volume.hpp"

namespace cxr {
namespace {

constexpr std::size_t kHeaderSize = 348;

enum NiftiType : int { kUint8 = 2, kInt16 = 4, kInt32 = 8, kFloat32 = 16 };

template <typename T>
T load_le(const std::uint8_t* p) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw Error(ErrorKind::IoFailure, "zlib initialization failed");
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 1 << 16> buf;
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buf.data();
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorKind::IoFailure, "corrupt gzip stream");
    }
    out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error(ErrorKind::IoFailure, "truncated gzip stream");
    }
  }
  inflateEnd(&zs);
  return out;
}

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 quaternion_to_matrix(double b, double c, double d, double qfac) {
  double a = 1.0 - (b * b + c * c + d * d);
  a = a < 1e-7 ? 0.0 : std::sqrt(a);
  Mat3 r{{{a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
          {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
          {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b}}};
  for (auto& row : r) row[2] *= qfac;
  return r;
}

// Assigns each storage axis (column) to the world axis with the largest
// absolute direction cosine, resolved jointly over all six permutations so
// the result is always a bijection.
AxisRoles roles_from_matrix(const Mat3& m) {
  std::array<double, 3> norm{};
  for (int j = 0; j < 3; ++j) {
    norm[j] = std::sqrt(m[0][j] * m[0][j] + m[1][j] * m[1][j] + m[2][j] * m[2][j]);
    if (!(norm[j] > 0.0) || !std::isfinite(norm[j])) {
      throw Error(ErrorKind::MalformedHeader, "degenerate orientation transform");
    }
  }
  std::array<int, 3> perm{0, 1, 2};
  std::array<int, 3> best = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (int j = 0; j < 3; ++j) score += std::abs(m[perm[j]][j]) / norm[j];
    if (score > best_score + 1e-12) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  AxisRoles roles;
  for (int j = 0; j < 3; ++j) {
    roles.role[j] = static_cast<AnatomicalAxis>(best[j]);
    roles.direction[j] = m[best[j]][j] < 0.0 ? -1 : 1;
  }
  return roles;
}

template <typename Raw>
VoxelData convert(const std::uint8_t* data, std::size_t n, double slope, double inter) {
  const bool scaled = slope != 0.0 && std::isfinite(slope) && !(slope == 1.0 && inter == 0.0);
  auto apply = [&](Raw r) { return scaled ? slope * static_cast<double>(r) + inter : static_cast<double>(r); };

  if constexpr (std::is_integral_v<Raw>) {
    const bool integral_scaling = !scaled || (std::floor(slope) == slope && std::floor(inter) == inter);
    if (integral_scaling) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = apply(load_le<Raw>(data + i * sizeof(Raw)));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (n == 0 || (lo >= std::numeric_limits<std::int16_t>::min() && hi <= std::numeric_limits<std::int16_t>::max())) {
        std::vector<std::int16_t> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::int16_t>(apply(load_le<Raw>(data + i * sizeof(Raw))));
        return out;
      }
      if (lo >= std::numeric_limits<std::int32_t>::min() && hi <= std::numeric_limits<std::int32_t>::max()) {
        std::vector<std::int32_t> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::int32_t>(apply(load_le<Raw>(data + i * sizeof(Raw))));
        return out;
      }
    }
  }
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(apply(load_le<Raw>(data + i * sizeof(Raw))));
  return out;
}

}  // namespace

Volume3D parse_nifti(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderSize) throw Error(ErrorKind::MalformedHeader, "file shorter than the 348-byte header");
  const std::uint8_t* h = bytes.data();

  const auto sizeof_hdr = load_le<std::int32_t>(h);
  if (sizeof_hdr != static_cast<std::int32_t>(kHeaderSize)) {
    const auto u = static_cast<std::uint32_t>(sizeof_hdr);
    const auto swapped = (u >> 24) | ((u >> 8) & 0xFF00u) | ((u << 8) & 0xFF0000u) | (u << 24);
    if (swapped == kHeaderSize) {
      throw Error(ErrorKind::MalformedHeader, "big-endian header is not supported");
    }
    throw Error(ErrorKind::MalformedHeader, "sizeof_hdr is not 348");
  }
  if (std::memcmp(h + 344, "n+1\0", 4) != 0) {
    if (std::memcmp(h + 344, "ni1\0", 4) == 0) {
      throw Error(ErrorKind::MalformedHeader, "detached-header NIfTI (ni1) is not supported");
    }
    throw Error(ErrorKind::MalformedHeader, "bad magic, expected n+1");
  }

  std::array<std::int16_t, 8> dim{};
  for (int k = 0; k < 8; ++k) dim[k] = load_le<std::int16_t>(h + 40 + 2 * k);
  if (dim[0] < 1 || dim[0] > 7) throw Error(ErrorKind::MalformedHeader, "dim[0] outside 1..7");
  if (dim[0] < 3) throw Error(ErrorKind::DimensionMismatch, "expected a 3D volume, dim[0] = " + std::to_string(dim[0]));
  for (int k = 4; k <= dim[0]; ++k) {
    if (dim[k] != 1) throw Error(ErrorKind::DimensionMismatch, "trailing dimension " + std::to_string(k) + " is not 1");
  }
  for (int k = 1; k <= 3; ++k) {
    if (dim[k] < 1) throw Error(ErrorKind::MalformedHeader, "nonpositive dim[" + std::to_string(k) + "]");
  }

  const auto datatype = load_le<std::int16_t>(h + 70);
  const auto bitpix = load_le<std::int16_t>(h + 72);
  int expected_bits = 0;
  switch (datatype) {
    case kUint8: expected_bits = 8; break;
    case kInt16: expected_bits = 16; break;
    case kInt32: expected_bits = 32; break;
    case kFloat32: expected_bits = 32; break;
    default: throw Error(ErrorKind::UnsupportedDatatype, "datatype code " + std::to_string(datatype));
  }
  if (bitpix != expected_bits) throw Error(ErrorKind::MalformedHeader, "bitpix does not match datatype");

  std::array<float, 8> pixdim{};
  for (int k = 0; k < 8; ++k) pixdim[k] = load_le<float>(h + 76 + 4 * k);
  Spacing3 spacing{};
  for (int k = 0; k < 3; ++k) {
    spacing[k] = std::abs(static_cast<double>(pixdim[k + 1]));
    if (!(spacing[k] > 0.0) || !std::isfinite(spacing[k])) {
      throw Error(ErrorKind::MalformedHeader, "pixdim[" + std::to_string(k + 1) + "] is not a positive spacing");
    }
  }

  const auto vox_offset = load_le<float>(h + 108);
  const auto slope = static_cast<double>(load_le<float>(h + 112));
  const auto inter = static_cast<double>(load_le<float>(h + 116));
  const auto qform_code = load_le<std::int16_t>(h + 252);
  const auto sform_code = load_le<std::int16_t>(h + 254);

  AxisRoles roles;
  if (sform_code > 0) {
    Mat3 m{};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] = load_le<float>(h + 280 + 16 * r + 4 * c);
    }
    roles = roles_from_matrix(m);
  } else if (qform_code > 0) {
    const double qfac = pixdim[0] < 0.0f ? -1.0 : 1.0;
    roles = roles_from_matrix(quaternion_to_matrix(load_le<float>(h + 256), load_le<float>(h + 260),
                                                   load_le<float>(h + 264), qfac));
  }

  const Dims3 dims{static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]), static_cast<std::size_t>(dim[3])};
  const std::size_t n = dims[0] * dims[1] * dims[2];
  if (!(vox_offset >= 0.0f) || !std::isfinite(vox_offset)) throw Error(ErrorKind::MalformedHeader, "bad vox_offset");
  const auto offset = std::max<std::size_t>(static_cast<std::size_t>(vox_offset), kHeaderSize);
  const std::size_t need = offset + n * static_cast<std::size_t>(expected_bits / 8);
  if (bytes.size() < need) {
    std::ostringstream os;
    os << "voxel data truncated: need " << need << " bytes, have " << bytes.size();
    throw Error(ErrorKind::MalformedHeader, os.str());
  }

  const std::uint8_t* data = bytes.data() + offset;
  VoxelData voxels;
  switch (datatype) {
    case kUint8: voxels = convert<std::uint8_t>(data, n, slope, inter); break;
    case kInt16: voxels = convert<std::int16_t>(data, n, slope, inter); break;
    case kInt32: voxels = convert<std::int32_t>(data, n, slope, inter); break;
    default: voxels = convert<float>(data, n, slope, inter); break;
  }
  return Volume3D(dims, spacing, std::move(voxels), roles);
}

Volume3D read_nifti(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::IoFailure, "read failed for " + path.string());
  if (bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B) bytes = gunzip(bytes);
  return parse_nifti(bytes);
}

}  // namespace cxr
