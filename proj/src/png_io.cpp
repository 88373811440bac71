#include <png.h>

#include <cstdio>
#include <memory>

#include "cxr/error.hpp"
#include "cxr/image.hpp"

namespace cxr {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return f;
}

}  // namespace

std::size_t BinaryMask::count() const {
  std::size_t n = 0;
  for (auto b : bits) n += b != 0;
  return n;
}

void write_png(const std::filesystem::path& path, const Image8& img) {
  if (img.channels != 1 && img.channels != 3) throw Error(ErrorKind::InvariantViolation, "PNG writer supports 1 or 3 channels");
  if (img.width == 0 || img.height == 0) throw Error(ErrorKind::InvariantViolation, "cannot write an empty image");
  auto f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::IoFailure, "libpng allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoFailure, "PNG encoding failed for " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = img.width * img.channels;
  for (std::size_t y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.pixels.data() + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  Image8 img(mask.width, mask.height, 1);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
  write_png(path, img);
}

Image8 read_png(const std::filesystem::path& path) {
  auto f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::IoFailure, "libpng allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::IoFailure, "PNG decoding failed for " + path.string());
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_packing(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  const auto w = png_get_image_width(png, info);
  const auto h = png_get_image_height(png, info);
  const auto channels = png_get_channels(png, info);
  Image8 img(w, h, channels);
  img.provenance = Provenance::RealXray;
  std::vector<png_bytep> rows(h);
  for (std::size_t y = 0; y < h; ++y) rows[y] = img.pixels.data() + y * w * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  if (channels != 1 && channels != 3) throw Error(ErrorKind::IoFailure, "unsupported PNG channel layout in " + path.string());
  return img;
}

BinaryMask read_mask_png(const std::filesystem::path& path) {
  const Image8 img = read_png(path);
  BinaryMask m(img.width, img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      bool on = false;
      for (std::size_t c = 0; c < img.channels; ++c) on = on || img.at(x, y, c) != 0;
      m.set(x, y, on);
    }
  }
  return m;
}

}  // namespace cxr
