#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace cxr {

enum class Provenance { RealXray, CtProjection };

/// 8-bit image, row-major, interleaved channels (1 = gray, 3 = RGB).
struct Image8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> pixels;
  Provenance provenance = Provenance::CtProjection;

  Image8() = default;
  Image8(std::size_t w, std::size_t h, std::size_t c = 1, std::uint8_t fill = 0)
      : width(w), height(h), channels(c), pixels(w * h * c, fill) {}

  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c = 0) { return pixels[(y * width + x) * channels + c]; }
  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c = 0) const { return pixels[(y * width + x) * channels + c]; }

  friend bool operator==(const Image8&, const Image8&) = default;
};

/// Binary mask stored as one byte per pixel, values 0 or 1.
struct BinaryMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(std::size_t w, std::size_t h) : width(w), height(h), bits(w * h, 0) {}

  bool get(std::size_t x, std::size_t y) const { return bits[y * width + x] != 0; }
  void set(std::size_t x, std::size_t y, bool v = true) { bits[y * width + x] = v ? 1 : 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// PNG I/O. Masks are written with values {0, 255} and read back with any
// nonzero value as foreground.
void write_png(const std::filesystem::path& path, const Image8& img);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
Image8 read_png(const std::filesystem::path& path);
BinaryMask read_mask_png(const std::filesystem::path& path);

}  // namespace cxr
