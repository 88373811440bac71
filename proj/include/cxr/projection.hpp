#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "cxr/image.hpp"
#include "cxr/volume.hpp"

namespace cxr {

/// Hounsfield clamp applied to every voxel before summation.
struct WindowSpec {
  double hu_min = -1024.0;
  double hu_max = 600.0;

  static WindowSpec disabled() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  void validate() const;
};

/// Extra flips applied after the radiographic reorientation, for sources
/// whose stored orientation metadata is wrong.
struct DisplayFlips {
  bool left_right = false;
  bool superior_inferior = false;
};

/// Coronal accumulator, row-major: column runs right-to-left across the
/// patient (patient left on the image right), row 0 is most superior.
struct Projection2D {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
  std::array<double, 2> pixel_spacing{1.0, 1.0};  // (column, row) pitch in mm

  double at(std::size_t x, std::size_t z) const { return values[z * width + x]; }
};

/// Sums clamped intensities along the anterior-posterior axis.
Projection2D project_coronal(const Volume3D& vol, const WindowSpec& window = {}, DisplayFlips flips = {});

/// Foreground where at least `min_voxels` lesion voxels lie along the AP column.
BinaryMask project_mask(const MaskVolume& mask, int min_voxels = 1, DisplayFlips flips = {});

/// Linear min-max map to [0, 255], rounding half away from zero. A constant
/// projection maps to an all-zero image.
Image8 normalize_to_8bit(const Projection2D& p);

/// Square pixels at `pitch` mm, min(sx, sz) when pitch is 0. Bilinear for images.
Image8 resample_isotropic(const Image8& img, double sx, double sz, double pitch = 0.0);
/// Nearest-neighbor variant for masks.
BinaryMask resample_isotropic(const BinaryMask& mask, double sx, double sz, double pitch = 0.0);

}  // namespace cxr
