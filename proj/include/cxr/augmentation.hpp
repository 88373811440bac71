#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cxr/geometry.hpp"
#include "cxr/image.hpp"

namespace cxr {

struct CropFractions {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;
};

struct AffineParams {
  double scale_x = 1.0;
  double scale_y = 1.0;
  double rotation_deg = 0.0;  // positive is clockwise on screen
  double shear_deg = 0.0;     // applied to both axes
};

struct AugmentationParams {
  bool flip = false;
  CropFractions crop;
  std::optional<double> blur_sigma;
  double contrast_alpha = 1.0;
  std::optional<std::array<double, 3>> channel_gains;
  AffineParams affine;

  static AugmentationParams identity() { return {}; }
};

// Probabilities and ranges of the training-time augmentation recipe.
namespace augment_defaults {
inline constexpr double kFlipProbability = 0.5;
inline constexpr double kMaxCropFraction = 0.10;
inline constexpr double kBlurProbability = 0.5;
inline constexpr double kMaxBlurSigma = 0.5;
inline constexpr double kContrastMin = 0.9;
inline constexpr double kContrastMax = 1.1;
inline constexpr double kGainProbability = 0.2;
inline constexpr double kGainMin = 0.8;
inline constexpr double kGainMax = 1.2;
inline constexpr double kScaleMin = 0.8;
inline constexpr double kScaleMax = 1.2;
inline constexpr double kMaxRotationDeg = 10.0;
inline constexpr double kMaxShearDeg = 2.0;
}  // namespace augment_defaults

/// Every draw comes from its own stream derive_seed(derive_seed(seed, image_id), op-tag).
AugmentationParams sample_params(std::uint64_t seed, std::int64_t image_id);

struct AugmentedSample {
  Image8 image;
  std::vector<Polygon> polygons;
};

/// Applies flip, crop, blur, contrast, channel gains, affine, in that order.
/// Polygons follow the geometric steps, are clipped to the image and dropped
/// once their area falls below one pixel.
AugmentedSample apply_augmentation(const Image8& image, const std::vector<Polygon>& polygons,
                                   const AugmentationParams& params);

/// Affine forward map about the image center, in continuous coordinates.
struct Affine2D {
  double a = 1, b = 0, c = 0;  // x' = a x + b y + c
  double d = 0, e = 1, f = 0;  // y' = d x + e y + f

  Point apply(const Point& p) const { return {a * p.x + b * p.y + c, d * p.x + e * p.y + f}; }
  Affine2D inverse() const;
};

Affine2D affine_matrix(const AffineParams& p, std::size_t width, std::size_t height);

}  // namespace cxr
