#include "cxr/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cxr/rng.hpp"

namespace cxr {
namespace {

namespace ad = augment_defaults;

std::uint8_t saturate(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// Bilinear sample at continuous pixel-index coordinates (pixel centers at
// integers). Out-of-range samples return `fill` when `clamp_edges` is false.
double sample(const Image8& img, double x, double y, std::size_t c, bool clamp_edges, double fill = 0.0) {
  const double maxx = static_cast<double>(img.width) - 1.0;
  const double maxy = static_cast<double>(img.height) - 1.0;
  if (clamp_edges) {
    x = std::clamp(x, 0.0, maxx);
    y = std::clamp(y, 0.0, maxy);
  } else if (x < -0.5 || y < -0.5 || x > maxx + 0.5 || y > maxy + 0.5) {
    return fill;
  } else {
    x = std::clamp(x, 0.0, maxx);
    y = std::clamp(y, 0.0, maxy);
  }
  const auto x0 = static_cast<std::size_t>(x);
  const auto y0 = static_cast<std::size_t>(y);
  const std::size_t x1 = std::min(x0 + 1, img.width - 1);
  const std::size_t y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
  const double bot = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
  return top * (1.0 - fy) + bot * fy;
}

Image8 flip_horizontal(const Image8& img) {
  Image8 out = img;
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < img.channels; ++c) out.at(img.width - 1 - x, y, c) = img.at(x, y, c);
    }
  }
  return out;
}

struct CropRect {
  double x0, y0, x1, y1;
};

CropRect crop_rect(const CropFractions& f, std::size_t w, std::size_t h) {
  const double W = static_cast<double>(w);
  const double H = static_cast<double>(h);
  return {f.left * W, f.top * H, W - f.right * W, H - f.bottom * H};
}

// Crops to r and resizes back to the original dimensions.
Image8 crop_resize(const Image8& img, const CropRect& r) {
  Image8 out(img.width, img.height, img.channels);
  out.provenance = img.provenance;
  const double sx = (r.x1 - r.x0) / static_cast<double>(img.width);
  const double sy = (r.y1 - r.y0) / static_cast<double>(img.height);
  for (std::size_t v = 0; v < img.height; ++v) {
    const double y = r.y0 + (static_cast<double>(v) + 0.5) * sy - 0.5;
    for (std::size_t u = 0; u < img.width; ++u) {
      const double x = r.x0 + (static_cast<double>(u) + 0.5) * sx - 0.5;
      for (std::size_t c = 0; c < img.channels; ++c) out.at(u, v, c) = saturate(sample(img, x, y, c, true));
    }
  }
  return out;
}

Image8 gaussian_blur(const Image8& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  const auto w = static_cast<long>(img.width);
  const auto h = static_cast<long>(img.height);
  std::vector<double> tmp(img.pixels.size());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const long xx = std::clamp(x + i, 0L, w - 1);
          acc += kernel[i + radius] * img.at(static_cast<std::size_t>(xx), static_cast<std::size_t>(y), c);
        }
        tmp[(static_cast<std::size_t>(y * w + x)) * img.channels + c] = acc;
      }
    }
  }
  Image8 out = img;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const long yy = std::clamp(y + i, 0L, h - 1);
          acc += kernel[i + radius] * tmp[(static_cast<std::size_t>(yy * w + x)) * img.channels + c];
        }
        out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), c) = saturate(acc);
      }
    }
  }
  return out;
}

Image8 contrast(const Image8& img, double alpha) {
  if (alpha == 1.0) return img;
  Image8 out = img;
  for (auto& p : out.pixels) p = saturate((static_cast<double>(p) - 128.0) * alpha + 128.0);
  return out;
}

Image8 channel_gains(const Image8& img, const std::array<double, 3>& gains) {
  Image8 out(img.width, img.height, 3);
  out.provenance = img.provenance;
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = img.at(x, y, img.channels == 3 ? c : 0);
        out.at(x, y, c) = saturate(v * gains[c]);
      }
    }
  }
  return out;
}

bool is_identity(const AffineParams& p) {
  return p.scale_x == 1.0 && p.scale_y == 1.0 && p.rotation_deg == 0.0 && p.shear_deg == 0.0;
}

Image8 warp_affine(const Image8& img, const Affine2D& forward) {
  const Affine2D inv = forward.inverse();
  Image8 out(img.width, img.height, img.channels);
  out.provenance = img.provenance;
  for (std::size_t v = 0; v < img.height; ++v) {
    for (std::size_t u = 0; u < img.width; ++u) {
      const Point src = inv.apply({static_cast<double>(u) + 0.5, static_cast<double>(v) + 0.5});
      for (std::size_t c = 0; c < img.channels; ++c) {
        out.at(u, v, c) = saturate(sample(img, src.x - 0.5, src.y - 0.5, c, false));
      }
    }
  }
  return out;
}

void transform_polygons(std::vector<Polygon>& polys, auto&& fn) {
  for (auto& poly : polys) {
    for (auto& p : poly) p = fn(p);
  }
}

void clip_and_filter(std::vector<Polygon>& polys, std::size_t w, std::size_t h) {
  for (auto& poly : polys) poly = clip_to_rect(poly, static_cast<double>(w), static_cast<double>(h));
  std::erase_if(polys, [](const Polygon& p) { return p.size() < 3 || polygon_area(p) < 1.0; });
}

}  // namespace

Affine2D Affine2D::inverse() const {
  const double det = a * e - b * d;
  Affine2D r;
  r.a = e / det;
  r.b = -b / det;
  r.d = -d / det;
  r.e = a / det;
  r.c = -(r.a * c + r.b * f);
  r.f = -(r.d * c + r.e * f);
  return r;
}

Affine2D affine_matrix(const AffineParams& p, std::size_t width, std::size_t height) {
  const double th = p.rotation_deg * std::numbers::pi / 180.0;
  const double sh = std::tan(p.shear_deg * std::numbers::pi / 180.0);
  const double cs = std::cos(th);
  const double sn = std::sin(th);
  // M = R * Shear * Scale; y points down so this rotation is clockwise on screen.
  const double m00 = p.scale_x * (cs - sn * sh);
  const double m01 = p.scale_y * (cs * sh - sn);
  const double m10 = p.scale_x * (sn + cs * sh);
  const double m11 = p.scale_y * (sn * sh + cs);
  const double cx = static_cast<double>(width) / 2.0;
  const double cy = static_cast<double>(height) / 2.0;
  Affine2D t;
  t.a = m00;
  t.b = m01;
  t.d = m10;
  t.e = m11;
  t.c = cx - (m00 * cx + m01 * cy);
  t.f = cy - (m10 * cx + m11 * cy);
  return t;
}

AugmentationParams sample_params(std::uint64_t seed, std::int64_t image_id) {
  const std::uint64_t base = derive_seed(seed, static_cast<std::uint64_t>(image_id));
  auto stream = [base](const char* tag) { return SplitMix64(derive_seed(base, tag)); };

  AugmentationParams p;
  {
    auto rng = stream("flip");
    p.flip = rng.bernoulli(ad::kFlipProbability);
  }
  {
    auto rng = stream("crop");
    p.crop = {rng.uniform(0.0, ad::kMaxCropFraction), rng.uniform(0.0, ad::kMaxCropFraction),
              rng.uniform(0.0, ad::kMaxCropFraction), rng.uniform(0.0, ad::kMaxCropFraction)};
  }
  {
    auto rng = stream("blur");
    if (rng.bernoulli(ad::kBlurProbability)) p.blur_sigma = rng.uniform(0.0, ad::kMaxBlurSigma);
  }
  {
    auto rng = stream("contrast");
    p.contrast_alpha = rng.uniform(ad::kContrastMin, ad::kContrastMax);
  }
  {
    auto rng = stream("gains");
    if (rng.bernoulli(ad::kGainProbability)) {
      p.channel_gains = std::array<double, 3>{rng.uniform(ad::kGainMin, ad::kGainMax),
                                              rng.uniform(ad::kGainMin, ad::kGainMax),
                                              rng.uniform(ad::kGainMin, ad::kGainMax)};
    }
  }
  {
    auto rng = stream("affine");
    p.affine.scale_x = rng.uniform(ad::kScaleMin, ad::kScaleMax);
    p.affine.scale_y = rng.uniform(ad::kScaleMin, ad::kScaleMax);
    p.affine.rotation_deg = rng.uniform(-ad::kMaxRotationDeg, ad::kMaxRotationDeg);
    p.affine.shear_deg = rng.uniform(-ad::kMaxShearDeg, ad::kMaxShearDeg);
  }
  return p;
}

AugmentedSample apply_augmentation(const Image8& image, const std::vector<Polygon>& polygons,
                                   const AugmentationParams& params) {
  AugmentedSample s{image, polygons};
  const std::size_t w = image.width;
  const std::size_t h = image.height;

  if (params.flip) {
    s.image = flip_horizontal(s.image);
    const double W = static_cast<double>(w);
    transform_polygons(s.polygons, [W](const Point& p) { return Point{W - p.x, p.y}; });
  }

  const auto& cf = params.crop;
  if (cf.left != 0.0 || cf.top != 0.0 || cf.right != 0.0 || cf.bottom != 0.0) {
    const CropRect r = crop_rect(cf, w, h);
    s.image = crop_resize(s.image, r);
    const double kx = static_cast<double>(w) / (r.x1 - r.x0);
    const double ky = static_cast<double>(h) / (r.y1 - r.y0);
    transform_polygons(s.polygons, [&](const Point& p) { return Point{(p.x - r.x0) * kx, (p.y - r.y0) * ky}; });
    clip_and_filter(s.polygons, w, h);
  }

  if (params.blur_sigma) s.image = gaussian_blur(s.image, *params.blur_sigma);
  s.image = contrast(s.image, params.contrast_alpha);
  if (params.channel_gains) s.image = channel_gains(s.image, *params.channel_gains);

  if (!is_identity(params.affine)) {
    const Affine2D m = affine_matrix(params.affine, w, h);
    s.image = warp_affine(s.image, m);
    transform_polygons(s.polygons, [&m](const Point& p) { return m.apply(p); });
    clip_and_filter(s.polygons, w, h);
  }
  return s;
}

}  // namespace cxr
