#include "cxr/projection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <type_traits>

#include "cxr/error.hpp"
#include "cxr/kernels.hpp"
#include "cxr/parallel.hpp"

namespace cxr {
namespace {

constexpr std::size_t kRowsPerTask = 8;

// Geometry of a reduction along the AP storage axis. The raw accumulator is
// indexed (ia + na * ib) over the two remaining storage axes, a < b.
struct Reduction {
  Dims3 dims;
  int ap;
  int a;
  int b;
  std::size_t na() const { return dims[a]; }
  std::size_t nb() const { return dims[b]; }
};

Reduction make_reduction(const Volume3D& vol) {
  const int ap = vol.axis_roles().storage_axis(AnatomicalAxis::AnteriorPosterior);
  Reduction r{vol.dims(), ap, ap == 0 ? 1 : 0, ap == 2 ? 1 : 2};
  return r;
}

// row(src_row, acc_row, n) adds one contiguous storage row into an accumulator row;
// elem(acc, v) handles the AP-fastest layout element by element.
template <typename T, typename Acc, typename RowFn, typename ElemFn>
std::vector<Acc> reduce_ap(const std::vector<T>& data, const Reduction& r, RowFn row, ElemFn elem) {
  const auto& d = r.dims;
  std::vector<Acc> raw(r.na() * r.nb(), Acc{});
  const T* src = data.data();
  switch (r.ap) {
    case 1:
      parallel_for(d[2], kRowsPerTask, [&](std::size_t z0, std::size_t z1) {
        for (std::size_t z = z0; z < z1; ++z) {
          for (std::size_t y = 0; y < d[1]; ++y) row(src + d[0] * (y + d[1] * z), raw.data() + z * d[0], d[0]);
        }
      });
      break;
    case 2:
      parallel_for(d[1], kRowsPerTask, [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
          for (std::size_t z = 0; z < d[2]; ++z) row(src + d[0] * (y + d[1] * z), raw.data() + y * d[0], d[0]);
        }
      });
      break;
    default:
      parallel_for(d[2], kRowsPerTask, [&](std::size_t z0, std::size_t z1) {
        for (std::size_t z = z0; z < z1; ++z) {
          for (std::size_t y = 0; y < d[1]; ++y) {
            Acc& acc = raw[y + d[1] * z];
            const T* run = src + d[0] * (y + d[1] * z);
            for (std::size_t x = 0; x < d[0]; ++x) elem(acc, run[x]);
          }
        }
      });
      break;
  }
  return raw;
}

struct DisplayMap {
  std::size_t width;
  std::size_t height;
  bool lr_is_a;
  bool flip_cols;
  bool flip_rows;

  // Raw accumulator index for display pixel (col, row).
  std::size_t raw_index(std::size_t col, std::size_t row, std::size_t na) const {
    const std::size_t il = flip_cols ? width - 1 - col : col;
    const std::size_t is = flip_rows ? height - 1 - row : row;
    return lr_is_a ? il + na * is : is + na * il;
  }
};

DisplayMap make_display(const Volume3D& vol, const Reduction& r, DisplayFlips flips) {
  const auto& roles = vol.axis_roles();
  const int lr = roles.storage_axis(AnatomicalAxis::LeftRight);
  const int si = roles.storage_axis(AnatomicalAxis::SuperiorInferior);
  DisplayMap m{};
  m.width = vol.dims()[lr];
  m.height = vol.dims()[si];
  m.lr_is_a = lr == r.a;
  // Columns must advance toward patient left, rows toward inferior.
  m.flip_cols = (roles.direction[lr] > 0) != flips.left_right;
  m.flip_rows = (roles.direction[si] > 0) != flips.superior_inferior;
  return m;
}

bool integral_or_infinite(double v) { return std::isinf(v) || std::floor(v) == v; }

std::int32_t to_i32_bound(double v) {
  constexpr double lo = std::numeric_limits<std::int32_t>::min();
  constexpr double hi = std::numeric_limits<std::int32_t>::max();
  return static_cast<std::int32_t>(std::clamp(v, lo, hi));
}

template <typename Acc>
Projection2D to_display(const std::vector<Acc>& raw, const Reduction& r, const DisplayMap& m, const Volume3D& vol) {
  Projection2D p;
  p.width = m.width;
  p.height = m.height;
  p.values.resize(m.width * m.height);
  const auto& roles = vol.axis_roles();
  p.pixel_spacing = {vol.spacing()[roles.storage_axis(AnatomicalAxis::LeftRight)],
                     vol.spacing()[roles.storage_axis(AnatomicalAxis::SuperiorInferior)]};
  for (std::size_t row = 0; row < m.height; ++row) {
    for (std::size_t col = 0; col < m.width; ++col) {
      const double v = static_cast<double>(raw[m.raw_index(col, row, r.na())]);
      if (!std::isfinite(v)) throw Error(ErrorKind::InvariantViolation, "non-finite projection value");
      p.values[row * m.width + col] = v;
    }
  }
  return p;
}

}  // namespace

void WindowSpec::validate() const {
  if (std::isnan(hu_min) || std::isnan(hu_max) || !(hu_min < hu_max)) {
    throw Error(ErrorKind::ConfigError, "window requires hu_min < hu_max");
  }
}

Projection2D project_coronal(const Volume3D& vol, const WindowSpec& window, DisplayFlips flips) {
  window.validate();
  const Reduction r = make_reduction(vol);
  const DisplayMap m = make_display(vol, r, flips);
  const auto& k = kernels::active();

  return std::visit(
      [&](const auto& data) -> Projection2D {
        using T = typename std::decay_t<decltype(data)>::value_type;
        if constexpr (std::is_integral_v<T>) {
          if (integral_or_infinite(window.hu_min) && integral_or_infinite(window.hu_max)) {
            const std::int32_t lo = to_i32_bound(window.hu_min);
            const std::int32_t hi = to_i32_bound(window.hu_max);
            auto row = [&](const T* s, std::int64_t* acc, std::size_t n) {
              if constexpr (std::is_same_v<T, std::int16_t>) {
                k.accumulate_i16(s, acc, n, lo, hi);
              } else {
                k.accumulate_i32(s, acc, n, lo, hi);
              }
            };
            auto elem = [&](std::int64_t& acc, T v) { acc += std::clamp<std::int32_t>(v, lo, hi); };
            return to_display(reduce_ap<T, std::int64_t>(data, r, row, elem), r, m, vol);
          }
          // Fractional bounds on integer data: clamp in double precision.
          auto clampd = [&](T v) { return std::clamp(static_cast<double>(v), window.hu_min, window.hu_max); };
          auto row = [&](const T* s, double* acc, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i) acc[i] += clampd(s[i]);
          };
          auto elem = [&](double& acc, T v) { acc += clampd(v); };
          return to_display(reduce_ap<T, double>(data, r, row, elem), r, m, vol);
        } else {
          const auto lo = static_cast<float>(window.hu_min);
          const auto hi = static_cast<float>(window.hu_max);
          auto row = [&](const float* s, double* acc, std::size_t n) { k.accumulate_f32(s, acc, n, lo, hi); };
          auto elem = [&](double& acc, float v) { acc += static_cast<double>(std::min(std::max(lo, v), hi)); };
          return to_display(reduce_ap<float, double>(data, r, row, elem), r, m, vol);
        }
      },
      vol.voxels());
}

BinaryMask project_mask(const MaskVolume& mask, int min_voxels, DisplayFlips flips) {
  if (min_voxels < 1) throw Error(ErrorKind::ConfigError, "mask_min_voxels must be >= 1");
  const Volume3D& vol = mask.volume();
  const Reduction r = make_reduction(vol);
  const DisplayMap m = make_display(vol, r, flips);
  const auto& k = kernels::active();

  const auto counts = std::visit(
      [&](const auto& data) {
        using T = typename std::decay_t<decltype(data)>::value_type;
        auto row = [&](const T* s, std::int32_t* c, std::size_t n) {
          if constexpr (std::is_same_v<T, std::int16_t>) {
            k.count_nonzero_i16(s, c, n);
          } else if constexpr (std::is_same_v<T, std::int32_t>) {
            k.count_nonzero_i32(s, c, n);
          } else {
            k.count_nonzero_f32(s, c, n);
          }
        };
        auto elem = [](std::int32_t& c, T v) { c += v != T{0}; };
        return reduce_ap<T, std::int32_t>(data, r, row, elem);
      },
      vol.voxels());

  BinaryMask out(m.width, m.height);
  for (std::size_t row = 0; row < m.height; ++row) {
    for (std::size_t col = 0; col < m.width; ++col) {
      out.set(col, row, counts[m.raw_index(col, row, r.na())] >= min_voxels);
    }
  }
  return out;
}

Image8 normalize_to_8bit(const Projection2D& p) {
  if (p.values.empty()) throw Error(ErrorKind::InvariantViolation, "empty projection");
  const auto [lo_it, hi_it] = std::minmax_element(p.values.begin(), p.values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  Image8 img(p.width, p.height, 1);
  img.provenance = Provenance::CtProjection;
  if (range > 0.0) {
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * (p.values[i] - lo) / range));
    }
  }
  return img;
}

namespace {

std::size_t scaled_dim(std::size_t n, double spacing, double pitch) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(n) * spacing / pitch)));
}

void check_spacing(double sx, double sz) {
  if (!(sx > 0.0 && sz > 0.0 && std::isfinite(sx) && std::isfinite(sz))) {
    throw Error(ErrorKind::InvariantViolation, "resampling spacing must be positive");
  }
}

double resolve_pitch(double sx, double sz, double pitch) {
  if (pitch == 0.0) return std::min(sx, sz);
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw Error(ErrorKind::InvariantViolation, "resampling pitch must be positive");
  return pitch;
}

}  // namespace

Image8 resample_isotropic(const Image8& img, double sx, double sz, double pitch_mm) {
  check_spacing(sx, sz);
  const double pitch = resolve_pitch(sx, sz, pitch_mm);
  const std::size_t ow = scaled_dim(img.width, sx, pitch);
  const std::size_t oh = scaled_dim(img.height, sz, pitch);
  if (ow == img.width && oh == img.height) return img;

  Image8 out(ow, oh, img.channels);
  out.provenance = img.provenance;
  const double W = static_cast<double>(img.width);
  const double H = static_cast<double>(img.height);
  for (std::size_t v = 0; v < oh; ++v) {
    const double sy = std::clamp((static_cast<double>(v) + 0.5) * H / static_cast<double>(oh) - 0.5, 0.0, H - 1.0);
    const auto y0 = static_cast<std::size_t>(sy);
    const std::size_t y1 = std::min(y0 + 1, img.height - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t u = 0; u < ow; ++u) {
      const double sxp = std::clamp((static_cast<double>(u) + 0.5) * W / static_cast<double>(ow) - 0.5, 0.0, W - 1.0);
      const auto x0 = static_cast<std::size_t>(sxp);
      const std::size_t x1 = std::min(x0 + 1, img.width - 1);
      const double fx = sxp - static_cast<double>(x0);
      for (std::size_t c = 0; c < img.channels; ++c) {
        const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
        const double bot = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
        out.at(u, v, c) = static_cast<std::uint8_t>(std::clamp(std::lround(top * (1.0 - fy) + bot * fy), 0L, 255L));
      }
    }
  }
  return out;
}

BinaryMask resample_isotropic(const BinaryMask& mask, double sx, double sz, double pitch_mm) {
  check_spacing(sx, sz);
  const double pitch = resolve_pitch(sx, sz, pitch_mm);
  const std::size_t ow = scaled_dim(mask.width, sx, pitch);
  const std::size_t oh = scaled_dim(mask.height, sz, pitch);
  if (ow == mask.width && oh == mask.height) return mask;

  BinaryMask out(ow, oh);
  for (std::size_t v = 0; v < oh; ++v) {
    const auto sy = std::min(mask.height - 1, static_cast<std::size_t>((static_cast<double>(v) + 0.5) *
                                                                        static_cast<double>(mask.height) /
                                                                        static_cast<double>(oh)));
    for (std::size_t u = 0; u < ow; ++u) {
      const auto sxi = std::min(mask.width - 1, static_cast<std::size_t>((static_cast<double>(u) + 0.5) *
                                                                          static_cast<double>(mask.width) /
                                                                          static_cast<double>(ow)));
      out.set(u, v, mask.get(sxi, sy));
    }
  }
  return out;
}

}  // namespace cxr
