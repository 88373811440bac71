#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

namespace cxr {

enum class AnatomicalAxis { LeftRight = 0, AnteriorPosterior = 1, SuperiorInferior = 2 };

/// Maps each storage axis (0 = fastest varying) to an anatomical axis.
///
/// `direction[k]` is +1 when increasing index k moves toward patient Right,
/// Anterior or Superior (NIfTI RAS+ world), and -1 otherwise. The default
/// value describes a plain axial stack already in radiographic display
/// order: X runs toward patient left, Y toward posterior, Z toward inferior.
struct AxisRoles {
  std::array<AnatomicalAxis, 3> role{AnatomicalAxis::LeftRight, AnatomicalAxis::AnteriorPosterior,
                                     AnatomicalAxis::SuperiorInferior};
  std::array<int, 3> direction{-1, -1, -1};

  /// Storage axis carrying the given anatomical role.
  int storage_axis(AnatomicalAxis a) const;
  bool is_bijection() const;

  friend bool operator==(const AxisRoles&, const AxisRoles&) = default;
};

using Dims3 = std::array<std::size_t, 3>;
using Spacing3 = std::array<double, 3>;

// Integer-valued sources keep an integer representation so projections can
// accumulate exactly; everything else is single precision.
using VoxelData = std::variant<std::vector<std::int16_t>, std::vector<std::int32_t>, std::vector<float>>;

class Volume3D {
 public:
  Volume3D(Dims3 dims, Spacing3 spacing, VoxelData voxels, AxisRoles roles = {});

  const Dims3& dims() const noexcept { return dims_; }
  const Spacing3& spacing() const noexcept { return spacing_; }
  const AxisRoles& axis_roles() const noexcept { return roles_; }
  const VoxelData& voxels() const noexcept { return voxels_; }

  std::size_t size() const noexcept { return dims_[0] * dims_[1] * dims_[2]; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims_[0] * (y + dims_[1] * z);
  }
  double value(std::size_t i) const;
  double value(std::size_t x, std::size_t y, std::size_t z) const { return value(index(x, y, z)); }
  bool is_integer() const noexcept { return !std::holds_alternative<std::vector<float>>(voxels_); }

  friend bool operator==(const Volume3D&, const Volume3D&) = default;

 private:
  Dims3 dims_;
  Spacing3 spacing_;
  VoxelData voxels_;
  AxisRoles roles_;
};

/// Lesion label volume; nonzero voxels are lesion.
class MaskVolume {
 public:
  explicit MaskVolume(Volume3D volume) : volume_(std::move(volume)) {}
  const Volume3D& volume() const noexcept { return volume_; }
  const Dims3& dims() const noexcept { return volume_.dims(); }
  const Spacing3& spacing() const noexcept { return volume_.spacing(); }

 private:
  Volume3D volume_;
};

struct PairedCase {
  Volume3D ct;
  MaskVolume mask;
};

inline constexpr double kSpacingTolerance = 1e-3;

/// Accepts the pair iff dims agree exactly and spacing within 1e-3 mm per axis.
PairedCase pair_mask(Volume3D ct, MaskVolume mask);

/// Single-file NIfTI-1 reader (".nii" or gzip-wrapped ".nii.gz").
Volume3D read_nifti(const std::filesystem::path& path);

/// Parses an in-memory NIfTI-1 image (already decompressed).
Volume3D parse_nifti(const std::vector<std::uint8_t>& bytes);

}  // namespace cxr
