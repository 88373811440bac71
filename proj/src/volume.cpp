#include "cxr/volume.hpp"

#include <cmath>
#include <sstream>

#include "cxr/error.hpp"

namespace cxr {

int AxisRoles::storage_axis(AnatomicalAxis a) const {
  for (int k = 0; k < 3; ++k) {
    if (role[k] == a) return k;
  }
  throw Error(ErrorKind::InvalidOrientation, "no storage axis carries the requested anatomical role");
}

bool AxisRoles::is_bijection() const {
  std::array<int, 3> seen{};
  for (auto r : role) ++seen[static_cast<int>(r)];
  return seen[0] == 1 && seen[1] == 1 && seen[2] == 1;
}

Volume3D::Volume3D(Dims3 dims, Spacing3 spacing, VoxelData voxels, AxisRoles roles)
    : dims_(dims), spacing_(spacing), voxels_(std::move(voxels)), roles_(roles) {
  for (auto d : dims_) {
    if (d == 0) throw Error(ErrorKind::InvariantViolation, "volume dimensions must be positive");
  }
  for (auto s : spacing_) {
    if (!(std::isfinite(s) && s > 0.0)) throw Error(ErrorKind::InvariantViolation, "voxel spacing must be positive and finite");
  }
  const auto n = std::visit([](const auto& v) { return v.size(); }, voxels_);
  if (n != size()) {
    std::ostringstream os;
    os << "voxel count " << n << " does not match dims " << dims_[0] << "x" << dims_[1] << "x" << dims_[2];
    throw Error(ErrorKind::InvariantViolation, os.str());
  }
  if (!roles_.is_bijection()) throw Error(ErrorKind::InvalidOrientation, "axis roles are not a bijection");
}

double Volume3D::value(std::size_t i) const {
  return std::visit([i](const auto& v) { return static_cast<double>(v[i]); }, voxels_);
}

PairedCase pair_mask(Volume3D ct, MaskVolume mask) {
  static constexpr const char* kAxis[] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    if (ct.dims()[k] != mask.dims()[k]) {
      std::ostringstream os;
      os << "dims[" << kAxis[k] << "] differ: ct " << ct.dims()[k] << " vs mask " << mask.dims()[k];
      throw Error(ErrorKind::GeometryMismatch, os.str());
    }
  }
  for (int k = 0; k < 3; ++k) {
    if (std::abs(ct.spacing()[k] - mask.spacing()[k]) > kSpacingTolerance) {
      std::ostringstream os;
      os << "spacing[" << kAxis[k] << "] differ: ct " << ct.spacing()[k] << " mm vs mask " << mask.spacing()[k] << " mm";
      throw Error(ErrorKind::GeometryMismatch, os.str());
    }
  }
  return PairedCase{std::move(ct), std::move(mask)};
}

}  // namespace cxr
