#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cxr/image.hpp"

namespace testsupport {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "cxr-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

cxr::BinaryMask random_mask(std::size_t w, std::size_t h, double density, std::mt19937_64& rng);

/// Union of random axis-aligned ellipses; one connected blob per call is not guaranteed.
cxr::BinaryMask random_blob(std::size_t w, std::size_t h, std::mt19937_64& rng);

cxr::BinaryMask filled_rect(std::size_t w, std::size_t h, std::size_t x0, std::size_t y0, std::size_t rw, std::size_t rh);

std::string read_file(const std::filesystem::path& p);

struct PhantomSpec {
  int size = 64;
  std::array<float, 3> spacing{1, 1, 1};
  // Lesion spheres as (x, y, z, radius) in voxels; y is the anterior-posterior axis.
  std::vector<std::array<double, 4>> lesions{{20, 30, 24, 6}, {44, 34, 40, 5}};
};

/// int16 CT (air, soft tissue, ellipsoidal lung field, lesions) and uint8 mask.
void write_phantom(const std::filesystem::path& ct, const std::filesystem::path& mask, const PhantomSpec& spec = {});

}  // namespace testsupport
