#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cxr/coco.hpp"

namespace cxr {

struct PoolItem {
  std::string path;
  std::size_t width = 0;
  std::size_t height = 0;
};

/// Training-set recipe. Dataset 1 is 60 real X-rays; Dataset 2 keeps 10 of
/// those 60 and adds 50 CT projections. In every protocol the test split is
/// the real X-rays not drawn into the 60 (or `real_train`) selection.
struct Protocol {
  enum class Kind { Dataset1, Dataset2, Custom };
  Kind kind = Kind::Dataset1;
  std::size_t real_selection = 60;  // X-rays drawn from the pool; the rest form the test split
  std::size_t real_train = 60;      // subset of the selection used for training
  std::size_t projected_train = 0;

  static Protocol dataset1() { return {Kind::Dataset1, 60, 60, 0}; }
  static Protocol dataset2() { return {Kind::Dataset2, 60, 10, 50}; }
  static Protocol custom(std::size_t real_train, std::size_t projected_train) {
    return {Kind::Custom, real_train, real_train, projected_train};
  }
};

/// Pools are sorted by path before drawing, so the result depends only on
/// pool contents and seed. Streams: "assemble/real-selection",
/// "assemble/real-subset", "assemble/projected". Throws InsufficientPool.
DatasetManifest assemble_dataset(std::vector<PoolItem> xray_pool, std::vector<PoolItem> projection_pool,
                                 const Protocol& protocol, std::uint64_t seed);

}  // namespace cxr
