#include "cxr/assemble.hpp"

#include <algorithm>

#include "cxr/error.hpp"
#include "cxr/rng.hpp"

namespace cxr {
namespace {

void require_pool(const char* what, std::size_t required, std::size_t available) {
  if (available < required) {
    throw Error(ErrorKind::InsufficientPool, std::string(what) + ": required " + std::to_string(required) +
                                                 ", available " + std::to_string(available));
  }
}

}  // namespace

DatasetManifest assemble_dataset(std::vector<PoolItem> xray_pool, std::vector<PoolItem> projection_pool,
                                 const Protocol& protocol, std::uint64_t seed) {
  if (protocol.real_train > protocol.real_selection) {
    throw Error(ErrorKind::ConfigError, "real_train exceeds the real selection size");
  }
  require_pool("x-rays", protocol.real_selection, xray_pool.size());
  require_pool("projections", protocol.projected_train, projection_pool.size());

  auto by_path = [](const PoolItem& a, const PoolItem& b) { return a.path < b.path; };
  std::sort(xray_pool.begin(), xray_pool.end(), by_path);
  std::sort(projection_pool.begin(), projection_pool.end(), by_path);

  SplitMix64 selection_rng(derive_seed(seed, "assemble/real-selection"));
  shuffle(xray_pool, selection_rng);
  std::vector<PoolItem> selected(xray_pool.begin(), xray_pool.begin() + static_cast<long>(protocol.real_selection));
  std::vector<PoolItem> test(xray_pool.begin() + static_cast<long>(protocol.real_selection), xray_pool.end());

  std::vector<PoolItem> real_train = selected;
  if (protocol.real_train < protocol.real_selection) {
    SplitMix64 subset_rng(derive_seed(seed, "assemble/real-subset"));
    shuffle(real_train, subset_rng);
    real_train.resize(protocol.real_train);
  }

  std::vector<PoolItem> projected;
  if (protocol.projected_train > 0) {
    SplitMix64 proj_rng(derive_seed(seed, "assemble/projected"));
    shuffle(projection_pool, proj_rng);
    projected.assign(projection_pool.begin(), projection_pool.begin() + static_cast<long>(protocol.projected_train));
  }

  DatasetManifest m;
  m.seed = seed;
  auto add = [&m](const std::vector<PoolItem>& items, Provenance p, Split s) {
    for (const auto& it : items) {
      m.entries.push_back({static_cast<std::int64_t>(m.entries.size() + 1), it.path, it.width, it.height, p, s});
    }
  };
  add(real_train, Provenance::RealXray, Split::Train);
  add(projected, Provenance::CtProjection, Split::Train);
  add(test, Provenance::RealXray, Split::Test);
  return m;
}

}  // namespace cxr
