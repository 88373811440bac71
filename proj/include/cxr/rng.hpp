#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cxr {

/// SplitMix64 (Steele, Lea & Flood 2014). Chosen because its output is fully
/// specified by a few lines of integer arithmetic, so any language can
/// reproduce a dataset draw bit for bit.
///
/// Streams are split per purpose: derive_seed(seed, tag) hashes the tag with
/// 64-bit FNV-1a and feeds (seed ^ hash) through the SplitMix64 finalizer.
/// Multi-part keys chain: derive_seed(derive_seed(seed, id), tag).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64_mix(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

/// Fisher-Yates, drawing j = below(i + 1) for i from n-1 down to 1.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace cxr
