#include <algorithm>

#include "cxr/kernels.hpp"

namespace cxr::kernels {
namespace {

template <typename T>
void accumulate_int(const T* src, std::int64_t* acc, std::size_t n, std::int32_t lo, std::int32_t hi) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t v = src[i];
    acc[i] += std::min(std::max(v, lo), hi);
  }
}

// std::max(lo, v) picks lo for NaN input, matching _mm256_max_ps(v, lo).
void accumulate_f32(const float* src, double* acc, std::size_t n, float lo, float hi) {
  for (std::size_t i = 0; i < n; ++i) {
    const float c = std::min(std::max(lo, src[i]), hi);
    acc[i] += static_cast<double>(c);
  }
}

template <typename T>
void count_nonzero(const T* src, std::int32_t* counts, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) counts[i] += src[i] != T{0};
}

OverlapCounts mask_overlap(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  OverlapCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    c.intersection += (a[i] & b[i]) != 0;
    c.union_ += (a[i] | b[i]) != 0;
  }
  return c;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Backend::Scalar,
      accumulate_int<std::int16_t>,
      accumulate_int<std::int32_t>,
      accumulate_f32,
      count_nonzero<std::int16_t>,
      count_nonzero<std::int32_t>,
      count_nonzero<float>,
      mask_overlap,
  };
  return table;
}

}  // namespace cxr::kernels
