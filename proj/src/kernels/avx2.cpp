// Compiled with -mavx2 -mpopcnt; only reached after a runtime CPU check.
#include <immintrin.h>

#include <bit>

#include "cxr/kernels.hpp"

namespace cxr::kernels {
namespace {

inline void add_i32x8_to_i64(__m256i v, std::int64_t* acc) {
  const __m256i lo = _mm256_cvtepi32_epi64(_mm256_castsi256_si128(v));
  const __m256i hi = _mm256_cvtepi32_epi64(_mm256_extracti128_si256(v, 1));
  auto* p = reinterpret_cast<__m256i*>(acc);
  _mm256_storeu_si256(p, _mm256_add_epi64(_mm256_loadu_si256(p), lo));
  _mm256_storeu_si256(p + 1, _mm256_add_epi64(_mm256_loadu_si256(p + 1), hi));
}

void accumulate_i16(const std::int16_t* src, std::int64_t* acc, std::size_t n, std::int32_t lo, std::int32_t hi) {
  const __m256i vlo = _mm256_set1_epi32(lo);
  const __m256i vhi = _mm256_set1_epi32(hi);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i v = _mm256_cvtepi16_epi32(_mm_loadu_si128(reinterpret_cast<const __m128i*>(src + i)));
    v = _mm256_min_epi32(_mm256_max_epi32(v, vlo), vhi);
    add_i32x8_to_i64(v, acc + i);
  }
  for (; i < n; ++i) {
    const std::int32_t v = src[i];
    acc[i] += v < lo ? lo : (v > hi ? hi : v);
  }
}

void accumulate_i32(const std::int32_t* src, std::int64_t* acc, std::size_t n, std::int32_t lo, std::int32_t hi) {
  const __m256i vlo = _mm256_set1_epi32(lo);
  const __m256i vhi = _mm256_set1_epi32(hi);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    v = _mm256_min_epi32(_mm256_max_epi32(v, vlo), vhi);
    add_i32x8_to_i64(v, acc + i);
  }
  for (; i < n; ++i) {
    const std::int32_t v = src[i];
    acc[i] += v < lo ? lo : (v > hi ? hi : v);
  }
}

void accumulate_f32(const float* src, double* acc, std::size_t n, float lo, float hi) {
  const __m256 vlo = _mm256_set1_ps(lo);
  const __m256 vhi = _mm256_set1_ps(hi);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(src + i);
    v = _mm256_min_ps(_mm256_max_ps(v, vlo), vhi);
    const __m256d a = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
    const __m256d b = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), a));
    _mm256_storeu_pd(acc + i + 4, _mm256_add_pd(_mm256_loadu_pd(acc + i + 4), b));
  }
  for (; i < n; ++i) {
    float c = lo < src[i] ? src[i] : lo;
    c = c < hi ? c : hi;
    acc[i] += static_cast<double>(c);
  }
}

void count_nonzero_i16(const std::int16_t* src, std::int32_t* counts, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi32(1);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_cvtepi16_epi32(_mm_loadu_si128(reinterpret_cast<const __m128i*>(src + i)));
    const __m256i nz = _mm256_andnot_si256(_mm256_cmpeq_epi32(v, zero), one);
    auto* p = reinterpret_cast<__m256i*>(counts + i);
    _mm256_storeu_si256(p, _mm256_add_epi32(_mm256_loadu_si256(p), nz));
  }
  for (; i < n; ++i) counts[i] += src[i] != 0;
}

void count_nonzero_i32(const std::int32_t* src, std::int32_t* counts, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi32(1);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i nz = _mm256_andnot_si256(_mm256_cmpeq_epi32(v, zero), one);
    auto* p = reinterpret_cast<__m256i*>(counts + i);
    _mm256_storeu_si256(p, _mm256_add_epi32(_mm256_loadu_si256(p), nz));
  }
  for (; i < n; ++i) counts[i] += src[i] != 0;
}

// NaN counts as nonzero, same as the scalar `x != 0.0f`.
void count_nonzero_f32(const float* src, std::int32_t* counts, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  const __m256i one = _mm256_set1_epi32(1);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 ne = _mm256_cmp_ps(_mm256_loadu_ps(src + i), zero, _CMP_NEQ_UQ);
    const __m256i nz = _mm256_and_si256(_mm256_castps_si256(ne), one);
    auto* p = reinterpret_cast<__m256i*>(counts + i);
    _mm256_storeu_si256(p, _mm256_add_epi32(_mm256_loadu_si256(p), nz));
  }
  for (; i < n; ++i) counts[i] += src[i] != 0.0f;
}

OverlapCounts mask_overlap(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  OverlapCounts c;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const auto and_zero = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(_mm256_and_si256(va, vb), zero)));
    const auto or_zero = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(_mm256_or_si256(va, vb), zero)));
    c.intersection += 32 - std::popcount(and_zero);
    c.union_ += 32 - std::popcount(or_zero);
  }
  for (; i < n; ++i) {
    c.intersection += (a[i] & b[i]) != 0;
    c.union_ += (a[i] | b[i]) != 0;
  }
  return c;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      Backend::Avx2,   accumulate_i16,    accumulate_i32,    accumulate_f32,
      count_nonzero_i16, count_nonzero_i32, count_nonzero_f32, mask_overlap,
  };
  return table;
}

}  // namespace cxr::kernels
