#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Inner loops of the projection and metric code. Every kernel has a scalar
// reference implementation; wider variants must produce bit-identical output.
namespace cxr::kernels {

enum class Backend { Scalar, Avx2 };

struct OverlapCounts {
  std::uint64_t intersection = 0;
  std::uint64_t union_ = 0;
};

struct KernelTable {
  Backend backend;

  // acc[i] += clamp(src[i], lo, hi)
  void (*accumulate_i16)(const std::int16_t* src, std::int64_t* acc, std::size_t n, std::int32_t lo, std::int32_t hi);
  void (*accumulate_i32)(const std::int32_t* src, std::int64_t* acc, std::size_t n, std::int32_t lo, std::int32_t hi);
  void (*accumulate_f32)(const float* src, double* acc, std::size_t n, float lo, float hi);

  // counts[i] += (src[i] != 0)
  void (*count_nonzero_i16)(const std::int16_t* src, std::int32_t* counts, std::size_t n);
  void (*count_nonzero_i32)(const std::int32_t* src, std::int32_t* counts, std::size_t n);
  void (*count_nonzero_f32)(const float* src, std::int32_t* counts, std::size_t n);

  // |a & b| and |a | b| over 0/1 bytes
  OverlapCounts (*mask_overlap)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Null when the build or the host lacks AVX2.
const KernelTable* avx2_kernels();

/// Best table for this host, or the forced one.
const KernelTable& active();

/// Pins the dispatcher; used by equivalence tests and benchmarks.
void force_backend(Backend b);
void reset_backend();

std::string_view backend_name(Backend b);

}  // namespace cxr::kernels
