#include <atomic>

#include "cxr/kernels.hpp"

namespace cxr::kernels {

#if defined(CXR_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

namespace {

// -1: auto, otherwise a Backend value.
std::atomic<int> forced{-1};

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(CXR_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
  }();
  if (supported) return &avx2_table();
#endif
  return nullptr;
}

const KernelTable& active() {
  const int f = forced.load(std::memory_order_relaxed);
  if (f == static_cast<int>(Backend::Scalar)) return scalar_kernels();
  if (const auto* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

void force_backend(Backend b) { forced.store(static_cast<int>(b), std::memory_order_relaxed); }

void reset_backend() { forced.store(-1, std::memory_order_relaxed); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace cxr::kernels
