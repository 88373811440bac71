#pragma once

#include <cstddef>
#include <functional>

namespace cxr {

/// Worker count: CXR_THREADS if set to a positive integer, else hardware concurrency.
std::size_t thread_count();

/// Runs body(begin, end) over disjoint chunks of [0, n). Falls back to a
/// single call when n is small or only one thread is configured.
void parallel_for(std::size_t n, std::size_t min_chunk, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace cxr
