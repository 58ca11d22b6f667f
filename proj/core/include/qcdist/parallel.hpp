#pragma once

#include <cstddef>
#include <functional>

namespace qcdist {

/// Worker count: QCDIST_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() threads. Each index is
/// processed exactly once; results must be written to per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qcdist
