#pragma once

#include <cstddef>
#include <functional>

namespace robscatter {

// Worker count: hardware concurrency, capped by ROBUST_SCATTER_THREADS when set.
unsigned worker_count();

// Calls body(i) for every i in [0, count). Iterations are distributed over
// worker_count() threads; body must only write to per-index state.
// The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace robscatter
