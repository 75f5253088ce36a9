#pragma once

#include <cstddef>
#include <functional>

namespace hilbex {

// Worker count for data-parallel loops: hardware concurrency, capped by the
// HILBEX_THREADS environment variable when set. Always >= 1.
std::size_t thread_budget();

// Runs fn(i) for i in [begin, end), statically partitioned into contiguous
// blocks across the thread budget. fn must be safe to call concurrently on
// distinct indices; exceptions from workers are rethrown on the caller.
// Results must be written to per-index slots so the outcome is independent
// of the thread count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

} // namespace hilbex
