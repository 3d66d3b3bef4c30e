#pragma once

#include <cstddef>
#include <functional>

namespace retina {

// Worker count: RETINA_VASC_THREADS if set (clamped to [1, 64]), else the
// hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n) across worker_count() threads with static block
// assignment. Callers must write results into per-index slots; any reduction
// happens after the join, in index order, so output is identical for every
// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace retina
