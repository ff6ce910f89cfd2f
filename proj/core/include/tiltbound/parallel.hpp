#pragma once

#include <cstddef>
#include <functional>

namespace tiltbound {

// Number of worker threads: TILTBOUND_THREADS if set (clamped to >= 1),
// otherwise the machine's hardware concurrency.
unsigned thread_budget();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; results must
// not depend on execution order (callers write to disjoint slots). Exceptions
// from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tiltbound
