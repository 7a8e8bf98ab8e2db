#pragma once

#include <cstddef>
#include <functional>

namespace topocons {

/// Worker count used by the Monte Carlo loops. 0 means hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Calls fn(i) for i in [0, count), spread across thread_count() workers in
/// contiguous blocks. fn must only write to per-index state. Exceptions from
/// workers are rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace topocons
