#pragma once

#include <cstddef>
#include <functional>

namespace chaosdesign {

/// Runs task(i) for i in [0, n_tasks) on up to `threads` workers. Tasks are
/// claimed dynamically; callers write results into per-task slots so the
/// output never depends on scheduling. The first exception thrown by a
/// task is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n_tasks, unsigned threads,
                  const std::function<void(std::size_t)>& task);

/// Worker count used when a caller passes 0: CHAOSDESIGN_THREADS if set,
/// otherwise std::thread::hardware_concurrency().
unsigned default_thread_count();

}  // namespace chaosdesign
