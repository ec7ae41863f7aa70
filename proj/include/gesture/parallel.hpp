#pragma once

#include <cstddef>
#include <functional>

namespace gesture {

/// Worker count from GESTURE_PIPE_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index
/// must write only its own output slot. If several calls throw, the
/// exception of the lowest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gesture
