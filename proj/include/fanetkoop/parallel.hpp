#pragma once

#include <functional>

namespace fanetkoop {

/// Worker count for parallel sections: FANET_KOOPMAN_THREADS when set to a
/// positive integer, otherwise the hardware concurrency.
int worker_count();

/// Run fn(i) for i in [0, n) on a worker pool. Callers write results into
/// pre-sized per-index slots, so the output is deterministic regardless of
/// scheduling. Blocks until all tasks finish; rethrows the first exception.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace fanetkoop
