#pragma once

#include <cstddef>
#include <functional>

namespace trion {

// requested > 0 wins; otherwise TRION_WORKERS from the environment; otherwise
// the number of hardware threads (at least 1).
int resolve_workers(int requested);

// Runs body(i) for i in [0, n) on up to `workers` threads. Results must be
// written by index so they do not depend on scheduling. If any call throws,
// the exception of the lowest failing index is rethrown after all workers
// have finished.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

}  // namespace trion
