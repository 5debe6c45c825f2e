#pragma once

#include <cstddef>
#include <functional>

namespace kgl {

/// Upper bound on worker threads used by the batched routines.
/// Defaults to std::thread::hardware_concurrency().
void set_worker_count(int n);
int worker_count();

/// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written per index do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace kgl
