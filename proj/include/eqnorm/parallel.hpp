#pragma once

#include <cstddef>
#include <functional>

namespace eqnorm {

// Number of worker threads: EQNORM_THREADS if set (>= 1), else the hardware
// concurrency.
std::size_t thread_budget();

// Calls body(i) for i in [0, n). Work is split into contiguous chunks; each
// index must only write its own output slot, which keeps results independent
// of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace eqnorm
