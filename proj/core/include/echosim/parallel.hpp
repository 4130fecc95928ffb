#pragma once
// Deterministic work splitting.  Each index writes only its own preallocated
// slot and reductions run as ordered folds afterwards, so the worker count
// (ECHO_SIM_THREADS, default hardware concurrency) never changes any output
// bit.

#include <cstddef>
#include <functional>

namespace echosim {

// Number of workers to use for n items (>= 1).
std::size_t worker_count(std::size_t n);

// Runs fn(i) for i in [0, n) across workers with a static block partition.
// fn must only touch state owned by index i.  Exceptions are captured and
// the first one (lowest worker id) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace echosim
