#pragma once

#include <cstddef>
#include <functional>

namespace sldl {

// Worker count: SLDL_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Calls fn(i) for i in [0, count) on up to worker_count() threads. Results
// must be written to per-index slots; the first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace sldl
