#pragma once

#include <cstddef>
#include <functional>

namespace rss {

// Worker count: hardware concurrency, capped by RSS_THREADS when set.
std::size_t WorkerCount();

// Runs fn(0..n-1) across workers. The first exception thrown by any task is
// rethrown after all workers stop.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)> &fn);

}  // namespace rss
