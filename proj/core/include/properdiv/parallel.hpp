#pragma once

#include <cstddef>
#include <functional>

namespace properdiv {

/// Worker count: hardware concurrency capped by the PROPERDIV_THREADS
/// environment variable (values < 1 mean 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to max_threads workers (0 = use
/// worker_count()). Each index is executed exactly once; callers must make
/// body(i) independent of execution order so results do not depend on the
/// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t max_threads = 0);

}  // namespace properdiv
