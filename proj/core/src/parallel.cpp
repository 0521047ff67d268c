#include "properdiv/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace properdiv {

std::size_t worker_count() {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("PROPERDIV_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    } catch (...) {
      // unparsable value: ignore, keep hardware default
    }
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t max_threads) {
  if (n == 0) return;
  std::size_t threads = max_threads == 0 ? worker_count() : max_threads;
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  // chunked self-scheduling; result determinism comes from body(i) being a
  // pure function of i
  const std::size_t chunk = std::max<std::size_t>(1, n / (threads * 8));
  auto run = [&]() {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n || failed.load()) return;
      const std::size_t end = std::min(n, begin + chunk);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 0; t + 1 < threads; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace properdiv
