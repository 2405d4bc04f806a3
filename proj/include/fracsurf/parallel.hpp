#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fracsurf {

/// Worker count from FRACSURF_THREADS, else the hardware concurrency.
inline int worker_threads() {
  if (const char* env = std::getenv("FRACSURF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(worker, begin, end) over contiguous chunks of [0, n). The first
/// exception thrown by any worker is rethrown on the caller.
template <class Fn>
void parallel_chunks(std::size_t n, Fn&& fn, int threads = worker_threads()) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    fn(0, std::size_t{0}, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(static_cast<int>(w), begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fracsurf
