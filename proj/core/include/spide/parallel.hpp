#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace spide {

// Worker count from SPIDE_THREADS, else the hardware concurrency.
inline int default_threads() {
  if (const char* env = std::getenv("SPIDE_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Number of workers parallel_for uses for `count` items.
inline std::size_t worker_count(std::size_t count, int threads) {
  return std::max<std::size_t>(1, std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads))));
}

// Runs fn(worker, i) for i in [0, count) on worker_count(count, threads)
// workers with static striping, so callers can keep per-worker scratch state.
// Callers write results into slot i, so reductions stay in index order.
// The first exception thrown by any worker is rethrown after joining.
template <class Fn>
void parallel_for_workers(std::size_t count, int threads, Fn&& fn) {
  std::size_t workers = worker_count(count, threads);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(std::size_t{0}, i);
    return;
  }
  std::exception_ptr error;
  std::mutex guard;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(w, i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  parallel_for_workers(count, threads, [&](std::size_t, std::size_t i) { fn(i); });
}

}  // namespace spide
