#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace jointsel::detail {

// Runs body(i) for i in [0, n_tasks) on up to n_threads workers pulling
// from a shared counter. Each task writes into its own slot, so results are
// identical for any thread count. The first exception wins and is rethrown
// on the calling thread after all workers finish.
inline void parallel_for(int n_tasks, int n_threads,
                         const std::function<void(int)>& body) {
  if (n_tasks <= 0) return;
  if (n_threads <= 1 || n_tasks == 1) {
    for (int i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  if (n_threads > n_tasks) n_threads = n_tasks;

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n_tasks || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace jointsel::detail
