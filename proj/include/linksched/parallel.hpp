#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace linksched {

/// Runs f(0..n-1) across up to `threads` workers. Results must be written to
/// pre-sized slots so output order never depends on scheduling. The first
/// exception thrown by any worker is rethrown on the caller.
template <typename F>
void parallel_for(int n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    int i;
    while ((i = next.fetch_add(1)) < n && !failed.load()) {
      try {
        f(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_workers = std::min(threads, n);
  pool.reserve(static_cast<size_t>(n_workers) - 1);
  for (int t = 0; t < n_workers - 1; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace linksched
