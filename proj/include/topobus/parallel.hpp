#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace topobus {

/// Worker count for grid scans: TOPOBUS_WORKERS when set, otherwise the
/// hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("TOPOBUS_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(i) for i in [0, n). The body must write results into per-index
/// slots; execution order is unspecified, so merged output stays in input
/// order. The first exception thrown by any worker is rethrown.
template <typename Body>
void parallel_for(std::size_t n, const Body& body, int workers = worker_count()) {
  if (n == 0) return;
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto run = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        body(i);
      }
    } catch (...) {
      std::scoped_lock lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n);  // stop handing out work
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(nw - 1);
  for (std::size_t w = 1; w < nw; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace topobus
