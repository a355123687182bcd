#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace sparks {

namespace detail {
inline std::atomic<int>& max_threads_setting() {
  static std::atomic<int> v{1};
  return v;
}
}  // namespace detail

// Process-wide worker cap for engine parallel loops. 1 = sequential.
inline void set_max_threads(int n) { detail::max_threads_setting().store(n < 1 ? 1 : n); }
inline int max_threads() { return detail::max_threads_setting().load(); }

// Static contiguous partition of [0, count) over the configured thread
// count. Work items must be independent; partitioning never affects results.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), count);
  if (workers <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sparks
