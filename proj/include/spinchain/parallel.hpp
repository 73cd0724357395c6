#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace spinchain {

// Thread count used when a caller passes 0: SPINCHAIN_THREADS if set,
// otherwise the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("SPINCHAIN_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Static block partition of [0, n).  Cells must be independent; each index is
// visited exactly once, so writes to per-index slots stay deterministic.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = default_thread_count();
  if (threads > n) threads = static_cast<unsigned>(n ? n : 1);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace spinchain
