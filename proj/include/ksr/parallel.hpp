#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ksr {

/// Runs body(i) for i in [0, n) on up to `threads` workers using a static
/// stride partition. threads == 0 means hardware concurrency. Callers write
/// into per-index slots so results do not depend on scheduling. The first
/// exception thrown by any worker is rethrown after all workers join.
template <class Body> void parallel_for(std::size_t n, unsigned threads, Body &&body) {
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex m;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n; i += threads)
            body(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure)
            failure = std::current_exception();
        }
      });
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace ksr
