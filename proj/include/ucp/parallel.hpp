#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ucp {

// Runs body(k) for k in [0, n) on up to `threads` workers (0 = hardware).
// Each k must write only to its own output slot; the first exception is rethrown.
inline void parallel_for(int n, const std::function<void(int)>& body, unsigned threads = 0) {
  if (n <= 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
  if (threads <= 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int k = static_cast<int>(t); k < n; k += static_cast<int>(threads)) body(k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ucp
