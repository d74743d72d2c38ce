#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace ncdg {

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// body(begin, end) on each. The first exception thrown by any worker is
/// rethrown on the caller's thread.
template <class F>
void parallel_for(int n, int threads, F&& body) {
  if (threads <= 1 || n < 2) {
    body(0, n);
    return;
  }
  const int t = std::min(threads, n);
  std::vector<std::exception_ptr> errors(t);
  {
    std::vector<std::jthread> pool;
    pool.reserve(t);
    for (int k = 0; k < t; ++k) {
      const int begin = static_cast<int>(static_cast<long long>(n) * k / t);
      const int end = static_cast<int>(static_cast<long long>(n) * (k + 1) / t);
      pool.emplace_back([&body, &errors, k, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace ncdg
