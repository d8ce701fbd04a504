#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace smolyak {

/// Runs body(k) for k in [0, n) on up to `threads` threads.
///
/// Work is split into contiguous blocks. If any call throws, the exception
/// from the smallest failing k is rethrown after all threads finish, so the
/// reported failure does not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_at(threads, n);
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        const std::size_t begin = n * t / threads;
        const std::size_t end = n * (t + 1) / threads;
        for (std::size_t k = begin; k < end; ++k) {
          try {
            body(k);
          } catch (...) {
            errors[t] = std::current_exception();
            error_at[t] = k;
            return;
          }
        }
      });
    }
  }
  const auto first = std::min_element(error_at.begin(), error_at.end());
  if (*first < n) std::rethrow_exception(errors[static_cast<std::size_t>(first - error_at.begin())]);
}

}  // namespace smolyak
