#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nlrt {

/// Degree of parallelism for replication loops. Results never depend on it:
/// every replication writes its own slot and reductions run in index order.
struct Parallelism {
  unsigned workers = 1;
};

/// Calls f(i) for i in [0, n), split into contiguous chunks across workers.
/// The first exception (lowest chunk) is rethrown after all workers join.
template <class F>
void parallel_for(std::size_t n, const Parallelism& par, F&& f) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, par.workers), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, begin, end, w] {
        try {
          for (std::size_t i = begin; i < end; ++i) f(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace nlrt
