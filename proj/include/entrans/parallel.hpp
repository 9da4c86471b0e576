#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace entrans {

// Process-wide worker cap. Defaults to 1; results never depend on it except
// where a module documents otherwise.
void setThreadCount(int n);
int threadCount();

// Runs body(begin, end) over contiguous chunks of [0, count). Chunk boundaries
// depend only on `count` and the thread cap, and each chunk writes disjoint
// outputs. The first exception thrown by any chunk is rethrown.
template <class Body>
void parallelFor(std::size_t count, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threadCount()), count);
  if (workers <= 1) {
    if (count) body(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace entrans
