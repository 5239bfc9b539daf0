#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace lcba {

// Splits [0, count) into contiguous chunks, one per worker, and rethrows the
// first failure.  `body(begin, end, worker)`.
inline void parallel_chunks(std::size_t count, unsigned workers,
                            const std::function<void(std::size_t, std::size_t, unsigned)>& body) {
  if (workers <= 1 || count < 2) {
    body(0, count, 0);
    return;
  }
  if (workers > count) workers = static_cast<unsigned>(count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Flag value, else LCBA_WORKERS, else the logical core count.
unsigned resolve_workers(unsigned requested);

}  // namespace lcba
