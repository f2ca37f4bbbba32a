#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hslab {

// Worker cap: HSLAB_THREADS if set (>= 1), else hardware concurrency.
inline std::size_t thread_cap() {
  if (const char* env = std::getenv("HSLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return std::size_t(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : std::size_t(hc);
}

// Runs f(i) for i in [0, n). Each index must write only its own slots, so the
// result is identical to the serial loop regardless of the worker count.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers = std::min(thread_cap(), std::max<std::size_t>(n, 1));
  if (n == 0) return;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hslab
