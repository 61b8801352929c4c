#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace nhtopo {

/// NHTOPO_THREADS if set to a positive integer, otherwise the hardware concurrency.
int default_thread_count();

/// Evaluates f(0..count-1) on up to `threads` workers; results keep input order.
/// The first exception thrown by any task is rethrown after all workers stop.
template <typename Result, typename F>
std::vector<Result> parallel_map(std::size_t count, int threads, F&& f) {
  std::vector<Result> results(count);
  const std::size_t workers = std::clamp<std::size_t>(threads > 0 ? threads : 1, 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        results[i] = f(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace nhtopo
