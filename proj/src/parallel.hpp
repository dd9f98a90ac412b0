#ifndef FLOWSMOOTH_SRC_PARALLEL_HPP
#define FLOWSMOOTH_SRC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace flowsmooth::detail {

/// Calls fn(i) for every i in [first, last) on up to `threads` workers
/// (0 = hardware count). The first exception thrown is rethrown after join.
template <typename Fn>
void for_each_index(std::size_t first, std::size_t last, unsigned threads, Fn&& fn) {
  if (last <= first) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, last - first));
  if (threads <= 1) {
    for (std::size_t i = first; i < last; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{first};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < last; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace flowsmooth::detail

#endif  // FLOWSMOOTH_SRC_PARALLEL_HPP
