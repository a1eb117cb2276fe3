#pragma once

// Minimal static-partition parallelism. Kernels write into disjoint,
// index-addressed slots, so output never depends on the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace solenoid {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> n{0};
  return n;
}
}  // namespace detail

/// 0 restores the default (hardware concurrency).
inline void set_thread_count(unsigned n) { detail::thread_setting() = n; }

inline unsigned thread_count() {
  const unsigned n = detail::thread_setting();
  if (n) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(begin, end) over blocks of at most `block` indices covering
/// [0, count). Exceptions from workers are rethrown on the caller.
template <typename Fn>
void parallel_blocks(std::size_t count, std::size_t block, Fn&& fn) {
  if (count == 0) return;
  block = std::max<std::size_t>(block, 1);
  const std::size_t blocks = (count + block - 1) / block;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b * block, std::min(count, (b + 1) * block));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        fn(b * block, std::min(count, (b + 1) * block));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = blocks;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace solenoid
