#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rpx {

namespace detail {
inline std::atomic<unsigned>& worker_thread_setting() {
  static std::atomic<unsigned> n{0};  // 0 = hardware concurrency
  return n;
}
inline thread_local bool inside_parallel_region = false;
}  // namespace detail

/// Caps worker parallelism process-wide. 0 restores the default
/// (hardware concurrency). 1 forces fully sequential execution.
inline void set_worker_threads(unsigned n) { detail::worker_thread_setting() = n; }

inline unsigned worker_threads() {
  unsigned n = detail::worker_thread_setting();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/// Runs fn(begin, end) over a static chunking of [0, n). Chunk boundaries
/// depend only on n and the thread cap, never on scheduling, so callers
/// that write into per-index slots get deterministic results. Nested calls
/// run inline on the calling thread.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned workers = worker_threads();
  if (workers <= 1 || n == 1 || detail::inside_parallel_region) {
    fn(0, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n);
  const std::size_t base = n / chunks;
  const std::size_t rem = n % chunks;

  std::vector<std::thread> threads;
  threads.reserve(chunks - 1);
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  auto run_chunk = [&](std::size_t c) {
    detail::inside_parallel_region = true;
    const std::size_t begin = c * base + std::min(c, rem);
    const std::size_t end = begin + base + (c < rem ? 1 : 0);
    try {
      fn(begin, end);
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
    detail::inside_parallel_region = false;
  };

  for (std::size_t c = 1; c < chunks; ++c) threads.emplace_back(run_chunk, c);
  run_chunk(0);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rpx
