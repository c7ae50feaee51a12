#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace evint {

/// Worker count for a request of `threads` (0 means all hardware threads),
/// never more than the number of tasks.
inline unsigned
resolve_threads(unsigned threads, std::size_t tasks) noexcept
{
  unsigned t = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  if (tasks < t) {
    t = static_cast<unsigned>(std::max<std::size_t>(tasks, 1));
  }
  return t;
}

/// Calls fn(i) for every i in [0, count) on up to `threads` workers. Tasks
/// are claimed dynamically, so `fn` must only write to per-index state. If
/// several tasks throw, the exception from the lowest index is rethrown.
template <class Fn>
void
parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
  const unsigned workers = resolve_threads(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count || failed.load(std::memory_order_relaxed)) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
      pool.emplace_back(work);
    }
    work();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

} // namespace evint
