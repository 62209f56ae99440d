#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace censadd {

//! Number of worker threads to use when the caller passes 0.
inline std::size_t
default_thread_count()
{
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

//! Calls fn(i) for i in [0, count) on up to `threads` workers. Work items are
//! claimed dynamically, so fn must only write to per-item slots. The first
//! exception thrown by any item is rethrown after all workers finish.
template<typename Fn>
void
parallel_for(std::size_t count, std::size_t threads, Fn&& fn)
{
  if (threads == 0) {
    threads = default_thread_count();
  }
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) {
          return;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
          next.store(count);
        }
      }
    });
  }
  for (auto& w : workers) {
    w.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

} // namespace censadd
