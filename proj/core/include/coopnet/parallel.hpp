#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace coopnet {

/// Runs fn(0), ..., fn(job_count-1) across `threads` workers. Jobs must be
/// independent and write only to their own output slots, so the schedule
/// never affects results. The first exception (if any) is rethrown after all
/// workers stop.
inline void parallel_for(long job_count, int threads,
                         const std::function<void(long)>& fn) {
  if (job_count <= 0) return;
  if (threads < 1) threads = 1;
  if (threads == 1) {
    for (long j = 0; j < job_count; ++j) fn(j);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const long j = next.fetch_add(1, std::memory_order_relaxed);
      if (j >= job_count || failed.load(std::memory_order_relaxed)) return;
      try {
        fn(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace coopnet
