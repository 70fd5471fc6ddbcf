#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace saplingcf {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(worker_id, begin, end) over [0, n) in chunks of `grain`.
// Chunk assignment to workers is dynamic; outputs must be written to
// per-index slots so the result is independent of the schedule.
inline void parallel_chunks(std::int64_t n, int workers, std::int64_t grain,
                            const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
  workers = resolve_workers(workers);
  if (grain < 1) grain = 1;
  if (n <= 0) return;
  if (workers == 1 || n <= grain) {
    fn(0, 0, n);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&](int id) {
    for (;;) {
      std::int64_t begin = next.fetch_add(grain, std::memory_order_relaxed);
      if (begin >= n || failed.load(std::memory_order_relaxed)) return;
      std::int64_t end = std::min(n, begin + grain);
      try {
        fn(id, begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int id = 1; id < workers; ++id) pool.emplace_back(body, id);
  body(0);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace saplingcf
