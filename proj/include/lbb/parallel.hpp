#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lbb {

/// Runs fn(block_index, first, last) once for every fixed-size block of
/// [0, n_items), distributing blocks over `workers` threads. Block boundaries
/// depend only on block_size, never on the worker count, so callers that store
/// per-block results and reduce them in block order get bit-identical output
/// for any number of workers.
template <class Fn>
void for_blocks(long n_items, long block_size, int workers, Fn&& fn) {
  if (n_items <= 0) return;
  if (block_size < 1) block_size = 1;
  const long n_blocks = (n_items + block_size - 1) / block_size;
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto run = [&] {
    for (;;) {
      const long b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      const long first = b * block_size;
      const long last = std::min(n_items, first + block_size);
      try {
        fn(b, first, last);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

inline long block_count(long n_items, long block_size) {
  return n_items <= 0 ? 0 : (n_items + block_size - 1) / block_size;
}

}  // namespace lbb
