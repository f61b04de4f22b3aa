#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mmt {

/// Worker threads used by the Monte Carlo loops. MMT_THREADS overrides the
/// hardware default; the value never changes results, only wall time.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("MMT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Splits [0, n) into fixed-size blocks, evaluates `block_fn(begin, end)` for
/// each (possibly concurrently) and merges the per-block accumulators along a
/// fixed binary tree. Block boundaries and merge order depend only on n and
/// block_size, so the result is bit-identical at any thread count.
template <class Acc, class BlockFn>
Acc blocked_reduce(std::size_t n, std::size_t block_size, BlockFn&& block_fn,
                   std::size_t threads = worker_count()) {
  if (n == 0) return Acc{};
  block_size = std::max<std::size_t>(1, block_size);
  const std::size_t blocks = (n + block_size - 1) / block_size;
  std::vector<Acc> partial(blocks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        const std::size_t begin = b * block_size;
        partial[b] = block_fn(begin, std::min(n, begin + block_size));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  threads = std::min(threads, blocks);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t stride = 1; stride < blocks; stride *= 2) {
    for (std::size_t i = 0; i + stride < blocks; i += 2 * stride) partial[i].merge(partial[i + stride]);
  }
  return std::move(partial[0]);
}

}  // namespace mmt
