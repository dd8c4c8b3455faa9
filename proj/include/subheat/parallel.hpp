#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace subheat {

/// Paths per reduction block. Fixed so that block boundaries, and therefore
/// every floating-point sum, are independent of the worker count.
inline constexpr std::uint64_t kBlockPaths = 4096;

unsigned default_workers() noexcept;

/// Splits [0, n) into fixed blocks, evaluates block_fn(begin, end) -> Acc on up
/// to `workers` threads, and merges block results with a pairwise tree in block
/// order. Acc must provide `void merge(const Acc&)`. The result is bit-identical
/// for any worker count. The first exception thrown by a block is rethrown.
template <class Acc, class BlockFn>
Acc reduce_blocks(std::uint64_t n, unsigned workers, BlockFn&& block_fn) {
  const std::uint64_t n_blocks = (n + kBlockPaths - 1) / kBlockPaths;
  if (n_blocks == 0) return Acc{};
  std::vector<Acc> partial(n_blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    while (true) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      try {
        const std::uint64_t begin = b * kBlockPaths;
        partial[b] = block_fn(begin, std::min(n, begin + kBlockPaths));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_blocks);
      }
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), n_blocks));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::uint64_t stride = 1; stride < n_blocks; stride *= 2) {
    for (std::uint64_t i = 0; i + stride < n_blocks; i += 2 * stride) {
      partial[i].merge(partial[i + stride]);
    }
  }
  return partial[0];
}

}  // namespace subheat
