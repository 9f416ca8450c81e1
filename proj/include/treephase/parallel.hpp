#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace treephase {

/// Worker cap for Monte Carlo fan-out. Results never depend on it.
struct Execution {
  unsigned threads = 1;
};

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream). Streams are keyed by trial or
/// block index, so the partition of work across threads cannot change the
/// numbers drawn.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x7265u};
  return Rng(seq);
}

/// Calls fn(i) for i in [0, count) on up to `exec.threads` workers. fn must
/// only write to slot i of caller-owned storage. The first exception thrown by
/// any worker is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t count, const Execution& exec, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max<unsigned>(1, exec.threads));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace treephase
