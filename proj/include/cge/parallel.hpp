#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cge {

/// Resolve a worker count: explicit value wins, 0 means hardware concurrency.
inline std::size_t resolve_jobs(std::size_t jobs) {
  if (jobs > 0) return jobs;
  auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Calls fn(i) for every i in [0, count) on up to `jobs` threads. Work items are
/// handed out dynamically, so callers must write results into per-index slots.
/// The exception from the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::min(resolve_jobs(jobs), count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::jthread> threads;
  threads.reserve(jobs - 1);
  for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  threads.clear();
  if (error) std::rethrow_exception(error);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a sub-task, a pure function of the master seed and task coordinates.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

/// Unbiased integer in [0, bound) from a 64-bit engine. Independent of the
/// standard library's distribution implementations, so streams are portable.
template <class Engine>
std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    std::uint64_t r = rng();
    if (r < limit) return r % bound;
  }
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
double uniform_unit(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cge
