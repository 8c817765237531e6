#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace comi {

// Counts trials for which pred(trial_index) is true, splitting index ranges
// across threads. Each trial keys its own randomness to the absolute index,
// and the reduction is over integer counts, so the result is identical for
// any thread count.
template <typename Pred>
std::uint64_t count_trials(std::uint64_t trials, Pred&& pred, unsigned threads = 0) {
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
  }
  if (trials < 2 * threads) threads = 1;
  if (threads == 1) {
    std::uint64_t count = 0;
    for (std::uint64_t t = 0; t < trials; ++t)
      if (pred(t)) ++count;
    return count;
  }
  std::vector<std::uint64_t> counts(threads, 0);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::uint64_t chunk = (trials + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = begin + chunk < trials ? begin + chunk : trials;
    pool.emplace_back([&, w, begin, end] {
      std::uint64_t local = 0;
      for (std::uint64_t t = begin; t < end; ++t)
        if (pred(t)) ++local;
      counts[w] = local;
    });
  }
  for (auto& th : pool) th.join();
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  return total;
}

}  // namespace comi
