#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace swarmevo {

inline int effective_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(0..count-1) on up to n_threads workers. Work items must be
/// independent; results keyed by index stay schedule-independent.
inline void parallel_for(int count, int n_threads, const std::function<void(int)>& fn) {
  n_threads = std::min(effective_threads(n_threads), count);
  if (n_threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w) {
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& worker : workers) worker.join();
}

}  // namespace swarmevo
