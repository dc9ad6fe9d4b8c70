#pragma once

// Deterministic index-parallel fan-out for restart and sweep loops: results
// land in index order, so output never depends on thread scheduling.

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace uflow {

inline void parallel_for_index(std::size_t count, int jobs,
                               const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const int workers =
      static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(jobs)));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  for (auto& t : pool) t.join();
}

} // namespace uflow
