#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mining {

// Static-chunk parallel loop. Each index is processed exactly once and
// writes only its own outputs, so results do not depend on thread count.
inline void parallel_for(std::size_t n, int num_threads,
                         const std::function<void(std::size_t)>& body) {
  if (num_threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads), n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace mining
