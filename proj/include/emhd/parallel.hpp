#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace emhd {

/// Number of worker threads used by batch APIs. Defaults to 1.
int thread_count();
void set_thread_count(int n);

/// Static-chunked parallel loop. Each index is processed exactly once and
/// results written by index are independent of the thread count.
template <class F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t nt = std::min<std::size_t>(std::max(1, thread_count()), count);
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += nt) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace emhd
