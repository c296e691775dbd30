#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace derham {

// DERHAM_THREADS sets the worker count for multi-start searches; default 1
inline int thread_count() {
  const char* e = std::getenv("DERHAM_THREADS");
  if (!e) return 1;
  int n = std::atoi(e);
  return n < 1 ? 1 : n;
}

// runs fn(0..n-1); every item must write only to its own slot so the result
// is independent of the partition and of the worker count
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace derham
