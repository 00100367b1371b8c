#include "siftcount/util.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

namespace siftcount {

uint64_t isqrt_u64(uint64_t n) {
  if (n == 0) return 0;
  auto sq = [](uint64_t v) { return static_cast<__uint128_t>(v) * v; };
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && sq(r) > n) --r;
  while (sq(r + 1) <= n) ++r;
  return r;
}

uint64_t mul_capped(uint64_t a, uint64_t b, uint64_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap + 1;
  return a * b;
}

void parallel_tasks(uint64_t n_tasks, unsigned threads,
                    const std::function<void(uint64_t)>& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (threads > n_tasks) threads = static_cast<unsigned>(n_tasks);

  if (threads <= 1) {
    for (uint64_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }

  std::atomic<uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n_tasks) break;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace siftcount
