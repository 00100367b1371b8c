#pragma once

#include <cstdint>
#include <functional>

namespace siftcount {

// Compensated (Kahan) accumulator. Keeps the absolute error of a long sum
// near one ulp of the running total instead of growing with the term count.
class KahanSum {
 public:
  void add(double v) {
    double y = v - c_;
    double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

// Floor of sqrt(n), exact for all 64-bit n.
uint64_t isqrt_u64(uint64_t n);

// a*b saturated to cap+1 when the product would exceed cap (or overflow).
uint64_t mul_capped(uint64_t a, uint64_t b, uint64_t cap);

// Runs fn(i) for i in [0, n_tasks). Tasks are pulled from a shared counter by
// up to `threads` workers (0 = hardware concurrency, 1 = run inline). Each
// task must write only to its own output slot so results do not depend on
// the schedule.
void parallel_tasks(uint64_t n_tasks, unsigned threads,
                    const std::function<void(uint64_t)>& fn);

}  // namespace siftcount
