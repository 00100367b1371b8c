#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "siftcount/sieve.hpp"
#include "siftcount/weights.hpp"

namespace siftcount {

// One summand r of the constrained sum: omega(r) = ell and r * P+(r) <= x.
struct RPattern {
  uint64_t r = 0;
  uint32_t omega_r = 0;
  uint64_t pplus_r = 0;
  double weight_value = 1.0;  // g(r); 1.0 when no weight is attached
};

// Streams every r with omega(r) = ell and r * P+(r) <= x, each exactly once
// (depth-first over ascending primes and exponents, pruned by the minimal
// completion of the current partial product). ell = 0 emits only r = 1.
// Emission order is not sorted. Requires 2 <= x <= 10^7, ell <= 40 and
// primes.limit() >= sqrt(x).
void enumerate_r(uint64_t x, uint32_t ell, const PrimeTable& primes,
                 const Weight* g,
                 const std::function<void(const RPattern&)>& emit);

// Band structure Q_j = x^(1/2^j). A summand r >= 2 belongs to the first
// band j >= 1 with x/r > Q_j; the tie r = x/Q_j therefore lands in band j+1.
double band_threshold(uint64_t x, uint32_t j);      // Q_j (Q_0 = x exactly)
uint32_t band_index(uint64_t x, uint64_t r);
uint32_t band_limit(uint64_t x);  // largest j whose band can be nonempty

struct BandReport {
  uint32_t j = 0;
  double q_j = 0.0;
  double sum = 0.0;
  uint64_t count = 0;
};

struct LemmaSum {
  double total = 0.0;  // sum over r of g(r) / ln^lambda(x/r)
  uint64_t count = 0;
  std::vector<BandReport> bands;  // partition of the r >= 2 summands
};

LemmaSum lemma_sum(uint64_t x, uint32_t ell, const Weight& g, double lambda,
                   const PrimeTable& primes);

struct LemmaBound {
  double sum = 0.0;
  double bound = 0.0;  // (G(x) + c)^ell / (ell! * ln^lambda x)
  double ratio = 0.0;  // sum / bound; exactly 1 at ell = 0
  std::vector<BandReport> bands;
};

LemmaBound lemma_bound_check(uint64_t x, uint32_t ell, const Weight& g,
                             double lambda, double c, const PrimeTable& primes);

// Smallest constant on the [0, 10] grid (step 0.01) whose bound dominates
// the sum for every ell <= ell_max. Throws std::runtime_error if even 10
// is not enough.
double lemma_fit_c(uint64_t x, uint32_t ell_max, const Weight& g,
                   double lambda, const PrimeTable& primes);

// Per-band majorant obtained by smoothing the weight with the exponent
// 1 - alpha, alpha = 1/(20 ln Q_j): the multinomial bound
//   (1/ell!) * (sum over prime powers p^v <= x, p <= Q_{j-1} of g(p^v)^(1-alpha))^ell
// dominates the band's smoothed sum  sum_{r in band j} g(r)^(1-alpha).
struct RankinReport {
  uint32_t j = 0;
  uint32_t ell = 0;
  bool empty = false;  // Q_{j-1} < 2: the band cannot contain any r
  double q_j = 0.0;
  double q_jm1 = 0.0;
  double alpha = 0.0;      // in (0, 1/6] whenever the band is nonempty
  double prime_sum = 0.0;  // v = 1 part of the bracket
  double oa_term = 0.0;    // v >= 2 part of the bracket
  double majorant = 0.0;
  double band_sum = 0.0;   // smoothed band sum
  uint64_t band_count = 0;
  double ratio = 0.0;      // band_sum / majorant
};

RankinReport rankin_diagnostic(uint64_t x, uint32_t j, uint32_t ell,
                               const Weight& g, const PrimeTable& primes);

// #{2 <= m <= x : P+(m)^2 | m}. m = 1 is excluded: with P+(1) = 0 the
// divisibility 0^2 | 1 is false. Requires x <= 10^8 and a base table
// covering sqrt(x).
uint64_t squarefull_top_count(uint64_t x, const PrimeTable& base,
                              const SieveConfig& cfg = {});

}  // namespace siftcount
