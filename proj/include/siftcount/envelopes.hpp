#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "siftcount/families.hpp"
#include "siftcount/weights.hpp"

namespace siftcount {

// Free constants of a bound envelope.
//   HR:      N_k <= c1 * (x/ln x) * (lnln x + c2)^(k-1) / (k-1)!
//   Theorem: N_k <= b * x * (Gx + c)^(k-1) / ((k-1)! * (ln x)^lambda)
struct EnvelopeParams {
  enum class Kind { HR, Theorem };
  Kind kind = Kind::HR;
  double c1 = 1.0;
  double c2 = 0.0;
  double b = 1.0;
  double c = 0.0;
  double lambda = 1.0;
  std::string weight;  // weight behind Gx, informational
};

// Both envelopes are evaluated in log space (lgamma for the factorial) so k
// in the thousands neither overflows nor loses the leading digits.
double hr_envelope(uint64_t x, uint32_t k, double c1, double c2);
double theorem_envelope(uint64_t x, uint32_t k, double b, double lambda,
                        double gx, double c);
double envelope_value(const EnvelopeParams& params, uint64_t x, uint32_t k,
                      double gx = 0.0);

struct FitResult {
  EnvelopeParams params;
  double max_ratio = 0.0;
  uint32_t argmax_k = 0;
  std::map<uint32_t, double> per_k_ratios;  // k >= 1 bins with N_k > 0
};

// Fits the envelope's two free constants to a histogram: grid-search the
// additive constant (c2 resp. c) over [0, 10] in steps of 0.01, make the
// multiplicative constant tight (max ratio = 1), keep the grid point that
// minimizes the ratio spread max/min over the populated k >= 1 bins.
// Ties go to the smallest grid value. The k=0 bin is never fitted.
FitResult fit_constants(const CountHistogram& hist, EnvelopeParams::Kind kind,
                        double lambda = 1.0, double gx = 0.0);

// Ratios of an existing envelope against a histogram (possibly at another x
// than the one the constants were fitted on). gx must belong to hist.x.
FitResult evaluate_envelope(const EnvelopeParams& params,
                            const CountHistogram& hist, double gx = 0.0);

struct SieveCheckRow {
  uint64_t r = 0;
  uint64_t lhs = 0;   // #{prime q <= x/(rs) : qrs in S}
  double g_r = 0.0;
  double ratio = 0.0; // lhs * ln^lambda(2x/(rs)) / (x * g(r))
};

struct SieveCheckResult {
  bool feasible = true;
  uint64_t infeasible_r = 0;    // smallest r with lhs > 0 but g(r) = 0
  uint64_t infeasible_lhs = 0;
  double b_star = 0.0;          // max ratio over all scanned r
  uint64_t argmax_r = 0;
  uint64_t r_max = 0;           // scanned range is [1, r_max]
  std::vector<SieveCheckRow> worst;  // steepest rows, ratio descending
};

// Scans every r in [1, x/s], counting primes q <= x/(rs) with qrs in S by
// direct membership tests. Returns the minimal B that makes the per-r bound
// lhs <= B x g(r) / ln^lambda(2x/(rs)) hold, or an infeasibility report if
// some r has members but zero weight. Cost is roughly x log x membership
// tests, hence the x <= 10^6 precondition.
SieveCheckResult check_sieve_condition(const SiftedFamily& F, const Weight& g,
                                       double lambda, uint64_t x,
                                       const PrimeTable& primes,
                                       const SieveConfig& cfg = {});

// Re-scans all r and confirms lhs * ln^lambda(2x/(rs)) / (x g(r)) <= b_star.
// Uses the exact expression of check_sieve_condition, so the returned b_star
// passes with no tolerance.
bool verify_sieve_bound(const SiftedFamily& F, const Weight& g, double lambda,
                        uint64_t x, const PrimeTable& primes, double b_star);

}  // namespace siftcount
