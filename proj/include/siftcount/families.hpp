#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "siftcount/sieve.hpp"
#include "siftcount/weights.hpp"

namespace siftcount {

// count_histogram was asked for x below s^2, where the bound envelopes make
// no claim.
class HypothesisViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A sifted set S of positive integers together with the forced divisor s
// that divides every member. Histograms are taken over omega(n/s).
class SiftedFamily {
 public:
  enum class Kind {
    AllIntegers,      // S = N, s = 1
    ShiftedPrimes,    // S = {p+a : p prime, p > -a}, s = 2 for odd a else 1
    QE,               // S = Q(E), integers with all prime factors in E, s = 1
    ShiftedPrimesQE,  // shifted primes with (p+a)/s in Q(E)
    TwinMiddles,      // S = {n > 4 : n-1 and n+1 both prime}, s = 6
  };

  static SiftedFamily all_integers();
  static SiftedFamily shifted_primes(int64_t a);
  static SiftedFamily qe(PrimeSet E);
  static SiftedFamily shifted_primes_qe(int64_t a, PrimeSet E);
  static SiftedFamily twin_middles();

  Kind kind() const { return kind_; }
  uint64_t s() const { return s_; }
  const std::string& name() const { return name_; }
  int64_t shift() const { return a_; }
  const PrimeSet& prime_set() const { return set_; }

  // Membership in S (no upper cutoff). Pure and deterministic.
  bool member(uint64_t n) const;

  // Smallest prime-table limit that enumerate() needs for members up to x.
  uint64_t prime_limit_needed(uint64_t x) const;

  // Emits the members of S in [lo, hi] in increasing order. Every emitted n
  // is checked to be divisible by s. The table must cover
  // prime_limit_needed(hi).
  void enumerate_range(uint64_t lo, uint64_t hi, const PrimeTable& primes,
                       const std::function<void(uint64_t)>& emit) const;
  void enumerate(uint64_t x, const PrimeTable& primes,
                 const std::function<void(uint64_t)>& emit) const {
    enumerate_range(1, x, primes, emit);
  }

 private:
  SiftedFamily(Kind kind, uint64_t s, std::string name, int64_t a, PrimeSet E)
      : kind_(kind), s_(s), name_(std::move(name)), a_(a), set_(std::move(E)) {}

  Kind kind_;
  uint64_t s_;
  std::string name_;
  int64_t a_ = 0;
  PrimeSet set_;
};

// N_k(x; S, s) for k = 0, 1, 2, ...: counts[k] = #{n <= x, n in S,
// omega(n/s) = k}. counts sums to total, the number of members <= x.
struct CountHistogram {
  std::string family;
  uint64_t x = 0;
  uint64_t s = 1;
  std::vector<uint64_t> counts;
  uint64_t total = 0;

  uint64_t count(uint32_t k) const {
    return k < counts.size() ? counts[k] : 0;
  }
  uint32_t max_k() const {
    return counts.empty() ? 0 : static_cast<uint32_t>(counts.size() - 1);
  }
};

// Streams members and looks omega(n/s) up in segmented factor statistics.
// Throws HypothesisViolation when x < s^2, std::invalid_argument when the
// prime table is too small.
CountHistogram count_histogram(const SiftedFamily& F, uint64_t x,
                               const PrimeTable& primes,
                               const SieveConfig& cfg = {});

}  // namespace siftcount
