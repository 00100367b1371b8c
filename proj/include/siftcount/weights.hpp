#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "siftcount/sieve.hpp"

namespace siftcount {

// A weight evaluation broke its declared cap g(p^v) <= A/p^v.
class WeightClassViolation : public std::runtime_error {
 public:
  WeightClassViolation(const std::string& weight, uint64_t p_, uint32_t v_,
                       double value_, double cap_);
  uint64_t p;
  uint32_t v;
  double value;
  double cap;
};

// A set of primes with a pure, deterministic membership test. The argument
// of contains() is assumed prime; composites are not classified.
class PrimeSet {
 public:
  enum class Kind { All, Explicit, Residue, Complement };

  static PrimeSet all();
  static PrimeSet none();
  static PrimeSet explicit_list(std::vector<uint64_t> primes);
  // p is a member iff p mod m is in `residues`. Primes dividing m are only
  // members if their own residue is listed.
  static PrimeSet residues_mod(uint64_t m, std::vector<uint64_t> residues);
  static PrimeSet complement_of(std::vector<uint64_t> primes);

  bool contains(uint64_t p) const;
  Kind kind() const { return kind_; }
  bool is_all() const { return kind_ == Kind::All; }
  const std::string& name() const { return name_; }

 private:
  PrimeSet(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  Kind kind_;
  std::string name_;
  std::vector<uint64_t> list_;  // sorted members / excluded primes
  uint64_t mod_ = 0;
  std::vector<uint64_t> residues_;  // sorted
};

// Non-negative multiplicative function given by its values on prime powers,
// declared to satisfy g(p^v) <= A/p^v. Every evaluation re-checks the cap
// (to relative 1e-12) and throws WeightClassViolation on failure.
class Weight {
 public:
  Weight(std::string name, double class_bound_a,
         std::function<double(uint64_t p, uint32_t v)> rule)
      : name_(std::move(name)),
        class_bound_(class_bound_a),
        rule_(std::move(rule)) {}

  const std::string& name() const { return name_; }
  double class_bound() const { return class_bound_; }

  // g(p^v), cap-checked.
  double prime_power(uint64_t p, uint32_t v) const;

 private:
  std::string name_;
  double class_bound_;
  std::function<double(uint64_t, uint32_t)> rule_;
};

// g(r) as the product over r's prime-power components; g(1) = 1.
double eval_weight(const Weight& g, uint64_t r);
double eval_weight(const Weight& g,
                   const std::vector<std::pair<uint64_t, uint32_t>>& factors);

// G(x) = sum_{p <= x} g(p), compensated summation over the prime table.
// Requires x >= 2 and primes.limit() >= x. Absolute error stays below 1e-9
// for tables up to ~5e7 primes.
double big_G(const Weight& g, uint64_t x, const PrimeTable& primes);

// E(x) = sum_{p in E, p <= x} 1/p. Matches big_G of the indicator weight on
// E bit-for-bit (identical term sequence).
double big_E(const PrimeSet& E, uint64_t x, const PrimeTable& primes);

// Built-in weight catalog.
Weight weight_unit_over_r();                    // g(p^v) = 1/p^v,  A = 1
Weight weight_one_over_phi_on(PrimeSet E);      // 1/phi(p^v) on E, A = 2
Weight weight_indicator_over_r_on(PrimeSet E);  // 1/p^v on E,      A = 1
// g(p^v) = (1/p^v) * (p-1)/(p-3) for p > 3, 1/p^v for p <= 3;  A = 2.
// The p = 5 factor equals 2, which is why A = 1 would not do.
Weight weight_twin();

std::vector<Weight> builtin_weights(const PrimeSet& E = PrimeSet::all());
std::vector<std::string> builtin_weight_names();
// Lookup by catalog name ("unit-over-r", "one-over-phi-on-qe",
// "indicator-over-r-on-qe", "twin-weight"); throws std::invalid_argument.
Weight make_weight(const std::string& name, const PrimeSet& E = PrimeSet::all());

}  // namespace siftcount
