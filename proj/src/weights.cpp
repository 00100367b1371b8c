#include "siftcount/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "siftcount/util.hpp"

namespace siftcount {

namespace {

std::string join_u64(const std::vector<uint64_t>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

}  // namespace

WeightClassViolation::WeightClassViolation(const std::string& weight,
                                           uint64_t p_, uint32_t v_,
                                           double value_, double cap_)
    : std::runtime_error("weight '" + weight + "' breaks its class bound at p=" +
                         std::to_string(p_) + " v=" + std::to_string(v_) +
                         ": g(p^v)=" + std::to_string(value_) + " > A/p^v=" +
                         std::to_string(cap_)),
      p(p_),
      v(v_),
      value(value_),
      cap(cap_) {}

PrimeSet PrimeSet::all() { return PrimeSet(Kind::All, "all"); }

PrimeSet PrimeSet::none() { return explicit_list({}); }

PrimeSet PrimeSet::explicit_list(std::vector<uint64_t> primes) {
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  PrimeSet s(Kind::Explicit,
             primes.empty() ? "none" : "list(" + join_u64(primes) + ")");
  s.list_ = std::move(primes);
  return s;
}

PrimeSet PrimeSet::residues_mod(uint64_t m, std::vector<uint64_t> residues) {
  if (m < 2) throw std::invalid_argument("residues_mod: modulus must be >= 2");
  for (auto& r : residues) r %= m;
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()),
                 residues.end());
  PrimeSet s(Kind::Residue,
             "mod(" + std::to_string(m) + ":" + join_u64(residues) + ")");
  s.mod_ = m;
  s.residues_ = std::move(residues);
  return s;
}

PrimeSet PrimeSet::complement_of(std::vector<uint64_t> primes) {
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  PrimeSet s(Kind::Complement, "comp(" + join_u64(primes) + ")");
  s.list_ = std::move(primes);
  return s;
}

bool PrimeSet::contains(uint64_t p) const {
  switch (kind_) {
    case Kind::All:
      return true;
    case Kind::Explicit:
      return std::binary_search(list_.begin(), list_.end(), p);
    case Kind::Residue:
      return std::binary_search(residues_.begin(), residues_.end(), p % mod_);
    case Kind::Complement:
      return !std::binary_search(list_.begin(), list_.end(), p);
  }
  return false;
}

double Weight::prime_power(uint64_t p, uint32_t v) const {
  double value = rule_(p, v);
  double cap = class_bound_ / std::pow(static_cast<double>(p), v);
  if (value < 0.0 || value > cap * (1.0 + 1e-12))
    throw WeightClassViolation(name_, p, v, value, cap);
  return value;
}

double eval_weight(const Weight& g,
                   const std::vector<std::pair<uint64_t, uint32_t>>& factors) {
  double prod = 1.0;
  for (const auto& [p, v] : factors) prod *= g.prime_power(p, v);
  return prod;
}

double eval_weight(const Weight& g, uint64_t r) {
  if (r < 1) throw std::invalid_argument("eval_weight: r must be >= 1");
  if (r == 1) return 1.0;
  return eval_weight(g, factorize(r));
}

double big_G(const Weight& g, uint64_t x, const PrimeTable& primes) {
  if (x < 2) throw std::invalid_argument("big_G: x must be >= 2");
  if (primes.limit() < x)
    throw std::invalid_argument("big_G: prime table limit below x");
  KahanSum acc;
  primes.for_each_in(2, x, [&](uint64_t p) {
    double gp = g.prime_power(p, 1);
    if (gp != 0.0) acc.add(gp);
  });
  return acc.value();
}

double big_E(const PrimeSet& E, uint64_t x, const PrimeTable& primes) {
  if (x < 2) throw std::invalid_argument("big_E: x must be >= 2");
  if (primes.limit() < x)
    throw std::invalid_argument("big_E: prime table limit below x");
  KahanSum acc;
  primes.for_each_in(2, x, [&](uint64_t p) {
    if (E.contains(p)) acc.add(1.0 / static_cast<double>(p));
  });
  return acc.value();
}

namespace {

// 1/p^v as a double; integer-exact whenever p^v fits in 64 bits.
double inv_prime_power(uint64_t p, uint32_t v) {
  uint64_t pv = mul_capped(1, p, UINT64_MAX - 1);
  for (uint32_t i = 1; i < v; ++i) {
    pv = mul_capped(pv, p, UINT64_MAX - 1);
    if (pv == UINT64_MAX)
      return 1.0 / std::pow(static_cast<double>(p), static_cast<double>(v));
  }
  return 1.0 / static_cast<double>(pv);
}

}  // namespace

Weight weight_unit_over_r() {
  return Weight("unit-over-r", 1.0,
                [](uint64_t p, uint32_t v) { return inv_prime_power(p, v); });
}

Weight weight_one_over_phi_on(PrimeSet E) {
  std::string name = "one-over-phi-on-qe[" + E.name() + "]";
  return Weight(name, 2.0, [E = std::move(E)](uint64_t p, uint32_t v) {
    if (!E.contains(p)) return 0.0;
    // phi(p^v) = p^(v-1) * (p-1)
    double phi = (v == 1) ? static_cast<double>(p - 1)
                          : std::pow(static_cast<double>(p), v - 1) *
                                static_cast<double>(p - 1);
    return 1.0 / phi;
  });
}

Weight weight_indicator_over_r_on(PrimeSet E) {
  std::string name = "indicator-over-r-on-qe[" + E.name() + "]";
  return Weight(name, 1.0, [E = std::move(E)](uint64_t p, uint32_t v) {
    return E.contains(p) ? inv_prime_power(p, v) : 0.0;
  });
}

Weight weight_twin() {
  return Weight("twin-weight", 2.0, [](uint64_t p, uint32_t v) {
    double base = inv_prime_power(p, v);
    if (p <= 3) return base;
    return base * (static_cast<double>(p - 1) / static_cast<double>(p - 3));
  });
}

std::vector<Weight> builtin_weights(const PrimeSet& E) {
  std::vector<Weight> out;
  out.push_back(weight_unit_over_r());
  out.push_back(weight_one_over_phi_on(E));
  out.push_back(weight_indicator_over_r_on(E));
  out.push_back(weight_twin());
  return out;
}

std::vector<std::string> builtin_weight_names() {
  return {"unit-over-r", "one-over-phi-on-qe", "indicator-over-r-on-qe",
          "twin-weight"};
}

Weight make_weight(const std::string& name, const PrimeSet& E) {
  if (name == "unit-over-r") return weight_unit_over_r();
  if (name == "one-over-phi-on-qe") return weight_one_over_phi_on(E);
  if (name == "indicator-over-r-on-qe") return weight_indicator_over_r_on(E);
  if (name == "twin-weight") return weight_twin();
  throw std::invalid_argument("unknown weight '" + name + "'");
}

}  // namespace siftcount
