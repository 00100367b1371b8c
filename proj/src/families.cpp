#include "siftcount/families.hpp"

#include <algorithm>

#include "siftcount/util.hpp"

namespace siftcount {

namespace {

// Does every prime factor of n lie in E? Trial division with early exit.
bool qe_member(uint64_t n, const PrimeSet& E) {
  if (n == 0) return false;
  for (uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d) continue;
    if (!E.contains(d)) return false;
    do {
      n /= d;
    } while (n % d == 0);
  }
  if (n > 1 && !E.contains(n)) return false;
  return true;
}

uint64_t shift_divisor(int64_t a) { return (a % 2 == 0) ? 1 : 2; }

}  // namespace

SiftedFamily SiftedFamily::all_integers() {
  return SiftedFamily(Kind::AllIntegers, 1, "all", 0, PrimeSet::all());
}

SiftedFamily SiftedFamily::shifted_primes(int64_t a) {
  if (a == 0) throw std::invalid_argument("shifted_primes: a must be nonzero");
  return SiftedFamily(Kind::ShiftedPrimes, shift_divisor(a),
                      "shifted:a=" + std::to_string(a), a, PrimeSet::all());
}

SiftedFamily SiftedFamily::qe(PrimeSet E) {
  std::string name = "qe:" + E.name();
  return SiftedFamily(Kind::QE, 1, std::move(name), 0, std::move(E));
}

SiftedFamily SiftedFamily::shifted_primes_qe(int64_t a, PrimeSet E) {
  if (a == 0)
    throw std::invalid_argument("shifted_primes_qe: a must be nonzero");
  std::string name = "shifted-qe:a=" + std::to_string(a) + "," + E.name();
  return SiftedFamily(Kind::ShiftedPrimesQE, shift_divisor(a), std::move(name),
                      a, std::move(E));
}

SiftedFamily SiftedFamily::twin_middles() {
  return SiftedFamily(Kind::TwinMiddles, 6, "twin", 0, PrimeSet::all());
}

bool SiftedFamily::member(uint64_t n) const {
  if (n < 1) return false;
  switch (kind_) {
    case Kind::AllIntegers:
      return true;
    case Kind::ShiftedPrimes:
    case Kind::ShiftedPrimesQE: {
      if (n % s_ != 0) return false;
      if (n > static_cast<uint64_t>(INT64_MAX)) return false;
      int64_t p = static_cast<int64_t>(n) - a_;
      if (p < 2 || !is_prime_u64(static_cast<uint64_t>(p))) return false;
      if (kind_ == Kind::ShiftedPrimesQE && !qe_member(n / s_, set_))
        return false;
      return true;
    }
    case Kind::QE:
      return qe_member(n, set_);
    case Kind::TwinMiddles:
      return n > 4 && is_prime_u64(n - 1) && is_prime_u64(n + 1);
  }
  return false;
}

uint64_t SiftedFamily::prime_limit_needed(uint64_t x) const {
  switch (kind_) {
    case Kind::AllIntegers:
      return 2;
    case Kind::ShiftedPrimes:
    case Kind::ShiftedPrimesQE: {
      int64_t hi_p = static_cast<int64_t>(x) - a_;
      return hi_p < 2 ? 2 : static_cast<uint64_t>(hi_p);
    }
    case Kind::QE:
      return std::max<uint64_t>(2, x);
    case Kind::TwinMiddles:
      return x + 2;
  }
  return 2;
}

void SiftedFamily::enumerate_range(
    uint64_t lo, uint64_t hi, const PrimeTable& primes,
    const std::function<void(uint64_t)>& emit) const {
  if (lo < 1) lo = 1;
  if (lo > hi) return;
  if (primes.limit() < prime_limit_needed(hi))
    throw std::invalid_argument("enumerate_range: prime table limit " +
                                std::to_string(primes.limit()) +
                                " too small for hi = " + std::to_string(hi));

  auto checked_emit = [&](uint64_t n) {
    if (n % s_ != 0)
      throw std::logic_error("enumerator produced " + std::to_string(n) +
                             " not divisible by s = " + std::to_string(s_));
    emit(n);
  };

  switch (kind_) {
    case Kind::AllIntegers: {
      for (uint64_t n = lo; n <= hi; ++n) checked_emit(n);
      return;
    }
    case Kind::ShiftedPrimes: {
      int64_t p_lo = std::max<int64_t>(2, static_cast<int64_t>(lo) - a_);
      int64_t p_hi = static_cast<int64_t>(hi) - a_;
      if (p_hi < p_lo) return;
      primes.for_each_in(static_cast<uint64_t>(p_lo),
                         static_cast<uint64_t>(p_hi), [&](uint64_t p) {
                           uint64_t n = static_cast<uint64_t>(
                               static_cast<int64_t>(p) + a_);
                           if (n % s_ == 0) checked_emit(n);
                         });
      return;
    }
    case Kind::QE: {
      // sieve out anything with a prime factor outside E
      size_t n_vals = hi - lo + 1;
      std::vector<uint8_t> ok(n_vals, 1);
      primes.for_each_in(2, hi, [&](uint64_t p) {
        if (set_.contains(p)) return;
        for (uint64_t m = ((lo + p - 1) / p) * p; m <= hi; m += p)
          ok[m - lo] = 0;
      });
      for (uint64_t n = lo; n <= hi; ++n)
        if (ok[n - lo]) checked_emit(n);
      return;
    }
    case Kind::ShiftedPrimesQE: {
      int64_t p_lo = std::max<int64_t>(2, static_cast<int64_t>(lo) - a_);
      int64_t p_hi = static_cast<int64_t>(hi) - a_;
      if (p_hi < p_lo) return;
      primes.for_each_in(static_cast<uint64_t>(p_lo),
                         static_cast<uint64_t>(p_hi), [&](uint64_t p) {
                           uint64_t n = static_cast<uint64_t>(
                               static_cast<int64_t>(p) + a_);
                           if (n % s_ == 0 && qe_member(n / s_, set_))
                             checked_emit(n);
                         });
      return;
    }
    case Kind::TwinMiddles: {
      if (hi < 6) return;
      uint64_t p_lo = std::max<uint64_t>(5, lo - 1);  // lo >= 1 here
      uint64_t p_hi = hi - 1;
      size_t i = primes.lower_bound(p_lo);
      size_t n_primes = primes.size();
      for (; i + 1 < n_primes; ++i) {
        uint64_t p = primes[i];
        if (p > p_hi) break;
        if (primes[i + 1] == p + 2) checked_emit(p + 1);
      }
      return;
    }
  }
}

CountHistogram count_histogram(const SiftedFamily& F, uint64_t x,
                               const PrimeTable& primes,
                               const SieveConfig& cfg) {
  uint64_t s = F.s();
  if (x < s * s)
    throw HypothesisViolation("count_histogram: x = " + std::to_string(x) +
                              " is below s^2 = " + std::to_string(s * s) +
                              " for family " + F.name());
  uint64_t m_max = x / s;
  uint64_t base_needed = isqrt_u64(m_max);
  uint64_t enum_needed = F.prime_limit_needed(x);
  if (primes.limit() < std::max(base_needed, enum_needed))
    throw std::invalid_argument(
        "count_histogram: prime table limit " + std::to_string(primes.limit()) +
        " below required " + std::to_string(std::max(base_needed, enum_needed)));

  uint64_t block = cfg.segment_size;
  uint64_t n_blocks = (m_max - 1) / block + 1;
  std::vector<std::vector<uint64_t>> partial(n_blocks);

  parallel_tasks(n_blocks, cfg.parallel ? cfg.threads : 1, [&](uint64_t bi) {
    uint64_t m_lo = 1 + bi * block;
    uint64_t m_hi = std::min(m_max, m_lo + block - 1);
    FactorStats st = factor_stats(m_lo, m_hi, primes);
    auto& hist = partial[bi];
    F.enumerate_range(m_lo * s, m_hi * s, primes, [&](uint64_t n) {
      uint32_t k = st.omega_of(n / s);
      if (k >= hist.size()) hist.resize(k + 1, 0);
      hist[k] += 1;
    });
  });

  CountHistogram out;
  out.family = F.name();
  out.x = x;
  out.s = s;
  for (const auto& hist : partial) {
    if (hist.size() > out.counts.size()) out.counts.resize(hist.size(), 0);
    for (size_t k = 0; k < hist.size(); ++k) out.counts[k] += hist[k];
  }
  for (uint64_t c : out.counts) out.total += c;
  return out;
}

}  // namespace siftcount
