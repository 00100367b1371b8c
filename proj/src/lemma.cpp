#include "siftcount/lemma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "siftcount/util.hpp"

namespace siftcount {

namespace {

constexpr uint64_t kEnumerateCap = 10'000'000;
constexpr uint32_t kEllCap = 40;

struct EnumerateContext {
  uint64_t x;
  uint32_t ell;
  const PrimeTable* primes;
  const Weight* g;
  const std::function<void(const RPattern&)>* emit;
};

// Chooses the prime at position `i0` and up, with `remaining` primes still
// to pick. The minimal completion of a partial product r using primes >= p
// is r * p^remaining, and the final constraint multiplies by P+(r) >= p
// once more; both prunes are exact lower bounds, so nothing valid is cut.
void dfs(const EnumerateContext& ctx, size_t i0, uint32_t remaining,
         uint64_t r, double w) {
  size_t n = ctx.primes->size();
  for (size_t i = i0; i < n; ++i) {
    uint64_t p = (*ctx.primes)[i];
    uint64_t lb = r;
    for (uint32_t t = 0; t <= remaining && lb <= ctx.x; ++t)
      lb = mul_capped(lb, p, ctx.x);
    if (lb > ctx.x) break;  // larger primes are worse: stop this level

    uint64_t rp = r;
    for (uint32_t v = 1;; ++v) {
      rp = mul_capped(rp, p, ctx.x);
      if (rp > ctx.x) break;
      uint64_t need = rp;
      for (uint32_t t = 0; t < remaining && need <= ctx.x; ++t)
        need = mul_capped(need, p, ctx.x);
      if (need > ctx.x) break;  // larger exponents are worse
      double wp = ctx.g ? w * ctx.g->prime_power(p, v) : w;
      if (remaining == 1) {
        (*ctx.emit)(RPattern{rp, ctx.ell, p, wp});
      } else {
        dfs(ctx, i + 1, remaining - 1, rp, wp);
      }
    }
  }
}

}  // namespace

void enumerate_r(uint64_t x, uint32_t ell, const PrimeTable& primes,
                 const Weight* g,
                 const std::function<void(const RPattern&)>& emit) {
  if (x < 2 || x > kEnumerateCap)
    throw std::invalid_argument("enumerate_r: x must be in [2, 1e7]");
  if (ell > kEllCap)
    throw std::invalid_argument("enumerate_r: ell capped at 40");
  if (primes.limit() < isqrt_u64(x))
    throw std::invalid_argument("enumerate_r: prime table below sqrt(x)");

  if (ell == 0) {
    emit(RPattern{1, 0, 0, 1.0});
    return;
  }
  EnumerateContext ctx{x, ell, &primes, g, &emit};
  dfs(ctx, 0, ell, 1, 1.0);
}

double band_threshold(uint64_t x, uint32_t j) {
  if (j == 0) return static_cast<double>(x);
  return std::exp(std::log(static_cast<double>(x)) / std::exp2(j));
}

uint32_t band_index(uint64_t x, uint64_t r) {
  double u = static_cast<double>(x) / static_cast<double>(r);
  for (uint32_t j = 1; j <= 64; ++j)
    if (u > band_threshold(x, j)) return j;
  throw std::logic_error("band_index: no band found (r > x/2?)");
}

uint32_t band_limit(uint64_t x) {
  uint32_t j = 1;
  while (band_threshold(x, j) >= 2.0) ++j;
  return j;  // threshold(j-1) >= 2, threshold(j) < 2
}

LemmaSum lemma_sum(uint64_t x, uint32_t ell, const Weight& g, double lambda,
                   const PrimeTable& primes) {
  LemmaSum out;
  double xd = static_cast<double>(x);
  if (ell == 0) {
    // single summand r = 1; no band is defined for it
    out.total = 1.0 / std::pow(std::log(xd), lambda);
    out.count = 1;
    return out;
  }

  uint32_t jmax = band_limit(x);
  std::vector<KahanSum> sums(jmax + 1);
  std::vector<uint64_t> counts(jmax + 1, 0);
  enumerate_r(x, ell, primes, &g, [&](const RPattern& pat) {
    double term = pat.weight_value /
                  std::pow(std::log(xd / static_cast<double>(pat.r)), lambda);
    uint32_t j = band_index(x, pat.r);
    sums[j].add(term);
    counts[j] += 1;
  });

  KahanSum total;
  for (uint32_t j = 1; j <= jmax; ++j) {
    if (counts[j] == 0) continue;
    out.bands.push_back(
        BandReport{j, band_threshold(x, j), sums[j].value(), counts[j]});
    total.add(sums[j].value());
    out.count += counts[j];
  }
  out.total = total.value();
  return out;
}

namespace {

double lemma_rhs(double gx_plus_c, uint32_t ell, double lambda, double xd) {
  double fact = 1.0;
  for (uint32_t i = 2; i <= ell; ++i) fact *= i;
  return std::pow(gx_plus_c, ell) / (fact * std::pow(std::log(xd), lambda));
}

}  // namespace

LemmaBound lemma_bound_check(uint64_t x, uint32_t ell, const Weight& g,
                             double lambda, double c, const PrimeTable& primes) {
  if (c < 0.0) throw std::invalid_argument("lemma_bound_check: c must be >= 0");
  if (primes.limit() < x)
    throw std::invalid_argument("lemma_bound_check: prime table below x");
  LemmaSum s = lemma_sum(x, ell, g, lambda, primes);
  double gx = big_G(g, x, primes);

  LemmaBound out;
  out.sum = s.total;
  out.bands = std::move(s.bands);
  out.bound = lemma_rhs(gx + c, ell, lambda, static_cast<double>(x));
  out.ratio = out.sum / out.bound;
  return out;
}

double lemma_fit_c(uint64_t x, uint32_t ell_max, const Weight& g,
                   double lambda, const PrimeTable& primes) {
  double gx = big_G(g, x, primes);
  double xd = static_cast<double>(x);
  std::vector<double> sums(ell_max + 1);
  for (uint32_t ell = 0; ell <= ell_max; ++ell)
    sums[ell] = lemma_sum(x, ell, g, lambda, primes).total;

  for (int i = 0; i < 1001; ++i) {
    double c = i * 0.01;
    bool ok = true;
    for (uint32_t ell = 0; ell <= ell_max && ok; ++ell) {
      double bound = lemma_rhs(gx + c, ell, lambda, xd);
      if (sums[ell] / bound > 1.0) ok = false;
    }
    if (ok) return c;
  }
  throw std::runtime_error("lemma_fit_c: no constant in [0, 10] suffices");
}

RankinReport rankin_diagnostic(uint64_t x, uint32_t j, uint32_t ell,
                               const Weight& g, const PrimeTable& primes) {
  if (j < 1) throw std::invalid_argument("rankin_diagnostic: j must be >= 1");
  RankinReport rep;
  rep.j = j;
  rep.ell = ell;
  rep.q_j = band_threshold(x, j);
  rep.q_jm1 = band_threshold(x, j - 1);
  if (rep.q_jm1 < 2.0) {
    rep.empty = true;
    return rep;
  }

  rep.alpha = 1.0 / (20.0 * std::log(rep.q_j));
  double smooth = 1.0 - rep.alpha;

  // bracket over prime powers p^v <= x with p <= Q_{j-1}; the half-ulp slack
  // on the prime cutoff can only enlarge the bracket, keeping it a majorant
  uint64_t p_cap = static_cast<uint64_t>(rep.q_jm1 * (1.0 + 1e-12));
  KahanSum prime_part, higher_part;
  primes.for_each_in(2, p_cap, [&](uint64_t p) {
    double gp = g.prime_power(p, 1);
    if (gp > 0.0) prime_part.add(std::pow(gp, smooth));
    for (uint32_t v = 2;; ++v) {
      uint64_t pv = 1;
      bool over = false;
      for (uint32_t t = 0; t < v; ++t) {
        pv = mul_capped(pv, p, x);
        if (pv > x) {
          over = true;
          break;
        }
      }
      if (over) break;
      double gpv = g.prime_power(p, v);
      if (gpv > 0.0) higher_part.add(std::pow(gpv, smooth));
    }
  });
  rep.prime_sum = prime_part.value();
  rep.oa_term = higher_part.value();

  double fact = 1.0;
  for (uint32_t i = 2; i <= ell; ++i) fact *= i;
  rep.majorant = std::pow(rep.oa_term + rep.prime_sum, ell) / fact;

  KahanSum band;
  enumerate_r(x, ell, primes, &g, [&](const RPattern& pat) {
    if (band_index(x, pat.r) != j) return;
    if (pat.weight_value > 0.0) band.add(std::pow(pat.weight_value, smooth));
    rep.band_count += 1;
  });
  rep.band_sum = band.value();
  rep.ratio = rep.majorant > 0.0 ? rep.band_sum / rep.majorant : 0.0;
  return rep;
}

uint64_t squarefull_top_count(uint64_t x, const PrimeTable& base,
                              const SieveConfig& cfg) {
  if (x > 100'000'000)
    throw std::invalid_argument("squarefull_top_count: x capped at 1e8");
  if (x < 2) return 0;
  if (base.limit() < isqrt_u64(x))
    throw std::invalid_argument("squarefull_top_count: base below sqrt(x)");

  uint64_t block = cfg.segment_size;
  uint64_t n_blocks = (x - 2) / block + 1;
  std::vector<uint64_t> partial(n_blocks, 0);
  parallel_tasks(n_blocks, cfg.parallel ? cfg.threads : 1, [&](uint64_t bi) {
    uint64_t lo = 2 + bi * block;
    uint64_t hi = std::min(x, lo + block - 1);
    FactorStats st = factor_stats(lo, hi, base);
    uint64_t count = 0;
    for (uint64_t m = lo; m <= hi; ++m) {
      uint64_t p = st.pplus_of(m);
      if (p * p <= m && m % (p * p) == 0) ++count;
    }
    partial[bi] = count;
  });

  uint64_t total = 0;
  for (uint64_t c : partial) total += c;
  return total;
}

}  // namespace siftcount
