#include "siftcount/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "siftcount/util.hpp"

namespace siftcount {

double hr_envelope(uint64_t x, uint32_t k, double c1, double c2) {
  if (x < 16)
    throw std::domain_error("hr_envelope: x must be >= 16 so lnln x > 0");
  if (k < 1) throw std::invalid_argument("hr_envelope: k must be >= 1");
  if (c1 <= 0.0 || c2 < 0.0)
    throw std::invalid_argument("hr_envelope: need c1 > 0 and c2 >= 0");
  double lx = std::log(static_cast<double>(x));
  double base = std::log(lx) + c2;
  double log_val = std::log(c1) + std::log(static_cast<double>(x)) -
                   std::log(lx) - std::lgamma(k);
  if (k > 1) log_val += (k - 1) * std::log(base);
  return std::exp(log_val);
}

double theorem_envelope(uint64_t x, uint32_t k, double b, double lambda,
                        double gx, double c) {
  if (x < 3) throw std::invalid_argument("theorem_envelope: x must be >= 3");
  if (k < 1) throw std::invalid_argument("theorem_envelope: k must be >= 1");
  if (b <= 0.0 || c < 0.0 || gx < 0.0 || lambda <= 0.0)
    throw std::invalid_argument(
        "theorem_envelope: need b > 0, lambda > 0, c >= 0, gx >= 0");
  double base = gx + c;
  if (k > 1 && base == 0.0) return 0.0;
  double lx = std::log(static_cast<double>(x));
  double log_val = std::log(b) + std::log(static_cast<double>(x)) -
                   lambda * std::log(lx) - std::lgamma(k);
  if (k > 1) log_val += (k - 1) * std::log(base);
  return std::exp(log_val);
}

double envelope_value(const EnvelopeParams& params, uint64_t x, uint32_t k,
                      double gx) {
  if (params.kind == EnvelopeParams::Kind::HR)
    return hr_envelope(x, k, params.c1, params.c2);
  return theorem_envelope(x, k, params.b, params.lambda, gx, params.c);
}

namespace {

constexpr double kGridStep = 0.01;
constexpr int kGridPoints = 1001;  // constants scanned over [0, 10]

std::vector<std::pair<uint32_t, uint64_t>> populated_bins(
    const CountHistogram& hist) {
  std::vector<std::pair<uint32_t, uint64_t>> bins;
  for (uint32_t k = 1; k < hist.counts.size(); ++k)
    if (hist.counts[k] > 0) bins.emplace_back(k, hist.counts[k]);
  if (bins.empty())
    throw std::invalid_argument(
        "fit_constants: histogram has no populated k >= 1 bin");
  return bins;
}

}  // namespace

FitResult fit_constants(const CountHistogram& hist, EnvelopeParams::Kind kind,
                        double lambda, double gx) {
  auto bins = populated_bins(hist);
  uint64_t x = hist.x;

  auto unit_envelope = [&](uint32_t k, double cgrid) {
    return kind == EnvelopeParams::Kind::HR
               ? hr_envelope(x, k, 1.0, cgrid)
               : theorem_envelope(x, k, 1.0, lambda, gx, cgrid);
  };

  double best_spread = 0.0;
  double best_c = 0.0;
  double best_tight = 0.0;
  bool have_best = false;
  for (int i = 0; i < kGridPoints; ++i) {
    double cgrid = i * kGridStep;
    double max_r = 0.0, min_r = 0.0;
    bool first = true;
    for (auto [k, nk] : bins) {
      double ratio = static_cast<double>(nk) / unit_envelope(k, cgrid);
      if (first) {
        max_r = min_r = ratio;
        first = false;
      } else {
        max_r = std::max(max_r, ratio);
        min_r = std::min(min_r, ratio);
      }
    }
    double spread = max_r / min_r;
    if (!have_best || spread < best_spread) {
      have_best = true;
      best_spread = spread;
      best_c = cgrid;
      best_tight = max_r;
    }
  }

  FitResult out;
  out.params.kind = kind;
  out.params.lambda = lambda;
  if (kind == EnvelopeParams::Kind::HR) {
    out.params.c1 = best_tight;
    out.params.c2 = best_c;
  } else {
    out.params.b = best_tight;
    out.params.c = best_c;
  }

  for (auto [k, nk] : bins) {
    double ratio =
        static_cast<double>(nk) / envelope_value(out.params, x, k, gx);
    out.per_k_ratios[k] = ratio;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_k = k;
    }
  }
  return out;
}

FitResult evaluate_envelope(const EnvelopeParams& params,
                            const CountHistogram& hist, double gx) {
  auto bins = populated_bins(hist);
  FitResult out;
  out.params = params;
  for (auto [k, nk] : bins) {
    double ratio =
        static_cast<double>(nk) / envelope_value(params, hist.x, k, gx);
    out.per_k_ratios[k] = ratio;
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.argmax_k = k;
    }
  }
  return out;
}

namespace {

constexpr uint64_t kSieveCheckCap = 1'000'000;

struct ScanBlock {
  double b_star = 0.0;
  uint64_t argmax_r = 0;
  bool infeasible = false;
  uint64_t infeasible_r = 0;
  uint64_t infeasible_lhs = 0;
  std::vector<SieveCheckRow> rows;  // local top rows, ratio descending
};

void keep_top(std::vector<SieveCheckRow>& rows, const SieveCheckRow& row,
              size_t cap) {
  rows.push_back(row);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.ratio != b.ratio ? a.ratio > b.ratio : a.r < b.r;
  });
  if (rows.size() > cap) rows.resize(cap);
}

}  // namespace

SieveCheckResult check_sieve_condition(const SiftedFamily& F, const Weight& g,
                                       double lambda, uint64_t x,
                                       const PrimeTable& primes,
                                       const SieveConfig& cfg) {
  uint64_t s = F.s();
  if (x > kSieveCheckCap)
    throw std::invalid_argument(
        "check_sieve_condition: x capped at 1e6 (the scan is quadratic-ish)");
  if (x < s) throw std::invalid_argument("check_sieve_condition: x below s");
  uint64_t r_max = x / s;
  if (primes.limit() < x / s)
    throw std::invalid_argument(
        "check_sieve_condition: prime table must cover x/s");

  double xd = static_cast<double>(x);
  auto row_for = [&](uint64_t r) {
    SieveCheckRow row;
    row.r = r;
    uint64_t q_max = x / (r * s);
    if (q_max >= 2) {
      uint64_t lhs = 0;
      primes.for_each_in(2, q_max, [&](uint64_t q) {
        if (F.member(q * r * s)) ++lhs;
      });
      row.lhs = lhs;
    }
    row.g_r = eval_weight(g, r);
    if (row.lhs > 0 && row.g_r > 0.0) {
      double log_term = std::log(2.0 * xd / (static_cast<double>(r) *
                                             static_cast<double>(s)));
      row.ratio = static_cast<double>(row.lhs) * std::pow(log_term, lambda) /
                  (xd * row.g_r);
    }
    return row;
  };

  uint64_t block = 4096;
  uint64_t n_blocks = (r_max - 1) / block + 1;
  std::vector<ScanBlock> slots(n_blocks);
  parallel_tasks(n_blocks, cfg.parallel ? cfg.threads : 1, [&](uint64_t bi) {
    ScanBlock& out = slots[bi];
    uint64_t r_lo = 1 + bi * block;
    uint64_t r_hi = std::min(r_max, r_lo + block - 1);
    for (uint64_t r = r_lo; r <= r_hi; ++r) {
      SieveCheckRow row = row_for(r);
      if (row.lhs > 0 && row.g_r == 0.0) {
        if (!out.infeasible) {
          out.infeasible = true;
          out.infeasible_r = r;
          out.infeasible_lhs = row.lhs;
        }
        continue;
      }
      if (row.lhs == 0) continue;
      if (row.ratio > out.b_star) {
        out.b_star = row.ratio;
        out.argmax_r = r;
      }
      keep_top(out.rows, row, 16);
    }
  });

  SieveCheckResult result;
  result.r_max = r_max;
  for (const ScanBlock& blk : slots) {
    if (blk.infeasible && (result.feasible ||
                           blk.infeasible_r < result.infeasible_r)) {
      result.feasible = false;
      result.infeasible_r = blk.infeasible_r;
      result.infeasible_lhs = blk.infeasible_lhs;
    }
    if (blk.b_star > result.b_star) {
      result.b_star = blk.b_star;
      result.argmax_r = blk.argmax_r;
    }
    for (const auto& row : blk.rows) keep_top(result.worst, row, 16);
  }
  if (!result.feasible) {
    result.b_star = 0.0;
    result.argmax_r = 0;
    result.worst.clear();
  }
  return result;
}

bool verify_sieve_bound(const SiftedFamily& F, const Weight& g, double lambda,
                        uint64_t x, const PrimeTable& primes, double b_star) {
  uint64_t s = F.s();
  uint64_t r_max = x / s;
  double xd = static_cast<double>(x);
  for (uint64_t r = 1; r <= r_max; ++r) {
    uint64_t q_max = x / (r * s);
    uint64_t lhs = 0;
    if (q_max >= 2) {
      primes.for_each_in(2, q_max, [&](uint64_t q) {
        if (F.member(q * r * s)) ++lhs;
      });
    }
    if (lhs == 0) continue;
    double g_r = eval_weight(g, r);
    if (g_r == 0.0) return false;
    double log_term = std::log(2.0 * xd / (static_cast<double>(r) *
                                           static_cast<double>(s)));
    double ratio = static_cast<double>(lhs) * std::pow(log_term, lambda) /
                   (xd * g_r);
    if (ratio > b_star) return false;
  }
  return true;
}

}  // namespace siftcount
