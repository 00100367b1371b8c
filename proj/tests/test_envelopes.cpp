#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "siftcount/envelopes.hpp"

using namespace siftcount;

namespace {
const PrimeTable& table() {
  static PrimeTable t = sieve_primes(1'000'000);
  return t;
}

double naive_hr(uint64_t x, uint32_t k, double c1, double c2) {
  double lx = std::log(static_cast<double>(x));
  double fact = 1.0;
  for (uint32_t i = 2; i < k; ++i) fact *= i;
  return c1 * (x / lx) * std::pow(std::log(lx) + c2, k - 1) / fact;
}
}  // namespace

TEST_CASE("hr_envelope at k=1 is c1*x/lnx independent of c2") {
  for (double c2 : {0.0, 1.0, 7.5}) {
    double v = hr_envelope(1000, 1, 2.0, c2);
    CHECK(v == doctest::Approx(2.0 * 1000 / std::log(1000.0)).epsilon(1e-12));
  }
}

TEST_CASE("hr_envelope domain") {
  CHECK_THROWS_AS(hr_envelope(15, 1, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(hr_envelope(100, 0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hr_envelope(100, 1, 0.0, 0.0), std::invalid_argument);
  CHECK_NOTHROW(hr_envelope(16, 1, 1.0, 0.0));
}

TEST_CASE("hr_envelope matches direct evaluation at the domain floor") {
  double direct = (16.0 / std::log(16.0)) * std::log(std::log(16.0));
  CHECK(hr_envelope(16, 2, 1.0, 0.0) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("log-space evaluation agrees with the naive product") {
  for (uint64_t x : {100ull, 10'000ull, 1'000'000ull}) {
    for (uint32_t k = 1; k <= 20; ++k) {
      double a = hr_envelope(x, k, 1.3, 0.26);
      double b = naive_hr(x, k, 1.3, 0.26);
      CHECK(a == doctest::Approx(b).epsilon(1e-9));
    }
  }
}

TEST_CASE("hr ratio recurrence: env(k+1)/env(k) = (lnln x + c2)/k") {
  uint64_t x = 100'000;
  double c2 = 0.4;
  double base = std::log(std::log(static_cast<double>(x))) + c2;
  for (uint32_t k = 1; k <= 60; ++k) {
    double lhs = hr_envelope(x, k + 1, 1.0, c2) * k;
    double rhs = hr_envelope(x, k, 1.0, c2) * base;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("theorem envelope recurrence and limit") {
  uint64_t x = 1'000'000;
  double gx = 2.9, c = 1.1;
  for (uint32_t k = 1; k <= 60; ++k) {
    double lhs = theorem_envelope(x, k + 1, 1.0, 2.0, gx, c) * k;
    double rhs = theorem_envelope(x, k, 1.0, 2.0, gx, c) * (gx + c);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // factorial swamps the power: far bins vanish
  CHECK(theorem_envelope(x, 200, 1.0, 2.0, gx, c) < 1e-100);
}

TEST_CASE("theorem envelope reduces to HR shape at lambda=1") {
  uint64_t x = 50'000;
  double lnln = std::log(std::log(static_cast<double>(x)));
  for (uint32_t k = 1; k <= 12; ++k) {
    double hr = hr_envelope(x, k, 1.7, 0.3);
    double th = theorem_envelope(x, k, 1.7, 1.0, lnln, 0.3);
    CHECK(th == doctest::Approx(hr).epsilon(1e-12));
  }
}

TEST_CASE("theorem envelope pinned value") {
  double gphi = big_G(weight_one_over_phi_on(PrimeSet::all()), 1'000'000,
                      table());
  CHECK(gphi == doctest::Approx(3.66048470084174).epsilon(1e-12));
  double v = theorem_envelope(1'000'000, 3, 1.0, 2.0, gphi, 1.0);
  CHECK(v > 0.0);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(56898.1701201536).epsilon(1e-9));
  CHECK_THROWS_AS(theorem_envelope(2, 1, 1.0, 1.0, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("fit on a single populated bin tie-breaks to c=0") {
  CountHistogram one;
  one.x = 1000;
  one.counts = {0, 42};
  auto fit = fit_constants(one, EnvelopeParams::Kind::HR);
  CHECK(fit.params.c2 == 0.0);
  CHECK(fit.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.argmax_k == 1);
}

TEST_CASE("fit rejects a histogram with no k >= 1 mass") {
  CountHistogram empty;
  empty.x = 1000;
  empty.counts = {5};  // only the k=0 bin
  CHECK_THROWS_AS(fit_constants(empty, EnvelopeParams::Kind::HR),
                  std::invalid_argument);
}

TEST_CASE("fitted envelope is tight and sound") {
  auto hist = count_histogram(SiftedFamily::all_integers(), 100'000, table());
  auto fit = fit_constants(hist, EnvelopeParams::Kind::HR);
  CHECK(fit.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.max_ratio <= 1.0 + 1e-12);
  for (auto [k, ratio] : fit.per_k_ratios) {
    CHECK(ratio <= 1.0 + 1e-12);
    CHECK(hist.counts[k] <=
          envelope_value(fit.params, hist.x, k) * (1 + 1e-12));
  }
  // the k=0 bin is never part of the fit
  CHECK(fit.per_k_ratios.count(0) == 0);
}

TEST_CASE("fitted constants transfer one decade up") {
  auto h4 = count_histogram(SiftedFamily::all_integers(), 10'000, table());
  auto h5 = count_histogram(SiftedFamily::all_integers(), 100'000, table());
  auto fit = fit_constants(h4, EnvelopeParams::Kind::HR);
  auto eval = evaluate_envelope(fit.params, h5);
  CHECK(eval.max_ratio > 0.5);
  CHECK(eval.max_ratio <= 1.2);
}

TEST_CASE("theorem-kind fit is sound too") {
  auto shifted = SiftedFamily::shifted_primes(-1);
  auto hist = count_histogram(shifted, 100'000, table());
  double gx = big_G(weight_one_over_phi_on(PrimeSet::all()), 100'000, table());
  auto fit = fit_constants(hist, EnvelopeParams::Kind::Theorem, 2.0, gx);
  CHECK(fit.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
  for (auto [k, ratio] : fit.per_k_ratios) CHECK(ratio <= 1.0 + 1e-12);
  CHECK(fit.params.b > 0.0);
}

TEST_CASE("sieve condition for the unrestricted family: lhs is pi(x/r)") {
  const uint64_t x = 10'000;
  auto F = SiftedFamily::all_integers();
  auto g = weight_unit_over_r();
  auto res = check_sieve_condition(F, g, 1.0, x, table());
  REQUIRE(res.feasible);

  // independent recomputation of B* from pi counts
  double expect = 0.0;
  uint64_t expect_r = 0;
  for (uint64_t r = 1; r <= x; ++r) {
    uint64_t lhs = table().count_leq(x / r);
    if (lhs == 0) continue;
    double ratio = static_cast<double>(lhs) *
                   std::pow(std::log(2.0 * x / r), 1.0) /
                   (static_cast<double>(x) * (1.0 / static_cast<double>(r)));
    if (ratio > expect) {
      expect = ratio;
      expect_r = r;
    }
  }
  CHECK(res.b_star == doctest::Approx(expect).epsilon(1e-12));
  CHECK(res.argmax_r == expect_r);
  CHECK(res.b_star == doctest::Approx(1.53094881178717).epsilon(1e-9));
  CHECK(res.argmax_r == 526);
  CHECK(verify_sieve_bound(F, g, 1.0, x, table(), res.b_star));
  CHECK(!verify_sieve_bound(F, g, 1.0, x, table(), res.b_star * 0.99));
}

TEST_CASE("sieve condition pinned values for restricted families") {
  auto E = PrimeSet::explicit_list({2, 3});
  auto qe = check_sieve_condition(SiftedFamily::qe(E),
                                  weight_indicator_over_r_on(E), 1.0, 10'000,
                                  table());
  REQUIRE(qe.feasible);
  CHECK(qe.b_star == doctest::Approx(1.15101908476021).epsilon(1e-9));

  auto twin = check_sieve_condition(SiftedFamily::twin_middles(),
                                    weight_twin(), 3.0, 10'000, table());
  REQUIRE(twin.feasible);
  CHECK(twin.b_star == doctest::Approx(1.5145932427906).epsilon(1e-9));
  CHECK(twin.argmax_r == 6);
  CHECK(verify_sieve_bound(SiftedFamily::twin_middles(), weight_twin(), 3.0,
                           10'000, table(), twin.b_star));
}

TEST_CASE("sieve condition reports infeasible weights with the offending r") {
  // members of Q({2,3}) exist at r=3 but the weight vanishes there
  auto F = SiftedFamily::qe(PrimeSet::explicit_list({2, 3}));
  auto g = weight_indicator_over_r_on(PrimeSet::explicit_list({2}));
  auto res = check_sieve_condition(F, g, 1.0, 10'000, table());
  CHECK(!res.feasible);
  CHECK(res.infeasible_r == 3);
  CHECK(res.infeasible_lhs > 0);
}

TEST_CASE("sieve condition scan is deterministic under parallelism") {
  auto F = SiftedFamily::twin_middles();
  auto g = weight_twin();
  auto seq = check_sieve_condition(F, g, 3.0, 20'000, table());
  SieveConfig par;
  par.parallel = true;
  auto parallel = check_sieve_condition(F, g, 3.0, 20'000, table(), par);
  CHECK(seq.b_star == parallel.b_star);
  CHECK(seq.argmax_r == parallel.argmax_r);
  REQUIRE(seq.worst.size() == parallel.worst.size());
  for (size_t i = 0; i < seq.worst.size(); ++i) {
    CHECK(seq.worst[i].r == parallel.worst[i].r);
    CHECK(seq.worst[i].ratio == parallel.worst[i].ratio);
  }
}

TEST_CASE("sieve condition preconditions") {
  auto F = SiftedFamily::all_integers();
  auto g = weight_unit_over_r();
  CHECK_THROWS_AS(check_sieve_condition(F, g, 1.0, 2'000'000, table()),
                  std::invalid_argument);
}
