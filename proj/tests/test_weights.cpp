#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "siftcount/weights.hpp"

using namespace siftcount;

namespace {
const PrimeTable& table_1e5() {
  static PrimeTable t = sieve_primes(100'000);
  return t;
}
}  // namespace

TEST_CASE("eval_weight basics") {
  auto unit = weight_unit_over_r();
  CHECK(eval_weight(unit, 12) == doctest::Approx(1.0 / 12).epsilon(1e-14));
  CHECK(eval_weight(unit, 1) == 1.0);

  auto phi_all = weight_one_over_phi_on(PrimeSet::all());
  CHECK(eval_weight(phi_all, 1) == 1.0);
  CHECK(oracle::phi(12) == 4);
  CHECK(eval_weight(phi_all, 12) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("weight class violation carries the offending prime power") {
  Weight bad("bad", 1.0, [](uint64_t p, uint32_t) {
    return 2.0 / static_cast<double>(p);
  });
  CHECK_THROWS_AS(bad.prime_power(2, 1), WeightClassViolation);
  try {
    bad.prime_power(5, 2);
    FAIL("expected WeightClassViolation");
  } catch (const WeightClassViolation& e) {
    CHECK(e.p == 5);
    CHECK(e.v == 2);
    CHECK(e.value == doctest::Approx(0.4));
  }
  // negative values are rejected too
  Weight neg("neg", 1.0, [](uint64_t, uint32_t) { return -0.5; });
  CHECK_THROWS_AS(neg.prime_power(3, 1), WeightClassViolation);
}

TEST_CASE("builtin weight examples") {
  auto twin = weight_twin();
  CHECK(eval_weight(twin, 5) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(eval_weight(twin, 2) == doctest::Approx(0.5).epsilon(1e-14));

  auto phi_on_2 = weight_one_over_phi_on(PrimeSet::explicit_list({2}));
  CHECK(eval_weight(phi_on_2, 3) == 0.0);

  auto ind = weight_indicator_over_r_on(PrimeSet::explicit_list({2, 3}));
  CHECK(eval_weight(ind, 6) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(eval_weight(ind, 10) == 0.0);
}

TEST_CASE("builtin weights never break their declared class bound") {
  auto sets = {PrimeSet::all(), PrimeSet::explicit_list({2, 3, 7}),
               PrimeSet::residues_mod(4, {1}), PrimeSet::complement_of({5})};
  std::mt19937 rng(12345);
  const auto& t = table_1e5();
  for (const auto& E : sets) {
    for (const auto& w : builtin_weights(E)) {
      for (int trial = 0; trial < 2000; ++trial) {
        uint64_t p = t[rng() % t.size()];
        uint32_t v = 1 + rng() % 5;
        CHECK_NOTHROW(w.prime_power(p, v));
      }
    }
  }
}

TEST_CASE("twin weight A=2 is tight exactly at p=5") {
  auto twin = weight_twin();
  // extremal factor (1-1/p)/(1-3/p) = 2 at p=5
  CHECK(twin.prime_power(5, 1) == doctest::Approx(2.0 / 5).epsilon(1e-14));
  for (uint64_t p : {5ull, 7ull, 11ull, 101ull, 99991ull}) {
    for (uint32_t v = 1; v <= 5; ++v) {
      double val = twin.prime_power(p, v);
      double cap = 2.0 / std::pow(static_cast<double>(p), v);
      CHECK(val <= cap * (1 + 1e-12));
    }
  }
}

TEST_CASE("multiplicativity on coprime pairs") {
  std::mt19937 rng(99);
  auto ws = builtin_weights(PrimeSet::explicit_list({2, 3, 5, 11}));
  ws.push_back(weight_one_over_phi_on(PrimeSet::all()));
  for (const auto& w : ws) {
    int tested = 0;
    while (tested < 300) {
      uint64_t r1 = 1 + rng() % 10'000;
      uint64_t r2 = 1 + rng() % 10'000;
      if (std::gcd(r1, r2) != 1) continue;
      ++tested;
      double lhs = eval_weight(w, r1 * r2);
      double rhs = eval_weight(w, r1) * eval_weight(w, r2);
      if (rhs == 0.0)
        CHECK(lhs == 0.0);
      else
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("big_G four-term hand sum") {
  auto t = sieve_primes(10);
  double g10 = big_G(weight_unit_over_r(), 10, t);
  CHECK(g10 == doctest::Approx(1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7)
                   .epsilon(1e-15));
}

TEST_CASE("big_G of a weight vanishing on primes is zero") {
  auto ind_none = weight_indicator_over_r_on(PrimeSet::none());
  CHECK(big_G(ind_none, 1000, table_1e5()) == 0.0);
}

TEST_CASE("big_G stabilizes near loglog x plus Mertens constant") {
  double g = big_G(weight_unit_over_r(), 100'000, table_1e5());
  double ll = std::log(std::log(100'000.0));
  CHECK(g - ll >= 0.25);
  CHECK(g - ll <= 0.28);
}

TEST_CASE("big_G is nondecreasing in x") {
  const auto& t = table_1e5();
  auto unit = weight_unit_over_r();
  double prev = 0.0;
  for (uint64_t x = 2; x <= 2000; x += 7) {
    double cur = big_G(unit, x, t);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("big_E examples") {
  const auto& t = table_1e5();
  CHECK(big_E(PrimeSet::explicit_list({3}), 10, t) ==
        doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(big_E(PrimeSet::none(), 100, t) == 0.0);

  // primes = 1 mod 4 up to 100, enumerated independently
  double expect = 0.0;
  for (uint64_t p = 2; p <= 100; ++p)
    if (oracle::is_prime(p) && p % 4 == 1) expect += 1.0 / p;
  double got = big_E(PrimeSet::residues_mod(4, {1}), 100, t);
  CHECK(got == doctest::Approx(expect).epsilon(1e-14));
  CHECK(got == doctest::Approx(1.0 / 5 + 1.0 / 13 + 1.0 / 17 + 1.0 / 29 +
                               1.0 / 37 + 1.0 / 41 + 1.0 / 53 + 1.0 / 61 +
                               1.0 / 73 + 1.0 / 89 + 1.0 / 97)
                   .epsilon(1e-14));
}

TEST_CASE("big_G of indicator weight equals big_E exactly") {
  const auto& t = table_1e5();
  for (const auto& E :
       {PrimeSet::all(), PrimeSet::explicit_list({2, 5, 11, 97}),
        PrimeSet::residues_mod(6, {1}), PrimeSet::complement_of({3})}) {
    auto ind = weight_indicator_over_r_on(E);
    for (uint64_t x : {10ull, 1000ull, 99'000ull}) {
      CHECK(big_G(ind, x, t) == big_E(E, x, t));  // bitwise equal
    }
  }
}

TEST_CASE("prime set membership rules") {
  auto mod4 = PrimeSet::residues_mod(4, {1});
  CHECK(mod4.contains(5));
  CHECK(mod4.contains(13));
  CHECK(!mod4.contains(7));
  CHECK(!mod4.contains(2));  // 2 divides 4 and residue 2 is not listed

  auto mod4with2 = PrimeSet::residues_mod(4, {1, 2});
  CHECK(mod4with2.contains(2));  // explicitly listed residue

  auto comp = PrimeSet::complement_of({2, 3});
  CHECK(!comp.contains(2));
  CHECK(comp.contains(5));

  CHECK(PrimeSet::all().contains(101));
  CHECK(!PrimeSet::none().contains(2));
  CHECK_THROWS_AS(PrimeSet::residues_mod(1, {0}), std::invalid_argument);
}

TEST_CASE("make_weight catalog lookup") {
  CHECK(make_weight("unit-over-r").class_bound() == 1.0);
  CHECK(make_weight("one-over-phi-on-qe").class_bound() == 2.0);
  CHECK(make_weight("indicator-over-r-on-qe").class_bound() == 1.0);
  CHECK(make_weight("twin-weight").class_bound() == 2.0);
  CHECK_THROWS_AS(make_weight("nope"), std::invalid_argument);
  CHECK(builtin_weight_names().size() == 4);
}

TEST_CASE("one-over-phi matches totient oracle on random r") {
  auto w = weight_one_over_phi_on(PrimeSet::all());
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    uint64_t r = 1 + rng() % 100'000;
    CHECK(eval_weight(w, r) ==
          doctest::Approx(1.0 / oracle::phi(r)).epsilon(1e-12));
  }
}
