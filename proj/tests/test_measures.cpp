#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <rvdet/measures.hpp>
#include <rvdet/distributions.hpp>

#include "oracles.hpp"

using namespace rvdet;

namespace {
CounterexampleSpec canonical_spec() {
  CounterexampleSpec s;
  s.alpha = 1.0;
  s.theta0 = M_PI / std::log(2.0);  // multiplicative period 4
  s.a = 0.9;
  s.b = 0.0;
  return s;
}
}  // namespace

TEST_CASE("counterexample tail is the integral of its density", "[measures]") {
  CounterexampleSpec s = canonical_spec();
  for (double x : {2.0, 3.7, 10.0, 123.0}) {
    double y = 5.0 * x;
    double q = oracle::quad(
        [&](double t) { return counterexample_density(s, t); }, x, y, 1e-13);
    double diff = counterexample_tail(s, x) - counterexample_tail(s, y);
    REQUIRE(diff == Catch::Approx(q).margin(1e-10));
  }
}

TEST_CASE("counterexample tail scales exactly by the period", "[measures]") {
  CounterexampleSpec s = canonical_spec();
  double r = counterexample_mult_period(s);
  REQUIRE(r == Catch::Approx(4.0).epsilon(1e-14));
  for (double x : {2.0, 2.6, 5.0, 77.7, 1e6}) {
    double lhs = counterexample_tail(s, r * x);
    double rhs = counterexample_tail(s, x) / r;
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("oscillation amplitude formula matches a brute scan", "[measures]") {
  CounterexampleSpec s = canonical_spec();
  s.b = 0.2;
  s.a = 0.7;
  // x^alpha tail over one multiplicative period
  double r = counterexample_mult_period(s);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i <= 20000; ++i) {
    double x = 2.0 * std::pow(r, double(i) / 20000.0);
    double v = std::pow(x, s.alpha) * counterexample_tail(s, x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  REQUIRE(hi - lo ==
          Catch::Approx(counterexample_oscillation(s)).epsilon(1e-6));
}

TEST_CASE("frozen oscillation value for the canonical spec", "[measures]") {
  // 2 alpha sqrt(a^2+b^2) / sqrt(alpha^2 + theta0^2), alpha=1, a=0.9, b=0
  CounterexampleSpec s = canonical_spec();
  double expect = 2.0 * 0.9 / std::hypot(1.0, s.theta0);
  REQUIRE(counterexample_oscillation(s) == Catch::Approx(expect).epsilon(1e-14));
  REQUIRE(counterexample_oscillation(s) ==
          Catch::Approx(0.38781677153924417).epsilon(1e-12));
}

TEST_CASE("spec validation rejects bad parameters", "[measures]") {
  CounterexampleSpec s = canonical_spec();
  s.a = 0.9;
  s.b = 0.6;  // a^2 + b^2 > 1
  REQUIRE_THROWS_AS(validate(s), std::invalid_argument);
  s = canonical_spec();
  s.alpha = -1.0;
  REQUIRE_THROWS_AS(validate(s), std::invalid_argument);
  s = canonical_spec();
  s.theta0 = 0.0;
  REQUIRE_THROWS_AS(validate(s), std::invalid_argument);
}

TEST_CASE("build_noise_law picks the canonical cutoff", "[measures]") {
  NoiseLaw law = build_noise_law(canonical_spec(), true);
  REQUIRE(law.spec.trunc == 2.0);
  REQUIRE(law.atom_mass ==
          Catch::Approx(1.0 - counterexample_tail(law.spec, 2.0)).epsilon(1e-14));
  REQUIRE(law.atom_mass > 0.0);
  REQUIRE(law.atom_mass < 1.0);
}

TEST_CASE("noise law is a probability law", "[measures]") {
  NoiseLaw law = build_noise_law(canonical_spec(), false);
  REQUIRE(law.abs_tail(0.5) == Catch::Approx(1.0).epsilon(1e-14));
  // flat between the atom and the cutoff
  REQUIRE(law.abs_tail(1.2) == Catch::Approx(law.abs_tail(1.9)));
  // continuous mass above the cutoff plus the atom is everything
  double cont = oracle::quad(
      [&](double y) { return law.continuous_density(y); }, 2.0, 2e7, 1e-12);
  REQUIRE(cont + law.atom_mass == Catch::Approx(1.0).margin(2e-7));
  // symmetrization halves the one-sided tail
  NoiseLaw sym = build_noise_law(canonical_spec(), true);
  REQUIRE(sym.tail(10.0) == Catch::Approx(0.5 * law.tail(10.0)));
  REQUIRE(sym.oscillation_range() ==
          Catch::Approx(0.5 * law.oscillation_range()));
  REQUIRE(sym.oscillation_range() ==
          Catch::Approx(0.19390838576962208).epsilon(1e-12));
}

TEST_CASE("noise sampling matches the exact tail", "[measures][mc]") {
  NoiseLaw law = build_noise_law(canonical_spec(), true);
  const std::size_t n = 60000;
  auto xs = sample_noise(law, n, 991);
  auto xs2 = sample_noise(law, n, 991);
  REQUIRE(xs == xs2);  // bit-identical rerun
  for (double x : {1.5, 3.0, 9.0}) {
    std::size_t hits = 0;
    for (double v : xs)
      if (v > x) ++hits;
    double p = law.tail(x);
    double se = std::sqrt(p * (1.0 - p) / double(n));
    REQUIRE(std::abs(double(hits) / double(n) - p) <= 6.0 * se);
  }
}

TEST_CASE("merged_atoms folds duplicate locations", "[measures]") {
  auto m = merged_atoms({{2.0, 1.0}, {1.0, 0.5}, {2.0, 3.0}});
  REQUIRE(m.size() == 2);
  REQUIRE(m[0].x == 1.0);
  REQUIRE(m[1].x == 2.0);
  REQUIRE(m[1].w == Catch::Approx(4.0));
}

TEST_CASE("atoms_measure validates weights", "[measures]") {
  REQUIRE_THROWS_AS(atoms_measure({1.0, -0.5}), std::invalid_argument);
  REQUIRE_THROWS_AS(atoms_measure({0.0}), std::invalid_argument);
  auto m = atoms_measure({0.5, 0.5, 1.0});
  REQUIRE(m.atoms.size() == 3);
}

TEST_CASE("kernel power integrals match quadrature", "[measures]") {
  Kernel ou = OneSidedExpKernel{1.7};
  double ref = oracle::quad(
      [&](double sarg) { return std::pow(std::exp(-1.7 * sarg), 1.3); }, 0.0,
      40.0, 1e-13);
  REQUIRE(kernel_power_integral(ou, 1.3) == Catch::Approx(ref).epsilon(1e-10));

  Kernel two = TwoSidedExpKernel{0.8};
  ref = oracle::quad(
      [&](double sarg) { return std::pow(std::exp(-0.8 * std::abs(sarg)), 2.0); },
      -40.0, 40.0, 1e-13);
  REQUIRE(kernel_power_integral(two, 2.0) == Catch::Approx(ref).epsilon(1e-10));

  Kernel st = StepKernel{{{0.5, 1.0}, {2.0, 0.25}}};
  REQUIRE(kernel_power_integral(st, 2.0) ==
          Catch::Approx(0.25 * 1.0 + 4.0 * 0.25));
  REQUIRE(std::isinf(kernel_power_integral(ou, 0.0)));
}

TEST_CASE("kernel validation", "[measures]") {
  REQUIRE_THROWS_AS(validate(Kernel{StepKernel{}}), std::invalid_argument);
  REQUIRE_THROWS_AS(validate(Kernel{OneSidedExpKernel{-1.0}}),
                    std::invalid_argument);
  REQUIRE_NOTHROW(validate(Kernel{TwoSidedExpKernel{2.0}}));
}

TEST_CASE("geometric truncation keeps the stated mass", "[measures]") {
  GeometricWeights g{1.0, 0.5};
  double r = 0.5;
  std::size_t k = geometric_truncation(g, r, 1e-6);
  auto w = geometric_prefix(g, k);
  REQUIRE(w.size() == k);
  double head = 0.0;
  for (double v : w) head += std::pow(v, r);
  double total = geometric_moment(g, r);
  REQUIRE((total - head) / total <= 1e-6);
  // and one step fewer would not be enough
  double head1 = head - std::pow(w.back(), r);
  REQUIRE((total - head1) / total > 1e-6);
}
