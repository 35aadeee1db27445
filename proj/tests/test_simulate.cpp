#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <rvdet/simulate.hpp>

#include "oracles.hpp"

using namespace rvdet;

namespace {

// closed-form P(w1 Z1 + w2 Z2 > x) for iid standard Pareto(1) factors,
// valid for x > w1 + w2; derived by partial fractions from
// w1 * int_1^{z*} dz / ((x - w2 z) z^2) + 1/z*, z* = (x - w1)/w2
double pareto1_sum2_tail(double w1, double w2, double x) {
  double zs = (x - w1) / w2;
  double A = w2 / (x * x), B = 1.0 / x, Cw = w2 / (x * x);
  auto F = [&](double z) {
    return A * std::log(z) - B / z - Cw * std::log(x - w2 * z);
  };
  return w1 * (F(zs) - F(1.0)) + 1.0 / zs;
}

NoiseLaw canonical_noise() {
  CounterexampleSpec s;
  s.alpha = 1.0;
  s.theta0 = M_PI / std::log(2.0);
  s.a = 0.9;
  s.b = 0.0;
  return build_noise_law(s);
}

}  // namespace

TEST_CASE("chunked sampling is bit-identical across reruns and prefixes",
          "[simulate]") {
  Dist par = Pareto{1.5};
  auto a = sample_weighted_sum({1.0, 0.5}, par, 4000, 99);
  auto b = sample_weighted_sum({1.0, 0.5}, par, 4000, 99);
  REQUIRE(a == b);

  // a longer run with the same seed extends the shorter one
  auto c = sample_weighted_sum({1.0, 0.5}, par, 9000, 99);
  REQUIRE(std::equal(a.begin(), a.end(), c.begin()));

  auto d = sample_weighted_sum({1.0, 0.5}, par, 4000, 100);
  REQUIRE(a != d);

  // products consume two draws per sample; prefix stability must still hold
  auto p1 = sample_product(UniformLaw{}, par, 500, 7);
  auto p2 = sample_product(UniformLaw{}, par, 1500, 7);
  REQUIRE(std::equal(p1.begin(), p1.end(), p2.begin()));
}

TEST_CASE("empirical tail and its standard error", "[simulate]") {
  std::vector<double> s = {1.0, 2.0, 3.0, 4.0, 5.0};
  REQUIRE(empirical_tail(s, 2.5) == 0.6);
  REQUIRE(empirical_tail(s, 2.0) == 0.6);  // strictly greater than
  REQUIRE(empirical_tail(s, 5.0) == 0.0);
  REQUIRE(empirical_tail(s, 0.0) == 1.0);
  REQUIRE(tail_se(0.0, 100) == 0.0);
  REQUIRE(tail_se(0.5, 100) == Catch::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("threshold grid doubles from the 90th percentile", "[simulate]") {
  // deterministic Pareto(1) quantile grid, no sampling noise
  std::size_t n = 200000;
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i)
    sorted[i] = 1.0 / (1.0 - (double(i) + 0.5) / double(n));
  auto xs = threshold_grid(sorted);
  REQUIRE(xs.size() >= 5);
  REQUIRE(xs[0] == sorted[(n * 9) / 10]);
  for (std::size_t i = 1; i < xs.size(); ++i)
    REQUIRE(xs[i] == 2.0 * xs[i - 1]);
  for (double x : xs)
    REQUIRE(empirical_tail(sorted, x) * double(n) >= 100.0);
  REQUIRE(empirical_tail(sorted, 2.0 * xs.back()) * double(n) < 100.0);

  REQUIRE(threshold_grid({}).empty());
}

TEST_CASE("tail index fit recovers the exact quantile slope", "[simulate]") {
  std::size_t n = 200000;
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i)
    sorted[i] = 1.0 / (1.0 - (double(i) + 0.5) / double(n));
  auto fit = fit_tail_index(sorted);
  REQUIRE(fit.has_value());
  REQUIRE(fit->points == 9);
  REQUIRE(fit->index == Catch::Approx(1.0).margin(0.03));
  REQUIRE(std::abs(fit->intercept) < 0.1);

  std::vector<double> tiny(sorted.begin(), sorted.begin() + 500);
  REQUIRE_FALSE(fit_tail_index(tiny).has_value());
}

TEST_CASE("two-term sum tail quadrature matches the closed form",
          "[simulate]") {
  Dist par = Pareto{1.0};
  struct Case {
    double w1, w2, x, frozen;
  };
  // frozen values recomputed independently at 30 digits
  for (const auto& c : std::vector<Case>{
           {1.0, 0.5, 50.0, 0.031697388029649043},
           {1.0, 1.0, 10.0, 0.24394449154672439},
           {2.0, 1.0, 30.0, 0.11334745146578163},
           {1.0, 0.5, 7.0, 0.25874192680295502}}) {
    double got = exact_sum2_tail(c.w1, c.w2, par, c.x);
    REQUIRE(got == Catch::Approx(pareto1_sum2_tail(c.w1, c.w2, c.x))
                       .epsilon(1e-9));
    REQUIRE(got == Catch::Approx(c.frozen).epsilon(1e-9));
  }
  // below the joint minimum the tail is certain
  REQUIRE(exact_sum2_tail(1.0, 1.0, par, 1.5) == 1.0);
}

TEST_CASE("product tail oracle handles atoms and densities", "[simulate]") {
  // uniform light factor: P(YZ > x) = 1/(2x) for x >= 1
  Dist unit = UniformLaw{};
  Dist par = Pareto{1.0};
  for (double x : {1.5, 2.0, 64.0, 1000.0})
    REQUIRE(exact_product_tail(unit, par, x) ==
            Catch::Approx(0.5 / x).epsilon(1e-9));

  // two-point light factor against a heavier Pareto
  Dist two = TwoPoint{1.0, 0.3, 2.0, 0.7};
  Dist par15 = Pareto{1.5};
  double x = 30.0;
  double want = 0.3 * std::pow(x, -1.5) + 0.7 * std::pow(x / 2.0, -1.5);
  REQUIRE(exact_product_tail(two, par15, x) ==
          Catch::Approx(want).epsilon(1e-12));
}

TEST_CASE("weighted sum report carries the power-sum target", "[simulate]") {
  Dist par = Pareto{1.0};
  std::vector<double> samples;
  auto rep = verify_weighted_sum({1.0, 0.5}, par, 1.0, 200000, 20090401,
                                 &samples);
  REQUIRE(rep.op == "weighted-sum");
  REQUIRE(rep.target_ratio == Catch::Approx(1.5).epsilon(1e-15));
  REQUIRE(rep.n == 200000);
  REQUIRE(samples.size() == 200000);
  REQUIRE(std::is_sorted(samples.begin(), samples.end()));
  REQUIRE_FALSE(rep.points.empty());
  REQUIRE(rep.fit.has_value());
  REQUIRE(rep.fit->index == Catch::Approx(1.0).margin(0.25));

  // the sampler must reproduce the exact quadrature tail at moderate x
  SimContext ctx;
  ctx.op = rep.op;
  ctx.weights = {1.0, 0.5};
  ctx.noise = par;
  ctx.alpha = 1.0;
  ctx.sorted = &samples;
  ScenarioCheck ck;
  ck.type = "mc_vs_exact";
  ck.x = 50.0;
  ck.k_se = 4.0;
  auto out = evaluate_check(ck, rep, ctx);
  REQUIRE(out.pass);
  REQUIRE(out.lo <= 0.031697388);
  REQUIRE(out.hi >= 0.031697388);

  // identical rerun, identical report
  auto rep2 = verify_weighted_sum({1.0, 0.5}, par, 1.0, 200000, 20090401);
  REQUIRE(rep.points.size() == rep2.points.size());
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    REQUIRE(rep.points[i].x == rep2.points[i].x);
    REQUIRE(rep.points[i].tail == rep2.points[i].tail);
    REQUIRE(rep.points[i].ratio == rep2.points[i].ratio);
  }

  REQUIRE_THROWS_AS(verify_weighted_sum({1.0, -0.5}, par, 1.0, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("finite-level sum ratio exceeds its asymptote at x=50",
          "[simulate]") {
  // the limit ratio for weights (1, 0.5) at alpha=1 is 1.5, but the exact
  // finite-level ratio at x=50 is already 1.5849; a tight Monte Carlo band
  // around 1.5 at large n therefore cannot cover the truth
  double exact = exact_sum2_tail(1.0, 0.5, Pareto{1.0}, 50.0);
  REQUIRE(50.0 * exact == Catch::Approx(1.5848694).epsilon(1e-6));
  double se_1m = tail_se(exact, 1000000);
  REQUIRE(50.0 * exact - 1.5 > 3.0 * 50.0 * se_1m);
}

TEST_CASE("product report uses the light-factor moment as target",
          "[simulate]") {
  Dist unit = UniformLaw{};
  Dist par = Pareto{1.0};
  std::vector<double> samples;
  auto rep = verify_product(unit, par, 1.0, 200000, 20090401, &samples);
  REQUIRE(rep.op == "product");
  REQUIRE(rep.target_ratio == Catch::Approx(0.5).epsilon(1e-12));

  SimContext ctx;
  ctx.op = "product";
  ctx.factor_y = unit;
  ctx.factor_z = par;
  ctx.alpha = 1.0;
  ctx.sorted = &samples;

  ScenarioCheck ck;
  ck.type = "mc_vs_exact";
  ck.x = 20.0;
  ck.k_se = 4.0;
  REQUIRE(evaluate_check(ck, rep, ctx).pass);

  ck.type = "mc_ratio";
  ck.x = 20.0;
  ck.target = 0.5;
  REQUIRE(evaluate_check(ck, rep, ctx).pass);

  ck.type = "fitted_index";
  ck.target = 1.0;
  ck.tol = 0.25;
  REQUIRE(evaluate_check(ck, rep, ctx).pass);

  // exact_ratio at a point where the finite-level ratio equals the limit
  ck.type = "exact_ratio";
  ck.x = 20.0;
  ck.target = 0.5;
  ck.tol = 1e-9;
  auto out = evaluate_check(ck, rep, ctx);
  REQUIRE(out.pass);
  REQUIRE(out.value == Catch::Approx(0.5).epsilon(1e-9));

  // a heavy light-factor must be rejected up front
  REQUIRE_THROWS_AS(verify_product(par, unit, 1.0, 10, 1),
                    moment_divergence_error);
}

TEST_CASE("integral report guards the kernel horizon", "[simulate]") {
  LevyModel levy;
  levy.jump_law = Pareto{1.0};
  levy.intensity = 1.0;
  Kernel slow = OneSidedExpKernel{1.0};
  REQUIRE_THROWS_AS(verify_integral(slow, levy, 1.0, 2.0, 10, 1),
                    std::invalid_argument);

  std::vector<double> samples;
  auto rep = verify_integral(slow, levy, 1.0, 12.0, 200000, 20090401,
                             &samples);
  REQUIRE(rep.horizon_truncation.has_value());
  REQUIRE(*rep.horizon_truncation < 1e-4);
  REQUIRE(rep.target_ratio == Catch::Approx(1.0).epsilon(1e-12));

  SimContext ctx;
  ctx.op = "integral";
  ctx.noise = levy.jump_law;
  ctx.rate = levy.intensity;
  ctx.alpha = 1.0;
  ctx.sorted = &samples;
  ScenarioCheck ck;
  ck.type = "mc_ratio";
  ck.x = 150.0;
  ck.target = 1.0;
  ck.k_se = 4.0;
  auto out = evaluate_check(ck, rep, ctx);
  REQUIRE(out.pass);
  REQUIRE(out.value == Catch::Approx(1.0).margin(0.15));

  // a step kernel shorter than the horizon samples exactly
  Kernel step = StepKernel{{{1.0, 1.0}}};
  REQUIRE_THROWS_AS(verify_integral(step, levy, 1.0, 0.5, 10, 1),
                    std::invalid_argument);
  auto rep2 = verify_integral(step, levy, 1.0, 1.0, 100000, 20090401);
  REQUIRE(*rep2.horizon_truncation == 0.0);
}

TEST_CASE("slowly varying sums use the deterministic grid for q<=2",
          "[simulate]") {
  Dist slow = SlowVariationLaw{};

  auto rep1 = verify_slow_variation_sum(1, slow, 0, 0);
  REQUIRE(rep1.points.size() == 15);
  for (const auto& pt : rep1.points) {
    REQUIRE(pt.se == 0.0);
    REQUIRE(pt.ratio == 1.0);
  }

  auto rep2 = verify_slow_variation_sum(2, slow, 0, 0);
  REQUIRE(rep2.points.size() == 15);
  REQUIRE(rep2.target_ratio == 0.5);
  for (const auto& pt : rep2.points) {
    REQUIRE(pt.se == 0.0);
    REQUIRE(pt.ratio > 1.0 / 3.0);
    REQUIRE(pt.ratio < 1.0);
  }
  // the single-term share drifts down toward 1/2 as x grows
  REQUIRE(rep2.points.front().ratio > rep2.points.back().ratio);
  REQUIRE(rep2.points.back().ratio == Catch::Approx(0.5).margin(0.06));

  // non-slowly-varying noise is refused, not silently passed
  auto repx = verify_slow_variation_sum(2, Pareto{1.0}, 0, 0);
  REQUIRE_FALSE(repx.pass());
  REQUIRE(repx.checks.size() == 1);
  REQUIRE(repx.checks[0].name == "applicable");

  REQUIRE_THROWS_AS(verify_slow_variation_sum(0, slow, 0, 0),
                    std::invalid_argument);
}

TEST_CASE("filtered counterexample tail scales as a pure power",
          "[simulate]") {
  NoiseLaw nl = canonical_noise();
  Dist noise = nl;
  SimContext ctx;
  ctx.op = "weighted-sum";
  ctx.weights = {1.0, 2.0};
  ctx.noise = noise;
  ctx.alpha = 1.0;
  ctx.seed = 20090401;

  TailReport rep;
  ScenarioCheck ck;
  ck.type = "scaling_identity";
  ck.factor = 4.0;
  ck.count = 100;
  ck.tol = 1e-12;
  auto out = evaluate_check(ck, rep, ctx);
  REQUIRE(out.pass);
  REQUIRE(out.value < 1e-12);

  // the identity is specific to the lattice period; factor 3 breaks it
  ck.factor = 3.0;
  ck.tol = 1e-12;
  REQUIRE_FALSE(evaluate_check(ck, rep, ctx).pass);
}

TEST_CASE("oscillation range survives into the report and its check",
          "[simulate]") {
  Dist noise = canonical_noise();
  auto rep = verify_weighted_sum({1.0}, noise, 1.0, 1000, 7);
  REQUIRE(rep.oscillation.has_value());
  // symmetrizing splits the mass over both signs and halves the range
  REQUIRE(*rep.oscillation ==
          Catch::Approx(0.19390838576962208).epsilon(1e-12));

  SimContext ctx;
  ScenarioCheck ck;
  ck.type = "oscillation_range";
  ck.lo = 0.1;
  auto out = evaluate_check(ck, rep, ctx);
  REQUIRE(out.pass);
  REQUIRE(out.value == *rep.oscillation);
}

TEST_CASE("check evaluation rejects malformed requests", "[simulate]") {
  TailReport rep;
  SimContext ctx;
  ctx.op = "weighted-sum";
  ScenarioCheck ck;
  ck.type = "mc_ratio";
  REQUIRE_THROWS_AS(evaluate_check(ck, rep, ctx), std::invalid_argument);
  ck.type = "no-such-check";
  REQUIRE_THROWS_AS(evaluate_check(ck, rep, ctx), std::invalid_argument);

  // fitted_index without a fit fails closed
  ck.type = "fitted_index";
  ck.target = 1.0;
  ck.tol = 10.0;
  REQUIRE_FALSE(evaluate_check(ck, rep, ctx).pass);
}
