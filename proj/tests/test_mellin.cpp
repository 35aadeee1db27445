#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <rvdet/distributions.hpp>
#include <rvdet/measures.hpp>
#include <rvdet/mellin.hpp>

#include "oracles.hpp"

using namespace rvdet;
using cplx = std::complex<double>;

namespace {

// brute transform of a continuous law: integral y^(alpha+i theta) dens(y) dy
// on the log scale, split into quarter-period panels
cplx brute_transform(const Dist& d, double alpha, double theta, double lo,
                     double hi, int panels) {
  auto f = [&](double u) -> cplx {
    double y = std::exp(u);
    return std::polar(std::pow(y, alpha) * density(d, y) * y, theta * u);
  };
  return oracle::cquad(f, std::log(lo), std::log(hi), panels, 1e-13);
}

}  // namespace

TEST_CASE("eval_atoms is the plain weighted power sum", "[mellin]") {
  std::vector<Atom> atoms = {{0.5, 2.0}, {1.0, 1.0}};
  double th = M_PI / std::log(2.0);
  cplx m = eval_atoms(atoms, 1.0, th);
  // 2 * 0.5^(1+i th) + 1 = 1 + exp(-i pi) = 0
  REQUIRE(std::abs(m) < 1e-14);
  cplx m0 = eval_atoms(atoms, 1.0, 0.0);
  REQUIRE(m0.real() == Catch::Approx(2.0));
  REQUIRE(m0.imag() == 0.0);
}

TEST_CASE("catalog closed forms match brute quadrature", "[mellin]") {
  struct Case {
    Dist d;
    double alpha, lo, hi;
    int panels;
  };
  std::vector<Case> cases = {
      {Pareto{2.5}, 1.0, 1.0, 4e5, 200},
      {UniformLaw{}, 1.0, 1e-9, 1.0, 200},
      {GammaLaw{1.8, 1.1}, 1.0, 1e-9, 250.0, 200},
      {LognormalLaw{0.1, 0.9}, 1.0, 1e-7, 5e4, 200},
      {AbsCauchy{}, 0.5, 1e-12, 1e14, 1500},
      {TruncPower{0.7, 5.0, 1.2}, 1.0, 0.7, 5.0, 60},
  };
  for (const auto& c : cases) {
    for (double th : {0.0, 1.3, 7.0}) {
      auto lib = eval_catalog(c.d, c.alpha, th);
      cplx ref = brute_transform(c.d, c.alpha, th, c.lo, c.hi, c.panels);
      INFO(dist_name(c.d) << " theta=" << th);
      REQUIRE(std::abs(lib.value - ref) < 2e-6);
    }
  }
}

TEST_CASE("two-point and point-mass transforms are exact sums", "[mellin]") {
  Dist tp = TwoPoint{0.5, 0.4, 2.0, 0.6};
  auto m = eval_catalog(tp, 1.0, 2.0);
  cplx want = 0.4 * 0.5 * std::polar(1.0, 2.0 * std::log(0.5)) +
              0.6 * 2.0 * std::polar(1.0, 2.0 * std::log(2.0));
  REQUIRE(std::abs(m.value - want) < 1e-14);

  Dist pm = PointMassLaw{3.0};
  auto mp = eval_catalog(pm, 2.0, 1.0);
  REQUIRE(std::abs(mp.value - 9.0 * std::polar(1.0, std::log(3.0))) < 1e-13);
}

TEST_CASE("catalog guards divergent moments", "[mellin]") {
  REQUIRE_THROWS_AS(eval_catalog(Dist{Pareto{1.0}}, 1.0, 0.0),
                    moment_divergence_error);
  REQUIRE_THROWS_AS(eval_catalog(Dist{AbsCauchy{}}, 1.0, 0.0),
                    moment_divergence_error);
}

TEST_CASE("conjugate symmetry along the line", "[mellin]") {
  for (Dist d : {Dist{Pareto{3.0}}, Dist{GammaLaw{1.2, 2.0}},
                 Dist{TruncPower{1.0, 7.0, 1.5}}, Dist{LognormalLaw{0.0, 0.5}}}) {
    for (double th : {0.7, 4.0}) {
      auto p = eval_catalog(d, 1.0, th);
      auto n = eval_catalog(d, 1.0, -th);
      REQUIRE(std::abs(n.value - std::conj(p.value)) <
              1e-12 * (1.0 + std::abs(p.value)));
    }
  }
}

TEST_CASE("truncpower with matching exponent vanishes on a grid of thetas",
          "[mellin]") {
  // support (1, e^(2 pi)), power p = alpha: zeros at every integer theta
  double b = std::exp(2.0 * M_PI);
  Dist t = TruncPower{1.0, b, 1.0};
  for (int k : {1, 2, 5}) {
    auto m = eval_catalog(t, 1.0, double(k));
    REQUIRE(std::abs(m.value) < 1e-13);
  }
  // and is nonzero elsewhere
  REQUIRE(std::abs(eval_catalog(t, 1.0, 0.5).value) > 0.1);
}

TEST_CASE("truncpower zero confirmed by direct quadrature", "[mellin]") {
  double b = std::exp(2.0 * M_PI);
  Dist t = TruncPower{1.0, b, 1.0};
  double qerr = 0.0;
  cplx q = mellin_quad([&](double y) { return density(t, y); }, 1.0, b, 1.0,
                       1.0, 1e-10, &qerr);
  REQUIRE(std::abs(q) < 1e-6);
  cplx ref = brute_transform(t, 1.0, 1.0, 1.0, b, 60);
  REQUIRE(std::abs(ref) < 1e-6);
}

TEST_CASE("slow-variation transform via contour rotation", "[mellin]") {
  // oracle: integrate e^(i theta u) u^-2 over (1, inf) by parts twice,
  // then truncate the absolutely convergent u^-4 remainder
  auto by_parts = [](double th) -> cplx {
    cplx it(0.0, th);
    double U = 1200.0;
    int panels = int(th * U / 4.0) + 50;
    cplx i4 = oracle::cquad(
        [&](double u) -> cplx {
          return std::polar(std::pow(u, -4.0), th * u);
        },
        1.0, U, panels, 1e-12);
    cplx e1 = std::polar(1.0, th);
    cplx i3 = -e1 / it + 3.0 / it * i4;
    return -e1 / it + 2.0 / it * i3;
  };
  for (double th : {0.6, 1.0, 2.5}) {
    auto lib = eval_catalog(Dist{SlowVariationLaw{}}, 0.0, th);
    cplx ref = by_parts(th);
    INFO("theta=" << th);
    REQUIRE(std::abs(lib.value - ref) < 1e-7);
    // negative theta is the conjugate
    auto neg = eval_catalog(Dist{SlowVariationLaw{}}, 0.0, -th);
    REQUIRE(std::abs(neg.value - std::conj(lib.value)) < 1e-13);
  }
  auto at0 = eval_catalog(Dist{SlowVariationLaw{}}, 0.0, 0.0);
  REQUIRE(at0.value.real() == Catch::Approx(1.0));
}

TEST_CASE("counterexample law closed form against quadrature", "[mellin]") {
  CounterexampleSpec s;
  s.alpha = 1.0;
  s.theta0 = M_PI / std::log(2.0);
  s.a = 0.9;
  NoiseLaw law = build_noise_law(s, true);
  double alpha = 0.5;  // strictly below the tail index, absolutely convergent
  for (double th : {0.0, 1.0, law.spec.theta0}) {
    auto lib = eval_catalog(Dist{law}, alpha, th);
    auto f = [&](double u) -> cplx {
      double y = std::exp(u);
      return std::polar(std::pow(y, alpha) * law.continuous_density(y) * y,
                        th * u);
    };
    int panels = 200 + int(30.0 * th);
    cplx cont = oracle::cquad(f, std::log(2.0), 90.0, panels, 1e-13);
    cplx ref = law.atom_mass + cont;  // atom at 1 contributes its mass
    REQUIRE(std::abs(lib.value - ref) < 1e-8);
  }
}

TEST_CASE("counterexample transform at the tail index itself diverges",
          "[mellin]") {
  NoiseLaw law = build_noise_law(CounterexampleSpec{1.0, 4.0, 0.5, 0.0, 0.0});
  REQUIRE_THROWS_AS(eval_catalog(Dist{law}, 1.0, 0.0),
                    moment_divergence_error);
}

TEST_CASE("kernel transforms: closed forms and quadrature", "[mellin]") {
  // one-sided exponential, lambda = 1: 1 / (alpha + i theta)
  Kernel ou = OneSidedExpKernel{1.0};
  for (double th : {0.0, 1.0, 10.0}) {
    auto lib = eval_kernel(ou, 1.0, th);
    cplx want = 1.0 / cplx(1.0, th);
    REQUIRE(std::abs(lib.value - want) < 1e-14);
    // quadrature of f(s)^(1 + i theta) over s > 0
    int panels = 40 + int(12.0 * th);
    cplx ref = oracle::cquad(
        [&](double sarg) -> cplx {
          return std::polar(std::exp(-sarg), -th * sarg);
        },
        0.0, 70.0, panels, 1e-13);
    REQUIRE(std::abs(lib.value - ref) < 1e-8);
  }
  // two-sided doubles it
  auto two = eval_kernel(Kernel{TwoSidedExpKernel{2.0}}, 1.0, 3.0);
  REQUIRE(std::abs(two.value - 2.0 / (2.0 * cplx(1.0, 3.0))) < 1e-14);
  // step kernel reduces to the atom sum
  Kernel st = StepKernel{{{0.5, 1.0}, {1.0, 2.0}}};
  auto sv = eval_kernel(st, 1.0, 0.0);
  REQUIRE(sv.value.real() == Catch::Approx(2.5));
}

TEST_CASE("alpha_log_moment bounds the numerical derivative", "[mellin]") {
  const double h = 1e-4;
  for (Dist d : {Dist{Pareto{2.0}}, Dist{UniformLaw{}},
                 Dist{TwoPoint{0.5, 0.5, 2.0, 0.5}},
                 Dist{TruncPower{0.5, 4.0, 1.0}}}) {
    double L = alpha_log_moment(d, 1.0);
    REQUIRE(std::isfinite(L));
    for (double th : {0.0, 2.0, 9.0}) {
      cplx up = eval_catalog(d, 1.0, th + h).value;
      cplx dn = eval_catalog(d, 1.0, th - h).value;
      double deriv = std::abs(up - dn) / (2.0 * h);
      INFO(dist_name(d) << " theta=" << th);
      REQUIRE(deriv <= L * (1.0 + 1e-6) + 1e-9);
    }
  }
}

TEST_CASE("eval_measure combines atoms and ac pieces", "[mellin]") {
  SpectralMeasure m;
  m.atoms = {{1.0, 1.0}};
  // density 2 / y on (0.5, 1)
  m.ac_pieces.push_back(TruncPowerPiece{2.0, 0.0, 0.5, 1.0});
  auto v0 = eval_measure(m, 1.0, 0.0);
  // atom + integral_{0.5}^{1} y * (2/y) dy = 1 + 1
  REQUIRE(v0.value.real() == Catch::Approx(2.0).epsilon(1e-12));

  SpectralMeasure e;
  e.ac_pieces.push_back(ExpImagePiece{1.0, 1.0});
  auto ev = eval_measure(e, 1.0, 2.0);
  REQUIRE(std::abs(ev.value - 1.0 / cplx(1.0, 2.0)) < 1e-14);
}

TEST_CASE("tabulated piece quadrature matches a closed-form sibling",
          "[mellin]") {
  // same density 2 / y as TruncPowerPiece{c=2, p=0} over (0.5, 1)
  SpectralMeasure tab;
  TabulatedPiece t;
  t.a = 0.5;
  t.b = 1.0;
  t.density = [](double y) { return 2.0 / y; };
  tab.ac_pieces.push_back(t);
  SpectralMeasure closed;
  closed.ac_pieces.push_back(TruncPowerPiece{2.0, 0.0, 0.5, 1.0});
  for (double th : {0.0, 3.0, 20.0}) {
    auto a = eval_measure(tab, 1.0, th, 1e-12);
    auto b = eval_measure(closed, 1.0, th);
    REQUIRE(std::abs(a.value - b.value) < 1e-10);
  }
}

TEST_CASE("alpha_conjugate tilts to a unit-mass measure", "[mellin]") {
  Dist d = TruncPower{1.0, 4.0, 1.5};
  auto conj = alpha_conjugate(d, 1.0);
  REQUIRE(conj.norm == Catch::Approx(moment(d, 1.0)).epsilon(1e-12));
  double mass = oracle::quad(conj.density, std::log(1.0), std::log(4.0), 1e-12);
  REQUIRE(mass == Catch::Approx(1.0).epsilon(1e-9));

  auto tp = alpha_conjugate(Dist{TwoPoint{0.5, 0.5, 2.0, 0.5}}, 1.0);
  REQUIRE(tp.atomic());
  double am = 0.0;
  for (const auto& at : tp.atoms) am += at.w;
  REQUIRE(am == Catch::Approx(1.0).epsilon(1e-12));
}
