#pragma once

// Catalog of positive noise/factor laws with exact tails, moments and (where
// available) closed-form transforms along the vertical line Re = alpha.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rvdet/lgamma.hpp"
#include "rvdet/measures.hpp"
#include "rvdet/numerics.hpp"
#include "rvdet/rng.hpp"

namespace rvdet {

using cd = std::complex<double>;

// y^s for y > 0 and complex s, via polar form
inline cd cpow_pos(double y, double re, double im) {
  double ly = std::log(y);
  return std::polar(std::exp(re * ly), im * ly);
}

struct Pareto {
  double p = 1.0;  // density p x^(-p-1) on (1, inf)
};

struct UniformLaw {};  // uniform on (0,1)

struct GammaLaw {
  double shape = 1.0;
  double rate = 1.0;
};

struct LognormalLaw {
  double m = 0.0;
  double sigma = 1.0;
};

struct AbsCauchy {};  // |standard Cauchy|, density 2/(pi (1+x^2)) on (0, inf)

struct TwoPoint {
  double x1 = 1.0, w1 = 0.5;
  double x2 = 2.0, w2 = 0.5;
};

// density c x^(-p-1) on (a, b), normalized to mass 1
struct TruncPower {
  double a = 1.0;
  double b = 2.0;
  double p = 1.0;

  double norm() const {
    if (p == 0.0) return 1.0 / std::log(b / a);
    return p / (std::pow(a, -p) - std::pow(b, -p));
  }
};

struct SlowVariationLaw {};  // tail min(1, 1/log x); support [e, inf)

struct PointMassLaw {
  double c = 1.0;
};

using Dist = std::variant<Pareto, UniformLaw, GammaLaw, LognormalLaw, AbsCauchy,
                          TwoPoint, TruncPower, SlowVariationLaw, PointMassLaw,
                          NoiseLaw>;

inline void validate(const Dist& d) {
  std::visit(
      overloaded{
          [](const Pareto& x) {
            if (!(x.p > 0)) throw std::invalid_argument("pareto: index must be > 0");
          },
          [](const UniformLaw&) {},
          [](const GammaLaw& g) {
            if (!(g.shape > 0) || !(g.rate > 0))
              throw std::invalid_argument("gamma: shape and rate must be > 0");
          },
          [](const LognormalLaw& l) {
            if (!(l.sigma > 0))
              throw std::invalid_argument("lognormal: sigma must be > 0");
          },
          [](const AbsCauchy&) {},
          [](const TwoPoint& t) {
            if (!(t.x1 > 0) || !(t.x2 > 0) || t.x1 == t.x2)
              throw std::invalid_argument("two-point: need distinct positive points");
            if (!(t.w1 > 0) || !(t.w2 > 0) || std::abs(t.w1 + t.w2 - 1.0) > 1e-9)
              throw std::invalid_argument("two-point: weights must be positive and sum to 1");
          },
          [](const TruncPower& t) {
            if (!(t.a > 0) || !(t.b > t.a) || std::isinf(t.b))
              throw std::invalid_argument("truncated power: need 0 < a < b < inf");
          },
          [](const SlowVariationLaw&) {},
          [](const PointMassLaw& p) {
            if (!(p.c > 0)) throw std::invalid_argument("point mass: point must be > 0");
          },
          [](const NoiseLaw& n) { validate(n.spec); }},
      d);
}

// P(Y > x) for x > 0
inline double tail(const Dist& d, double x) {
  return std::visit(
      overloaded{
          [&](const Pareto& pr) { return x <= 1.0 ? 1.0 : std::pow(x, -pr.p); },
          [&](const UniformLaw&) {
            return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x);
          },
          [&](const GammaLaw& g) {
            if (x <= 0) return 1.0;
            // upper tail by quadrature of the density; accurate enough for
            // reporting (sampling and transforms use closed forms)
            double fx = integrate(
                [&](double t) {
                  return std::exp(g.shape * std::log(g.rate) +
                                  (g.shape - 1.0) * std::log(t) - g.rate * t -
                                  log_gamma(cd(g.shape, 0)).real());
                },
                0.0, x, 1e-14, 1e-12);
            return std::max(0.0, 1.0 - fx);
          },
          [&](const LognormalLaw& l) {
            if (x <= 0) return 1.0;
            return 0.5 * std::erfc((std::log(x) - l.m) / (l.sigma * M_SQRT2));
          },
          [&](const AbsCauchy&) {
            return x <= 0 ? 1.0 : 1.0 - 2.0 / M_PI * std::atan(x);
          },
          [&](const TwoPoint& t) {
            double acc = 0.0;
            if (t.x1 > x) acc += t.w1;
            if (t.x2 > x) acc += t.w2;
            return acc;
          },
          [&](const TruncPower& t) {
            if (x <= t.a) return 1.0;
            if (x >= t.b) return 0.0;
            if (t.p == 0.0) return std::log(t.b / x) / std::log(t.b / t.a);
            return (std::pow(x, -t.p) - std::pow(t.b, -t.p)) /
                   (std::pow(t.a, -t.p) - std::pow(t.b, -t.p));
          },
          [&](const SlowVariationLaw&) {
            return x <= M_E ? 1.0 : 1.0 / std::log(x);
          },
          [&](const PointMassLaw& p) { return x < p.c ? 1.0 : 0.0; },
          [&](const NoiseLaw& n) { return n.tail(x); }},
      d);
}

// E[Y^r]; +inf when divergent
inline double moment(const Dist& d, double r) {
  return std::visit(
      overloaded{
          [&](const Pareto& pr) { return r < pr.p ? pr.p / (pr.p - r) : inf; },
          [&](const UniformLaw&) { return r > -1.0 ? 1.0 / (r + 1.0) : inf; },
          [&](const GammaLaw& g) {
            if (r <= -g.shape) return inf;
            return std::exp(log_gamma(cd(g.shape + r, 0)).real() -
                            log_gamma(cd(g.shape, 0)).real() -
                            r * std::log(g.rate));
          },
          [&](const LognormalLaw& l) {
            return std::exp(l.m * r + 0.5 * l.sigma * l.sigma * r * r);
          },
          [&](const AbsCauchy&) {
            return std::abs(r) < 1.0 ? 1.0 / std::cos(M_PI * r / 2.0) : inf;
          },
          [&](const TwoPoint& t) {
            return t.w1 * std::pow(t.x1, r) + t.w2 * std::pow(t.x2, r);
          },
          [&](const TruncPower& t) {
            double e = r - t.p;
            if (e == 0.0) return t.norm() * std::log(t.b / t.a);
            return t.norm() * (std::pow(t.b, e) - std::pow(t.a, e)) / e;
          },
          [&](const SlowVariationLaw&) -> double {
            if (r > 0) return inf;
            if (r == 0) return 1.0;
            return integrate_to_inf(
                [&](double x) { return std::pow(x, r) / (x * std::pow(std::log(x), 2)); },
                M_E, 1e-13, 1e-11);
          },
          [&](const PointMassLaw& p) { return std::pow(p.c, r); },
          [&](const NoiseLaw& n) -> double {
            if (r >= n.spec.alpha) return inf;
            const auto& s = n.spec;
            cd w(r - s.alpha, 0.0);
            cd kappa(0.5 * s.a, -0.5 * s.b);
            auto I = [&](cd v) { return -cpow_pos(s.trunc, v.real(), v.imag()) / v; };
            cd val = s.alpha * (I(w) + kappa * I(w + cd(0, s.theta0)) +
                                std::conj(kappa) * I(w - cd(0, s.theta0)));
            return n.atom_mass + val.real();
          }},
      d);
}

// continuous density where one exists (atoms excluded); 0 outside support
inline double density(const Dist& d, double x) {
  return std::visit(
      overloaded{
          [&](const Pareto& pr) {
            return x <= 1.0 ? 0.0 : pr.p * std::pow(x, -pr.p - 1.0);
          },
          [&](const UniformLaw&) { return (x > 0 && x < 1) ? 1.0 : 0.0; },
          [&](const GammaLaw& g) {
            if (x <= 0) return 0.0;
            return std::exp(g.shape * std::log(g.rate) +
                            (g.shape - 1.0) * std::log(x) - g.rate * x -
                            log_gamma(cd(g.shape, 0)).real());
          },
          [&](const LognormalLaw& l) {
            if (x <= 0) return 0.0;
            double z = (std::log(x) - l.m) / l.sigma;
            return std::exp(-0.5 * z * z) / (x * l.sigma * std::sqrt(2.0 * M_PI));
          },
          [&](const AbsCauchy&) {
            return x <= 0 ? 0.0 : 2.0 / (M_PI * (1.0 + x * x));
          },
          [&](const TwoPoint&) { return 0.0; },
          [&](const TruncPower& t) {
            if (x <= t.a || x >= t.b) return 0.0;
            return t.norm() * std::pow(x, -t.p - 1.0);
          },
          [&](const SlowVariationLaw&) {
            if (x <= M_E) return 0.0;
            double lx = std::log(x);
            return 1.0 / (x * lx * lx);
          },
          [&](const PointMassLaw&) { return 0.0; },
          [&](const NoiseLaw& n) { return n.continuous_density(x); }},
      d);
}

// atoms of the law (empty for purely continuous members)
inline std::vector<Atom> atoms_of(const Dist& d) {
  return std::visit(
      overloaded{[&](const TwoPoint& t) {
                   return std::vector<Atom>{{t.x1, t.w1}, {t.x2, t.w2}};
                 },
                 [&](const PointMassLaw& p) {
                   return std::vector<Atom>{{p.c, 1.0}};
                 },
                 [&](const NoiseLaw& n) {
                   return std::vector<Atom>{{1.0, n.atom_mass}};
                 },
                 [&](const auto&) { return std::vector<Atom>{}; }},
      d);
}

// support interval (closure)
inline std::pair<double, double> support(const Dist& d) {
  return std::visit(
      overloaded{[&](const Pareto&) { return std::pair{1.0, inf}; },
                 [&](const UniformLaw&) { return std::pair{0.0, 1.0}; },
                 [&](const GammaLaw&) { return std::pair{0.0, inf}; },
                 [&](const LognormalLaw&) { return std::pair{0.0, inf}; },
                 [&](const AbsCauchy&) { return std::pair{0.0, inf}; },
                 [&](const TwoPoint& t) {
                   return std::pair{std::min(t.x1, t.x2), std::max(t.x1, t.x2)};
                 },
                 [&](const TruncPower& t) { return std::pair{t.a, t.b}; },
                 [&](const SlowVariationLaw&) { return std::pair{M_E, inf}; },
                 [&](const PointMassLaw& p) { return std::pair{p.c, p.c}; },
                 [&](const NoiseLaw& n) {
                   return std::pair{std::min(1.0, n.spec.trunc), inf};
                 }},
      d);
}

// one draw; consumes a deterministic number of uniforms for inverse-CDF
// members, a stream-dependent number for the rejection samplers
inline double sample(const Dist& d, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const Pareto& pr) { return std::pow(rng.uniform(), -1.0 / pr.p); },
          [&](const UniformLaw&) { return rng.uniform(); },
          [&](const GammaLaw& g) {
            // Marsaglia-Tsang; shape < 1 boosted through shape + 1
            double k = g.shape;
            double boost = 1.0;
            if (k < 1.0) {
              boost = std::pow(rng.uniform(), 1.0 / k);
              k += 1.0;
            }
            double dpar = k - 1.0 / 3.0;
            double cpar = 1.0 / std::sqrt(9.0 * dpar);
            while (true) {
              double z = rng.normal();
              double v = 1.0 + cpar * z;
              if (v <= 0) continue;
              v = v * v * v;
              double u = rng.uniform();
              if (std::log(u) < 0.5 * z * z + dpar - dpar * v + dpar * std::log(v))
                return boost * dpar * v / g.rate;
            }
          },
          [&](const LognormalLaw& l) {
            return std::exp(l.m + l.sigma * rng.normal());
          },
          [&](const AbsCauchy&) {
            return std::tan(M_PI_2 * rng.uniform());
          },
          [&](const TwoPoint& t) {
            return rng.uniform() < t.w1 ? t.x1 : t.x2;
          },
          [&](const TruncPower& t) {
            double u = rng.uniform();
            if (t.p == 0.0)
              return t.b * std::pow(t.b / t.a, -u);
            double lo = std::pow(t.b, -t.p);
            double hi = std::pow(t.a, -t.p);
            return std::pow(lo + u * (hi - lo), -1.0 / t.p);
          },
          [&](const SlowVariationLaw&) {
            return std::exp(1.0 / rng.uniform());
          },
          [&](const PointMassLaw& p) {
            rng.uniform();
            return p.c;
          },
          [&](const NoiseLaw& n) { return n.sample(rng); }},
      d);
}

inline std::vector<double> sample_noise(const Dist& d, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<double> out(n);
  for (std::size_t start = 0; start < n; start += kChunkSize) {
    Rng rng(chunk_seed(seed, start / kChunkSize));
    std::size_t end = std::min(n, start + kChunkSize);
    for (std::size_t i = start; i < end; ++i) out[i] = sample(d, rng);
  }
  return out;
}

inline std::string dist_name(const Dist& d) {
  return std::visit(
      overloaded{[](const Pareto&) { return std::string("pareto"); },
                 [](const UniformLaw&) { return std::string("uniform"); },
                 [](const GammaLaw&) { return std::string("gamma"); },
                 [](const LognormalLaw&) { return std::string("lognormal"); },
                 [](const AbsCauchy&) { return std::string("abscauchy"); },
                 [](const TwoPoint&) { return std::string("twopoint"); },
                 [](const TruncPower&) { return std::string("truncpower"); },
                 [](const SlowVariationLaw&) { return std::string("slowvar"); },
                 [](const PointMassLaw&) { return std::string("point"); },
                 [](const NoiseLaw&) { return std::string("counterexample"); }},
      d);
}

}  // namespace rvdet
