#pragma once

// Domain types on the positive half line: the log-periodic counterexample
// law, spectral measures (atoms plus absolutely continuous pieces), power
// measures, and kernel image measures.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rvdet/numerics.hpp"
#include "rvdet/rng.hpp"

namespace rvdet {

struct moment_divergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------------------
// log-periodic counterexample law
//
// The building block is the measure with density
//   g(x) * alpha * x^(-alpha-1),   g(x) = 1 + a cos(theta0 log x)
//                                         + b sin(theta0 log x),
// whose tail admits the closed form implemented below. g is 1-periodic in
// (theta0/2pi) log x, so the tail scales exactly by r^(-alpha) under
// x -> r x with r = exp(2 pi / theta0).

struct CounterexampleSpec {
  double alpha = 1.0;
  double theta0 = 1.0;
  double a = 0.0;
  double b = 0.0;
  double trunc = 0.0;  // 0 = pick automatically when building the law
};

inline void validate(const CounterexampleSpec& s) {
  if (!(s.alpha > 0)) throw std::invalid_argument("counterexample: alpha must be > 0");
  if (!(s.theta0 > 0)) throw std::invalid_argument("counterexample: theta0 must be > 0");
  if (!(s.a * s.a + s.b * s.b <= 1.0 + 1e-15))
    throw std::invalid_argument("counterexample: need a^2 + b^2 <= 1");
  if (s.trunc < 0) throw std::invalid_argument("counterexample: trunc must be >= 0");
}

inline double counterexample_mult_period(const CounterexampleSpec& s) {
  return std::exp(2.0 * M_PI / s.theta0);
}

// tail of the unnormalized measure on (x, infinity)
inline double counterexample_tail(const CounterexampleSpec& s, double x) {
  if (!(x > 0)) throw std::invalid_argument("counterexample_tail: x must be > 0");
  const double al = s.alpha, th = s.theta0;
  const double u = std::log(x);
  const double denom = al * al + th * th;
  const double cc = (s.a * al + s.b * th) / denom;
  const double cs = (s.b * al - s.a * th) / denom;
  double osc = al * (cc * std::cos(th * u) + cs * std::sin(th * u));
  return std::pow(x, -al) * (1.0 + osc);
}

// density of that measure
inline double counterexample_density(const CounterexampleSpec& s, double x) {
  const double u = std::log(x);
  double g = 1.0 + s.a * std::cos(s.theta0 * u) + s.b * std::sin(s.theta0 * u);
  return g * s.alpha * std::pow(x, -s.alpha - 1.0);
}

// sup - inf of x^alpha * tail(x) over one multiplicative period
inline double counterexample_oscillation(const CounterexampleSpec& s) {
  double amp = s.alpha * std::hypot(s.a, s.b) /
               std::hypot(s.alpha, s.theta0);
  return 2.0 * amp;
}

// The noise law: the tail measure restricted to (trunc, infinity), the
// leftover mass parked as an atom at 1, optionally symmetrized about 0.
struct NoiseLaw {
  CounterexampleSpec spec;  // trunc resolved to the actual cutoff
  double atom_mass = 0.0;   // mass of the atom at 1
  bool symmetrized = true;

  // P(|Z| > x); equals the unrestricted tail for x >= max(trunc, 1)
  double abs_tail(double x) const {
    if (!(x > 0)) return 1.0;
    double t = counterexample_tail(spec, std::max(x, spec.trunc));
    if (x < 1.0) t += atom_mass;
    return t;
  }

  // P(Z > x) for x > 0
  double tail(double x) const {
    return symmetrized ? 0.5 * abs_tail(x) : abs_tail(x);
  }

  double oscillation_range() const {
    double r = counterexample_oscillation(spec);
    return symmetrized ? 0.5 * r : r;
  }

  // continuous density of |Z| on (trunc, infinity)
  double continuous_density(double x) const {
    return x > spec.trunc ? counterexample_density(spec, x) : 0.0;
  }

  // inverse-survival sampling; bisection on the exact tail
  double sample(Rng& rng) const {
    double u = rng.uniform();
    double v;
    double cont_mass = counterexample_tail(spec, spec.trunc);
    if (u <= cont_mass) {
      auto t = [&](double x) { return counterexample_tail(spec, x); };
      v = invert_decreasing(t, u, spec.trunc, 2.0 * spec.trunc, 1e-12);
    } else {
      v = 1.0;
    }
    if (!symmetrized) return v;
    return rng.uniform() < 0.5 ? -v : v;
  }
};

inline NoiseLaw build_noise_law(CounterexampleSpec s, bool symmetrize = true) {
  validate(s);
  if (s.trunc == 0.0) {
    double b0 = 1.0;
    if (counterexample_tail(s, b0) <= 0.5) {
      while (counterexample_tail(s, b0 * 0.5) <= 0.5) b0 *= 0.5;
    } else {
      while (counterexample_tail(s, b0) > 0.5) b0 *= 2.0;
    }
    s.trunc = b0;
  }
  double mass = counterexample_tail(s, s.trunc);
  if (mass > 1.0)
    throw std::invalid_argument("build_noise_law: tail mass above trunc exceeds 1");
  NoiseLaw law;
  law.spec = s;
  law.atom_mass = 1.0 - mass;
  law.symmetrized = symmetrize;
  return law;
}

inline std::vector<double> sample_noise(const NoiseLaw& law, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<double> out(n);
  for (std::size_t start = 0; start < n; start += kChunkSize) {
    Rng rng(chunk_seed(seed, start / kChunkSize));
    std::size_t end = std::min(n, start + kChunkSize);
    for (std::size_t i = start; i < end; ++i) out[i] = law.sample(rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// spectral measures

struct Atom {
  double x = 1.0;  // location, > 0
  double w = 1.0;  // weight, > 0
};

// density c * y^(-p-1) on (a, b); b may be +inf, a may be 0
struct TruncPowerPiece {
  double c = 1.0;
  double p = 1.0;
  double a = 1.0;
  double b = 2.0;
};

// density mult / (lambda y) on (0, 1); the image of an exponential kernel
struct ExpImagePiece {
  double lambda = 1.0;
  double mult = 1.0;
};

struct TabulatedPiece {
  std::function<double(double)> density;
  double a = 0.0;
  double b = 1.0;  // finite support required
};

using AcPiece = std::variant<TruncPowerPiece, ExpImagePiece, TabulatedPiece>;

struct SpectralMeasure {
  std::vector<Atom> atoms;
  std::vector<AcPiece> ac_pieces;
};

inline void validate(const SpectralMeasure& m) {
  for (const auto& at : m.atoms)
    if (!(at.x > 0) || !(at.w > 0) || !std::isfinite(at.x) || !std::isfinite(at.w))
      throw std::invalid_argument("SpectralMeasure: atoms need x > 0, w > 0");
  for (const auto& piece : m.ac_pieces) {
    std::visit(overloaded{
                   [](const TruncPowerPiece& t) {
                     if (!(t.c > 0) || !(t.a >= 0) || !(t.b > t.a))
                       throw std::invalid_argument(
                           "SpectralMeasure: bad truncated power piece");
                   },
                   [](const ExpImagePiece& e) {
                     if (!(e.lambda > 0) || !(e.mult > 0))
                       throw std::invalid_argument(
                           "SpectralMeasure: bad exponential image piece");
                   },
                   [](const TabulatedPiece& t) {
                     if (!t.density || !(t.a >= 0) || !(t.b > t.a) ||
                         !std::isfinite(t.b))
                       throw std::invalid_argument(
                           "SpectralMeasure: tabulated piece needs a finite "
                           "interval and a density");
                   }},
               piece);
  }
}

inline SpectralMeasure atoms_measure(const std::vector<double>& weights) {
  SpectralMeasure m;
  for (double w : weights) {
    if (!(w > 0) || !std::isfinite(w))
      throw std::invalid_argument("weights must be positive and finite");
    m.atoms.push_back({w, 1.0});
  }
  return m;
}

// merge atoms at exactly equal locations
inline std::vector<Atom> merged_atoms(const std::vector<Atom>& atoms) {
  std::map<double, double> acc;
  for (const auto& at : atoms) acc[at.x] += at.w;
  std::vector<Atom> out;
  out.reserve(acc.size());
  for (auto& [x, w] : acc) out.push_back({x, w});
  return out;
}

// integral of y^r against one ac piece; +inf when divergent
inline double piece_moment(const AcPiece& piece, double r) {
  return std::visit(
      overloaded{
          [&](const TruncPowerPiece& t) -> double {
            double e = r - t.p;
            if (std::isinf(t.b) && e >= 0) return inf;
            if (t.a == 0 && e <= 0) return inf;
            if (e == 0) return t.c * std::log(t.b / t.a);
            double hi = std::isinf(t.b) ? 0.0 : std::pow(t.b, e);
            double lo = t.a == 0 ? 0.0 : std::pow(t.a, e);
            return t.c * (hi - lo) / e;
          },
          [&](const ExpImagePiece& p) -> double {
            return r > 0 ? p.mult / (p.lambda * r) : inf;
          },
          [&](const TabulatedPiece& t) -> double {
            return integrate([&](double y) { return std::pow(y, r) * t.density(y); },
                             t.a, t.b, 1e-12, 1e-10);
          }},
      piece);
}

// integral of y^r rho(dy); +inf when divergent
inline double measure_moment(const SpectralMeasure& m, double r) {
  double acc = 0.0;
  for (const auto& at : m.atoms) acc += at.w * std::pow(at.x, r);
  for (const auto& piece : m.ac_pieces) {
    double v = piece_moment(piece, r);
    if (std::isinf(v)) return inf;
    acc += v;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// power measures: density |alpha| y^(-alpha-1) for alpha != 0, y^(-1) for
// alpha = 0; infinite total mass, the scaling fixed points of the theory

struct PowerMeasure {
  double alpha = 1.0;

  double tail(double x) const {
    if (alpha > 0) return std::pow(x, -alpha);
    return inf;
  }
  // mass of (0, x]
  double mass_below(double x) const {
    if (alpha < 0) return std::pow(x, -alpha);
    return inf;
  }
};

// ---------------------------------------------------------------------------
// kernels and their image measures under Lebesgue measure

struct StepKernel {
  struct Seg {
    double value;    // > 0
    double measure;  // Lebesgue measure of {f = value}, finite > 0
  };
  std::vector<Seg> segs;
};

struct OneSidedExpKernel {
  double lambda = 1.0;  // f(s) = exp(-lambda s) on s > 0
};

struct TwoSidedExpKernel {
  double lambda = 1.0;  // f(s) = exp(-lambda |s|)
};

using Kernel = std::variant<StepKernel, OneSidedExpKernel, TwoSidedExpKernel>;

inline void validate(const Kernel& k) {
  std::visit(overloaded{
                 [](const StepKernel& s) {
                   if (s.segs.empty())
                     throw std::invalid_argument("StepKernel: no segments");
                   for (const auto& seg : s.segs)
                     if (!(seg.value > 0) || !(seg.measure > 0) ||
                         !std::isfinite(seg.value) || !std::isfinite(seg.measure))
                       throw std::invalid_argument(
                           "StepKernel: values and measures must be positive "
                           "and finite");
                 },
                 [](const OneSidedExpKernel& e) {
                   if (!(e.lambda > 0))
                     throw std::invalid_argument("exp kernel: lambda must be > 0");
                 },
                 [](const TwoSidedExpKernel& e) {
                   if (!(e.lambda > 0))
                     throw std::invalid_argument("exp kernel: lambda must be > 0");
                 }},
             k);
}

inline StepKernel step_kernel_from_weights(const std::vector<double>& weights) {
  StepKernel k;
  for (double w : weights) k.segs.push_back({w, 1.0});
  validate(Kernel{k});
  return k;
}

// Lebesgue image measure of the kernel
inline SpectralMeasure kernel_to_measure(const Kernel& k) {
  validate(k);
  SpectralMeasure m;
  std::visit(overloaded{
                 [&](const StepKernel& s) {
                   std::vector<Atom> raw;
                   for (const auto& seg : s.segs) raw.push_back({seg.value, seg.measure});
                   m.atoms = merged_atoms(raw);
                 },
                 [&](const OneSidedExpKernel& e) {
                   m.ac_pieces.push_back(ExpImagePiece{e.lambda, 1.0});
                 },
                 [&](const TwoSidedExpKernel& e) {
                   m.ac_pieces.push_back(ExpImagePiece{e.lambda, 2.0});
                 }},
             k);
  return m;
}

// integral of f(s)^r ds over the kernel's support; +inf when divergent
inline double kernel_power_integral(const Kernel& k, double r) {
  return std::visit(
      overloaded{[&](const StepKernel& s) {
                   double acc = 0.0;
                   for (const auto& seg : s.segs)
                     acc += seg.measure * std::pow(seg.value, r);
                   return acc;
                 },
                 [&](const OneSidedExpKernel& e) {
                   return r > 0 ? 1.0 / (e.lambda * r) : inf;
                 },
                 [&](const TwoSidedExpKernel& e) {
                   return r > 0 ? 2.0 / (e.lambda * r) : inf;
                 }},
      k);
}

// Lebesgue measure of the support; finite only for step kernels
inline double kernel_support_measure(const Kernel& k) {
  return std::visit(overloaded{[](const StepKernel& s) {
                                 double acc = 0.0;
                                 for (const auto& seg : s.segs) acc += seg.measure;
                                 return acc;
                               },
                               [](const OneSidedExpKernel&) { return inf; },
                               [](const TwoSidedExpKernel&) { return inf; }},
                    k);
}

// ---------------------------------------------------------------------------
// infinite weight sequences psi_j = scale * beta^(j-1), j >= 1

struct GeometricWeights {
  double scale = 1.0;
  double beta = 0.5;
};

inline void validate(const GeometricWeights& g) {
  if (!(g.scale > 0) || !(g.beta > 0) || !(g.beta < 1))
    throw std::invalid_argument("GeometricWeights: need scale > 0, 0 < beta < 1");
}

inline double geometric_moment(const GeometricWeights& g, double r) {
  if (!(r > 0)) return inf;
  return std::pow(g.scale, r) / (1.0 - std::pow(g.beta, r));
}

// smallest K with sum_{j>K} psi_j^(r) <= eps * sum_j psi_j^(r)
inline std::size_t geometric_truncation(const GeometricWeights& g, double r,
                                        double eps = 1e-6) {
  if (!(r > 0)) throw moment_divergence_error("geometric weights: exponent <= 0");
  double k = std::ceil(std::log(eps) / (r * std::log(g.beta)));
  return static_cast<std::size_t>(std::max(1.0, k));
}

inline std::vector<double> geometric_prefix(const GeometricWeights& g,
                                            std::size_t k) {
  std::vector<double> out(k);
  double v = g.scale;
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = v;
    v *= g.beta;
  }
  return out;
}

}  // namespace rvdet
