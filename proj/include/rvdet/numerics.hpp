#pragma once

// Small numerical toolkit: adaptive Gauss-Kronrod quadrature, monotone
// inversion, golden-section minimization, rational reconstruction.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rvdet {

inline constexpr double inf = std::numeric_limits<double>::infinity();

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK xgk/wgk/wg).
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class T>
struct PanelEstimate {
  T value;
  double error;
};

template <class F, class T = std::invoke_result_t<F, double>>
PanelEstimate<T> gk15(F&& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  T fc = f(c);
  T kron = gk_wk[7] * fc;
  T gauss = gk_wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    T lo = f(c - h * gk_nodes[i]);
    T hi = f(c + h * gk_nodes[i]);
    kron += gk_wk[i] * (lo + hi);
    if (i % 2 == 1) gauss += gk_wg[i / 2] * (lo + hi);
  }
  kron *= h;
  gauss *= h;
  // |K - G| tracks the Gauss error, which dominates the Kronrod error;
  // using it directly keeps the estimate conservative at every scale.
  double diff = std::abs(kron - gauss);
  return {kron, diff};
}

}  // namespace detail

// Adaptive quadrature on a finite interval. Splits the worst panel until the
// summed error estimate is below max(abs_tol, rel_tol * |integral|).
template <class F, class T = std::invoke_result_t<F, double>>
T integrate(F&& f, double a, double b, double abs_tol = 1e-12,
            double rel_tol = 1e-12, double* err_out = nullptr,
            int max_panels = 4000) {
  struct Panel {
    double a, b, error;
    T value;
  };
  if (!(a < b)) {
    if (err_out) *err_out = 0.0;
    return T{};
  }
  auto first = detail::gk15(f, a, b);
  std::vector<Panel> panels{{a, b, first.error, first.value}};
  for (int it = 0; it < max_panels; ++it) {
    T total{};
    double err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].error;
      if (panels[i].error > panels[worst].error) worst = i;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total)) ||
        panels[worst].b - panels[worst].a < 1e-15 * (b - a)) {
      if (err_out) *err_out = err;
      return total;
    }
    Panel p = panels[worst];
    double mid = 0.5 * (p.a + p.b);
    auto left = detail::gk15(f, p.a, mid);
    auto right = detail::gk15(f, mid, p.b);
    panels[worst] = {p.a, mid, left.error, left.value};
    panels.push_back({mid, p.b, right.error, right.value});
  }
  T total{};
  double err = 0.0;
  for (auto& p : panels) {
    total += p.value;
    err += p.error;
  }
  if (err_out) *err_out = err;
  return total;
}

// Integral over (a, infinity) for integrands with eventual power or
// exponential decay: geometric panels, stopped once the extrapolated
// remainder is negligible against the accumulated value.
template <class F, class T = std::invoke_result_t<F, double>>
T integrate_to_inf(F&& f, double a, double abs_tol = 1e-12,
                   double rel_tol = 1e-12, double* err_out = nullptr) {
  if (!(a > 0))
    throw std::invalid_argument("integrate_to_inf: lower limit must be > 0");
  T acc{};
  double err = 0.0;
  double prev_mag = -1.0;
  double lo = a;
  for (int k = 0; k < 420; ++k) {
    double hi = lo * 2.0;
    double perr = 0.0;
    T pv = integrate(f, lo, hi, abs_tol / 8, rel_tol / 8, &perr, 600);
    acc += pv;
    err += perr;
    double mag = std::abs(pv);
    double scale = std::max(std::abs(acc), abs_tol);
    if (prev_mag > 0.0 && mag < prev_mag) {
      double r = mag / prev_mag;
      double remainder = mag * r / (1.0 - r);
      if (remainder <= std::max(abs_tol, rel_tol * scale)) {
        if (err_out) *err_out = err + remainder;
        return acc;
      }
    } else if (mag <= std::max(abs_tol, rel_tol * scale) * 0.01) {
      if (err_out) *err_out = err;
      return acc;
    }
    prev_mag = mag;
    lo = hi;
  }
  if (err_out) *err_out = err;
  return acc;
}

// Solve f(x) = target for strictly decreasing f on [lo, hi_seed, ...).
// Expands the upper bracket by doubling, then bisects to a relative width.
template <class F>
double invert_decreasing(F&& f, double target, double lo, double hi_seed,
                         double rel_tol = 1e-12) {
  double hi = std::max(hi_seed, lo * (1.0 + 1e-12));
  int guard = 0;
  while (f(hi) > target) {
    hi *= 2.0;
    if (++guard > 1100)
      throw std::runtime_error("invert_decreasing: bracket expansion failed");
  }
  if (f(lo) < target) return lo;
  while (hi - lo > rel_tol * hi) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Bisection for f(x) = 0 with f(lo), f(hi) of opposite sign.
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol = 1e-14) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("bisect: endpoints do not bracket a root");
  while (hi - lo > x_tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimization; tolerant of V-shaped minima (no smoothness
// assumed). Returns argmin and the value there.
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b,
                                     double x_tol = 1e-11) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > x_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  double fm = f(xm);
  if (f1 < fm) {
    xm = x1;
    fm = f1;
  }
  if (f2 < fm) {
    xm = x2;
    fm = f2;
  }
  return {xm, fm};
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0
};

// Continued-fraction reconstruction of x as num/den with den <= max_den.
// Succeeds only if the convergent matches x within tol * max(1, |x|).
inline bool rationalize(double x, double tol, std::int64_t max_den,
                        Rational& out) {
  if (!std::isfinite(x)) return false;
  double target = x;
  std::int64_t p_prev = 1, q_prev = 0;
  std::int64_t p = static_cast<std::int64_t>(std::floor(x)), q = 1;
  double frac = x - std::floor(x);
  for (int it = 0; it < 64; ++it) {
    if (std::abs(target - double(p) / double(q)) <=
        tol * std::max(1.0, std::abs(target))) {
      out = {p, q};
      return true;
    }
    if (frac < 1e-18) break;
    double inv = 1.0 / frac;
    double fl = std::floor(inv);
    if (fl > 9.0e15) break;
    auto a = static_cast<std::int64_t>(fl);
    frac = inv - fl;
    std::int64_t p_next = a * p + p_prev;
    std::int64_t q_next = a * q + q_prev;
    if (q_next > max_den || q_next <= 0) break;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
  if (std::abs(target - double(p) / double(q)) <=
      tol * std::max(1.0, std::abs(target))) {
    out = {p, q};
    return true;
  }
  return false;
}

inline std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  return a / std::gcd(a, b) * b;
}

}  // namespace rvdet
