#pragma once

// Failure-set curves for three unit masses at (psi1, psi2, 1) with tail
// index 1: the set of (theta, psi1, psi2) where
//   psi1^(1+i theta) + psi2^(1+i theta) + 1 = 0.
// Geometrically the three terms form a closed triangle with side lengths
// psi1, psi2, 1, which forces psi1 + psi2 >= 1 and pins each phase
// theta*log(psi_k) up to sign and a 2 pi shift. Branches are indexed by
// those shifts and signs.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rvdet/distributions.hpp"
#include "rvdet/numerics.hpp"

namespace rvdet {

struct CurvePoint {
  int n = 0, m = 0;     // 2 pi shift indices of the two phases
  int s1 = 1, s2 = -1;  // phase signs; interior points have s1 * s2 = -1
  double theta = 0.0;
  double psi1 = 0.0, psi2 = 0.0;
  double residual = 0.0;

  // comma-free so the id can sit in a CSV column unquoted
  std::string branch_id() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "n%d_m%d_%c%c", n, m, s1 > 0 ? 'p' : 'm',
                  s2 > 0 ? 'p' : 'm');
    return buf;
  }
  std::array<int, 4> label() const { return {n, m, s1, s2}; }
};

struct CurveOptions {
  double theta_min = 3.0;
  double theta_max = 30.0;
  double theta_step = 0.05;
  int nm_max = 8;            // search range for the shift indices
  double resid_tol = 1e-9;   // acceptance threshold on |F|
};

namespace detail_curves {

inline cd F(double theta, double p1, double p2) {
  return cpow_pos(p1, 1.0, theta) + cpow_pos(p2, 1.0, theta) + 1.0;
}

inline double clamp01(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// phase magnitudes from the triangle's law of cosines
inline double angle1(double p1, double p2) {
  double c = (p2 * p2 - p1 * p1 - 1.0) / (2.0 * p1);
  return std::acos(clamp01(c, -1.0, 1.0));
}
inline double angle2(double p1, double p2) {
  double c = (p1 * p1 - p2 * p2 - 1.0) / (2.0 * p2);
  return std::acos(clamp01(c, -1.0, 1.0));
}

// damped Newton on (Re F, Im F); d F / d psi_k = psi_k^(i theta) (1 + i theta)
inline bool newton(double theta, double& p1, double& p2, double& resid,
                   int max_iter = 60) {
  cd one_it(1.0, theta);
  double fn = std::abs(F(theta, p1, p2));
  for (int it = 0; it < max_iter; ++it) {
    cd f = F(theta, p1, p2);
    fn = std::abs(f);
    if (fn < 1e-14) break;
    cd j1 = cpow_pos(p1, 0.0, theta) * one_it;
    cd j2 = cpow_pos(p2, 0.0, theta) * one_it;
    double a = j1.real(), b = j2.real();
    double c = j1.imag(), d = j2.imag();
    double det = a * d - b * c;
    if (std::abs(det) < 1e-14) return false;
    double d1 = (-f.real() * d + f.imag() * b) / det;
    double d2 = (-f.imag() * a + f.real() * c) / det;
    double cap = 0.2;
    double mag = std::max(std::abs(d1), std::abs(d2));
    if (mag > cap) {
      d1 *= cap / mag;
      d2 *= cap / mag;
    }
    double t = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 10; ++bt) {
      double q1 = clamp01(p1 + t * d1, 1e-9, 1.0);
      double q2 = clamp01(p2 + t * d2, 1e-9, 1.0);
      double fq = std::abs(F(theta, q1, q2));
      if (fq < fn) {
        p1 = q1;
        p2 = q2;
        fn = fq;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  resid = fn;
  return true;
}

}  // namespace detail_curves

// recover the branch label of a converged point
inline void label_point(CurvePoint& pt) {
  using namespace detail_curves;
  double ph1 = pt.theta * std::log(pt.psi1);
  double ph2 = pt.theta * std::log(pt.psi2);
  pt.s1 = std::sin(ph1) >= -1e-9 ? 1 : -1;
  pt.s2 = std::sin(ph2) >= -1e-9 ? 1 : -1;
  double a1 = angle1(pt.psi1, pt.psi2);
  double a2 = angle2(pt.psi1, pt.psi2);
  pt.n = static_cast<int>(std::lround((ph1 - pt.s1 * a1) / (2.0 * M_PI)));
  pt.m = static_cast<int>(std::lround((ph2 - pt.s2 * a2) / (2.0 * M_PI)));
}

// solve at fixed theta from a branch-indexed seed; nullopt if the iteration
// leaves the feasible triangle or stalls
inline std::optional<CurvePoint> solve_point(double theta, int n, int m,
                                             int s1, int s2,
                                             double resid_tol = 1e-9) {
  using namespace detail_curves;
  double p1 = 0.65, p2 = 0.65;
  for (int it = 0; it < 40; ++it) {
    double f1 = std::exp((s1 * angle1(p1, p2) + 2.0 * M_PI * n) / theta);
    double f2 = std::exp((s2 * angle2(p1, p2) + 2.0 * M_PI * m) / theta);
    p1 = clamp01(0.5 * p1 + 0.5 * f1, 1e-6, 1.0);
    p2 = clamp01(0.5 * p2 + 0.5 * f2, 1e-6, 1.0);
  }
  if (std::abs(F(theta, p1, p2)) > 0.5) return std::nullopt;
  double resid = inf;
  if (!newton(theta, p1, p2, resid)) return std::nullopt;
  if (!(resid <= resid_tol)) return std::nullopt;
  if (p1 + p2 < 1.0 - 1e-9) return std::nullopt;
  CurvePoint pt;
  pt.theta = theta;
  pt.psi1 = p1;
  pt.psi2 = p2;
  pt.residual = resid;
  label_point(pt);
  return pt;
}

// Boundary points where the triangle degenerates: both phases are odd
// multiples of pi, psi1 + psi2 = 1, and psi1 = psi2^r with r an odd/odd
// ratio. These are exactly the lattice configurations, solved here to full
// precision and injected as exact curve points.
inline std::vector<CurvePoint> lattice_boundary_points(
    const CurveOptions& opt = {}) {
  std::vector<CurvePoint> out;
  for (int k1 = 0; k1 <= opt.nm_max; ++k1) {
    for (int k2 = 0; k2 <= opt.nm_max; ++k2) {
      double r = double(2 * k1 + 1) / double(2 * k2 + 1);
      double p2 = bisect(
          [r](double y) { return std::pow(y, r) + y - 1.0; }, 1e-12,
          1.0 - 1e-15, 1e-15);
      double p1 = std::pow(p2, r);
      double theta = (2 * k2 + 1) * M_PI / std::abs(std::log(p2));
      if (theta < opt.theta_min || theta > opt.theta_max) continue;
      CurvePoint pt;
      pt.theta = theta;
      pt.psi1 = p1;
      pt.psi2 = p2;
      pt.residual = std::abs(detail_curves::F(theta, p1, p2));
      label_point(pt);
      out.push_back(pt);
    }
  }
  return out;
}

// full sweep: every theta on the grid, every branch seed, plus the exact
// boundary points; deduplicated per theta
inline std::vector<CurvePoint> trace_curves(const CurveOptions& opt = {}) {
  std::vector<CurvePoint> pts;
  int steps = static_cast<int>(
      std::floor((opt.theta_max - opt.theta_min) / opt.theta_step + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    double theta = opt.theta_min + i * opt.theta_step;
    std::map<std::pair<long long, long long>, CurvePoint> at_theta;
    for (int n = -opt.nm_max; n <= 0; ++n) {
      for (int m = -opt.nm_max; m <= 0; ++m) {
        for (int sgn = 0; sgn < 2; ++sgn) {
          int s1 = sgn == 0 ? 1 : -1;
          auto pt = solve_point(theta, n, m, s1, -s1, opt.resid_tol);
          if (!pt) continue;
          auto key = std::make_pair(
              static_cast<long long>(std::lround(pt->psi1 * 1e8)),
              static_cast<long long>(std::lround(pt->psi2 * 1e8)));
          auto it = at_theta.find(key);
          if (it == at_theta.end() || pt->residual < it->second.residual)
            at_theta[key] = *pt;
        }
      }
    }
    for (auto& [key, pt] : at_theta) pts.push_back(pt);
  }
  for (auto& pt : lattice_boundary_points(opt)) pts.push_back(pt);
  std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) {
    if (a.label() != b.label()) return a.label() < b.label();
    return a.theta < b.theta;
  });
  return pts;
}

inline void write_curves_csv(std::ostream& os,
                             const std::vector<CurvePoint>& pts) {
  os << "branch,theta,psi1,psi2,residual\n";
  char buf[256];
  for (const auto& pt : pts) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n",
                  pt.branch_id().c_str(), pt.theta, pt.psi1, pt.psi2,
                  pt.residual);
    os << buf;
  }
}

// curves in the (psi1, psi2) unit square, one polyline per branch
inline void write_curves_svg(std::ostream& os,
                             const std::vector<CurvePoint>& pts) {
  const int W = 640, H = 640, pad = 50;
  auto X = [&](double p) { return pad + p * (W - 2 * pad); };
  auto Y = [&](double p) { return H - pad - p * (H - 2 * pad); };
  static const char* palette[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad",
                                  "#d35400", "#16a085", "#7f8c8d", "#2c3e50",
                                  "#e67e22", "#2980b9"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\""
     << W - 2 * pad << "\" height=\"" << H - 2 * pad
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  // psi1 + psi2 = 1 boundary
  os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(1) << "\" x2=\"" << X(1)
     << "\" y2=\"" << Y(0) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-size=\"14\">psi1</text>\n";
  os << "<text x=\"14\" y=\"" << H / 2
     << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 14 "
     << H / 2 << ")\">psi2</text>\n";
  std::map<std::array<int, 4>, std::vector<const CurvePoint*>> branches;
  for (const auto& pt : pts) branches[pt.label()].push_back(&pt);
  int ci = 0;
  for (auto& [lab, bpts] : branches) {
    const char* color = palette[ci++ % 10];
    if (bpts.size() == 1) {
      os << "<circle cx=\"" << X(bpts[0]->psi1) << "\" cy=\""
         << Y(bpts[0]->psi2) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      continue;
    }
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (const auto* p : bpts) os << X(p->psi1) << "," << Y(p->psi2) << " ";
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace rvdet
