#pragma once

// JSON and CSV encodings for the library types. All JSON output uses
// insertion-ordered objects and all floating-point CSV fields print with
// %.17g so identical inputs produce byte-identical files.

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "rvdet/certify.hpp"
#include "rvdet/distributions.hpp"
#include "rvdet/measures.hpp"
#include "rvdet/simulate.hpp"

namespace rvdet {

using ojson = nlohmann::ordered_json;

inline ojson spec_to_json(const CounterexampleSpec& s) {
  return ojson{{"alpha", s.alpha},
               {"theta0", s.theta0},
               {"a", s.a},
               {"b", s.b},
               {"trunc", s.trunc}};
}

inline CounterexampleSpec spec_from_json(const ojson& j) {
  CounterexampleSpec s;
  s.alpha = j.value("alpha", 1.0);
  s.theta0 = j.at("theta0").get<double>();
  s.a = j.value("a", 0.0);
  s.b = j.value("b", 0.0);
  s.trunc = j.value("trunc", 0.0);
  return s;
}

inline ojson dist_to_json(const Dist& d) {
  ojson j;
  j["name"] = dist_name(d);
  std::visit(overloaded{[&](const Pareto& p) { j["p"] = p.p; },
                        [&](const UniformLaw&) {},
                        [&](const GammaLaw& g) {
                          j["shape"] = g.shape;
                          j["rate"] = g.rate;
                        },
                        [&](const LognormalLaw& l) {
                          j["m"] = l.m;
                          j["sigma"] = l.sigma;
                        },
                        [&](const AbsCauchy&) {},
                        [&](const TwoPoint& t) {
                          j["x1"] = t.x1;
                          j["w1"] = t.w1;
                          j["x2"] = t.x2;
                          j["w2"] = t.w2;
                        },
                        [&](const TruncPower& t) {
                          j["a"] = t.a;
                          j["b"] = t.b;
                          j["p"] = t.p;
                        },
                        [&](const SlowVariationLaw&) {},
                        [&](const PointMassLaw& p) { j["c"] = p.c; },
                        [&](const NoiseLaw& n) {
                          j["alpha"] = n.spec.alpha;
                          j["theta0"] = n.spec.theta0;
                          j["a"] = n.spec.a;
                          j["b"] = n.spec.b;
                          j["trunc"] = n.spec.trunc;
                          j["symmetrized"] = n.symmetrized;
                          j["atom_mass"] = n.atom_mass;
                        }},
             d);
  return j;
}

inline Dist dist_from_json(const ojson& j) {
  std::string name = j.at("name").get<std::string>();
  if (name == "pareto") return Pareto{j.at("p").get<double>()};
  if (name == "uniform") return UniformLaw{};
  if (name == "gamma")
    return GammaLaw{j.at("shape").get<double>(), j.at("rate").get<double>()};
  if (name == "lognormal")
    return LognormalLaw{j.value("m", 0.0), j.at("sigma").get<double>()};
  if (name == "abscauchy") return AbsCauchy{};
  if (name == "twopoint")
    return TwoPoint{j.at("x1").get<double>(), j.at("w1").get<double>(),
                    j.at("x2").get<double>(), j.at("w2").get<double>()};
  if (name == "truncpower")
    return TruncPower{j.at("a").get<double>(), j.at("b").get<double>(),
                      j.at("p").get<double>()};
  if (name == "slowvar") return SlowVariationLaw{};
  if (name == "point") return PointMassLaw{j.at("c").get<double>()};
  if (name == "counterexample") {
    CounterexampleSpec s = spec_from_json(j);
    return build_noise_law(s, j.value("symmetrized", true));
  }
  throw std::invalid_argument("unknown distribution name: " + name);
}

inline ojson kernel_to_json(const Kernel& k) {
  return std::visit(
      overloaded{[](const StepKernel& st) {
                   ojson values = ojson::array(), measures = ojson::array();
                   for (const auto& seg : st.segs) {
                     values.push_back(seg.value);
                     measures.push_back(seg.measure);
                   }
                   return ojson{{"type", "step"},
                                {"values", values},
                                {"measures", measures}};
                 },
                 [](const OneSidedExpKernel& e) {
                   return ojson{{"type", "exp"}, {"lambda", e.lambda}};
                 },
                 [](const TwoSidedExpKernel& e) {
                   return ojson{{"type", "exp2"}, {"lambda", e.lambda}};
                 }},
      k);
}

inline Kernel kernel_from_json(const ojson& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "step") {
    StepKernel st;
    auto values = j.at("values");
    auto measures = j.at("measures");
    if (values.size() != measures.size())
      throw std::invalid_argument("step kernel: values/measures mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
      st.segs.push_back(
          {values[i].get<double>(), measures[i].get<double>()});
    return st;
  }
  if (type == "exp") return OneSidedExpKernel{j.at("lambda").get<double>()};
  if (type == "exp2") return TwoSidedExpKernel{j.at("lambda").get<double>()};
  throw std::invalid_argument("unknown kernel type: " + type);
}

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Determining: return "determining";
    case VerdictKind::NotDetermining: return "not_determining";
    case VerdictKind::WindowCertified: return "window_certified";
  }
  return "unknown";
}

inline ojson verdict_to_json(const Verdict& v) {
  ojson j;
  j["kind"] = to_string(v.kind);
  j["certificate"] = v.certificate ? ojson(to_string(*v.certificate))
                                   : ojson(nullptr);
  j["theta0"] = v.theta0 ? ojson(*v.theta0) : ojson(nullptr);
  j["residual"] = v.residual;
  j["min_modulus"] = v.min_modulus ? ojson(*v.min_modulus) : ojson(nullptr);
  j["theta_max"] = v.theta_max ? ojson(*v.theta_max) : ojson(nullptr);
  if (v.lattice) {
    j["lattice"] = ojson{{"x0", v.lattice->x0},
                         {"theta0", v.lattice->theta0},
                         {"members", v.lattice->members}};
  } else {
    j["lattice"] = nullptr;
  }
  return j;
}

inline ojson check_to_json(const CheckOutcome& c) {
  ojson j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["value"] = c.value;
  j["lo"] = std::isfinite(c.lo) ? ojson(c.lo) : ojson(nullptr);
  j["hi"] = std::isfinite(c.hi) ? ojson(c.hi) : ojson(nullptr);
  j["detail"] = c.detail;
  return j;
}

inline ojson report_to_json(const TailReport& rep) {
  ojson j;
  j["op"] = rep.op;
  j["n"] = rep.n;
  j["seed"] = rep.seed;
  j["alpha"] = rep.alpha;
  j["target_ratio"] = rep.target_ratio;
  j["fitted_index"] = rep.fit ? ojson(rep.fit->index) : ojson(nullptr);
  j["oscillation"] = rep.oscillation ? ojson(*rep.oscillation) : ojson(nullptr);
  j["horizon_truncation"] =
      rep.horizon_truncation ? ojson(*rep.horizon_truncation) : ojson(nullptr);
  ojson pts = ojson::array();
  for (const auto& p : rep.points)
    pts.push_back(ojson{
        {"x", p.x}, {"tail", p.tail}, {"stderr", p.se}, {"ratio", p.ratio}});
  j["points"] = pts;
  ojson checks = ojson::array();
  for (const auto& c : rep.checks) checks.push_back(check_to_json(c));
  j["checks"] = checks;
  j["pass"] = rep.pass();
  return j;
}

inline void tail_report_csv(std::ostream& os, const TailReport& rep) {
  os << "x,tail,stderr,ratio\n";
  char buf[160];
  for (const auto& p : rep.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x, p.tail,
                  p.se, p.ratio);
    os << buf;
  }
}

// exact counterexample tail on a log grid over a few periods
inline void noise_tail_csv(std::ostream& os, const NoiseLaw& law,
                           int points_per_period = 64, int periods = 3) {
  os << "x,tail,x_tail\n";
  double r = counterexample_mult_period(law.spec);
  double x0 = std::max(law.spec.trunc, 1.0);
  char buf[160];
  for (int k = 0; k < periods * points_per_period; ++k) {
    double x = x0 * std::pow(r, double(k) / points_per_period);
    double t = law.tail(x);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, t,
                  std::pow(x, law.spec.alpha) * t);
    os << buf;
  }
}

}  // namespace rvdet
