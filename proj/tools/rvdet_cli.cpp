// Command-line surface: classify weight sets / distributions / kernels,
// build log-periodic counterexample laws, trace failure curves, and run the
// named verification scenarios.
//
// Exit codes: 0 determining or all checks passed, 1 invalid input,
// 2 not determining, 3 window-certified only, 4 scenario check failed.

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rvdet/curves.hpp"
#include "rvdet/rvdet.hpp"
#include "rvdet/scenarios.hpp"
#include "rvdet/serialize.hpp"

namespace {

using namespace rvdet;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

// "name" or "name:p1,p2,..."
std::pair<std::string, std::vector<double>> parse_descriptor(
    const std::string& s) {
  auto pos = s.find(':');
  if (pos == std::string::npos) return {s, {}};
  return {s.substr(0, pos), parse_list(s.substr(pos + 1))};
}

Dist dist_from_descriptor(const std::string& s) {
  auto [name, p] = parse_descriptor(s);
  auto need = [&](std::size_t k) {
    if (p.size() != k)
      throw std::invalid_argument("distribution " + name + " expects " +
                                  std::to_string(k) + " parameters");
  };
  if (name == "pareto") {
    need(1);
    return Pareto{p[0]};
  }
  if (name == "uniform") {
    need(0);
    return UniformLaw{};
  }
  if (name == "gamma") {
    need(2);
    return GammaLaw{p[0], p[1]};
  }
  if (name == "lognormal") {
    need(2);
    return LognormalLaw{p[0], p[1]};
  }
  if (name == "abscauchy") {
    need(0);
    return AbsCauchy{};
  }
  if (name == "twopoint") {
    need(4);
    return TwoPoint{p[0], p[1], p[2], p[3]};
  }
  if (name == "truncpower") {
    need(3);
    return TruncPower{p[0], p[1], p[2]};
  }
  if (name == "slowvar") {
    need(0);
    return SlowVariationLaw{};
  }
  if (name == "point") {
    need(1);
    return PointMassLaw{p[0]};
  }
  if (name == "counterexample") {
    need(4);
    CounterexampleSpec spec;
    spec.alpha = p[0];
    spec.theta0 = p[1];
    spec.a = p[2];
    spec.b = p[3];
    return build_noise_law(spec);
  }
  throw std::invalid_argument("unknown distribution: " + name);
}

Kernel kernel_from_descriptor(const std::string& s) {
  auto [name, p] = parse_descriptor(s);
  if (name == "ou" || name == "exp") {
    if (p.size() != 1)
      throw std::invalid_argument("kernel " + name + " expects lambda");
    return OneSidedExpKernel{p[0]};
  }
  if (name == "exp2") {
    if (p.size() != 1)
      throw std::invalid_argument("kernel exp2 expects lambda");
    return TwoSidedExpKernel{p[0]};
  }
  if (name == "step") {
    if (p.size() < 2 || p.size() % 2 != 0)
      throw std::invalid_argument("step kernel expects value,measure pairs");
    StepKernel st;
    for (std::size_t i = 0; i < p.size(); i += 2)
      st.segs.push_back({p[i], p[i + 1]});
    return st;
  }
  throw std::invalid_argument("unknown kernel: " + name);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int verdict_exit(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Determining: return 0;
    case VerdictKind::NotDetermining: return 2;
    case VerdictKind::WindowCertified: return 3;
  }
  return 1;
}

int cmd_check(const std::string& weights_arg, const std::string& dist_arg,
              const std::string& kernel_arg, double alpha,
              std::optional<double> theta_max, double tol) {
  int provided = int(!weights_arg.empty()) + int(!dist_arg.empty()) +
                 int(!kernel_arg.empty());
  if (provided != 1)
    throw std::invalid_argument(
        "check needs exactly one of --weights, --dist, --kernel");
  FindZeroOptions opt;
  if (theta_max) opt.theta_max = *theta_max;
  if (tol > 0) opt.zero_rel_tol = tol;
  Verdict v;
  std::string input;
  if (!weights_arg.empty()) {
    input = "weights " + weights_arg;
    if (weights_arg.rfind("geom:", 0) == 0) {
      auto p = parse_list(weights_arg.substr(5));
      if (p.size() != 2)
        throw std::invalid_argument("geometric weights: geom:scale,beta");
      GeometricWeights g{p[0], p[1]};
      v = find_zero(mellin_line_geometric(g, alpha), opt);
    } else {
      auto w = parse_list(weights_arg);
      if (w.empty()) throw std::invalid_argument("empty weight list");
      auto atoms = atoms_measure(w).atoms;
      if (auto fast = fast_path_atoms(atoms, alpha)) {
        v = *fast;
      } else {
        v = find_zero(mellin_line_atoms(atoms, alpha), opt);
      }
    }
  } else if (!dist_arg.empty()) {
    input = "dist " + dist_arg;
    Dist d = dist_from_descriptor(dist_arg);
    v = find_zero(mellin_line_dist(d, alpha), opt);
  } else {
    input = "kernel " + kernel_arg;
    Kernel k = kernel_from_descriptor(kernel_arg);
    if (const auto* st = std::get_if<StepKernel>(&k)) {
      std::vector<Atom> atoms;
      for (const auto& seg : st->segs)
        atoms.push_back({seg.value, seg.measure});
      if (auto fast = fast_path_atoms(atoms, alpha)) {
        ojson j = verdict_to_json(*fast);
        j["alpha"] = alpha;
        j["input"] = input;
        std::cout << j.dump(2) << "\n";
        return verdict_exit(*fast);
      }
    }
    v = find_zero(mellin_line_kernel(k, alpha), opt);
  }
  ojson j = verdict_to_json(v);
  j["alpha"] = alpha;
  j["input"] = input;
  std::cout << j.dump(2) << "\n";
  return verdict_exit(v);
}

int cmd_counterexample(double alpha, std::optional<double> theta0_arg,
                       const std::string& weights_arg, double a, double b,
                       std::size_t n, std::uint64_t seed,
                       const std::string& out) {
  if (a == 0.0 && b == 0.0)
    throw std::invalid_argument(
        "trivial example: a = b = 0 gives a plain power tail");
  if (a * a + b * b > 1.0 + 1e-15)
    throw std::invalid_argument(
        "a^2 + b^2 must stay inside the closed unit disk");
  std::vector<double> weights;
  if (!weights_arg.empty()) weights = parse_list(weights_arg);
  double theta0 = 0.0;
  if (theta0_arg) {
    theta0 = *theta0_arg;
  } else {
    if (weights.empty()) weights = {0.5, 0.5, 1.0};
    auto fast = fast_path_atoms(atoms_measure(weights).atoms, alpha);
    if (!fast || fast->kind != VerdictKind::NotDetermining || !fast->theta0)
      throw std::invalid_argument(
          "theta0 not given and the weight set is not a lattice "
          "(NotDetermining) configuration");
    theta0 = *fast->theta0;
  }
  CounterexampleSpec spec;
  spec.alpha = alpha;
  spec.theta0 = theta0;
  spec.a = a;
  spec.b = b;
  NoiseLaw law = build_noise_law(spec);

  ojson meta = dist_to_json(Dist{law});
  meta["mult_period"] = counterexample_mult_period(spec);
  meta["oscillation"] = law.oscillation_range();
  write_file(out + ".law.json", meta.dump(2) + "\n");

  std::ostringstream tail_csv;
  noise_tail_csv(tail_csv, law);
  write_file(out + ".tail.csv", tail_csv.str());

  bool compatible = false;
  if (!weights.empty()) {
    cd s{0, 0};
    double total = 0.0;
    for (double w : weights) {
      s += cpow_pos(w, alpha, theta0);
      total += std::pow(w, alpha);
    }
    compatible = std::abs(s) <= 1e-9 * total;
    if (!compatible)
      throw std::invalid_argument(
          "weights do not cancel at theta0; the filtered tail would not be "
          "an exact power law");
  }
  if (!weights.empty() && compatible) {
    std::vector<double> samples;
    TailReport rep =
        verify_weighted_sum(weights, Dist{law}, alpha, n, seed, &samples);
    SimContext ctx;
    ctx.op = "weighted-sum";
    ctx.weights = weights;
    ctx.noise = Dist{law};
    ctx.alpha = alpha;
    ctx.seed = seed;
    ctx.sorted = &samples;
    ScenarioCheck fit_ck;
    fit_ck.type = "fitted_index";
    fit_ck.target = alpha;
    fit_ck.tol = 0.1;
    rep.checks.push_back(evaluate_check(fit_ck, rep, ctx));
    ScenarioCheck osc_ck;
    osc_ck.type = "oscillation_range";
    osc_ck.lo = 0.1;
    rep.checks.push_back(evaluate_check(osc_ck, rep, ctx));
    ScenarioCheck id_ck;
    id_ck.type = "scaling_identity";
    id_ck.factor = 4.0;
    id_ck.tol = 1e-12;
    rep.checks.push_back(evaluate_check(id_ck, rep, ctx));
    write_file(out + ".report.json", report_to_json(rep).dump(2) + "\n");
    std::ostringstream rep_csv;
    tail_report_csv(rep_csv, rep);
    write_file(out + ".report.csv", rep_csv.str());
    std::cout << report_to_json(rep).dump(2) << "\n";
    return rep.pass() ? 0 : 4;
  }
  std::cout << meta.dump(2) << "\n";
  return 0;
}

int cmd_curves(int branches, double theta_min, double theta_max,
               double theta_step, const std::string& out,
               const std::string& svg) {
  CurveOptions opt;
  opt.nm_max = branches;
  opt.theta_min = theta_min;
  opt.theta_max = theta_max;
  opt.theta_step = theta_step;
  auto pts = trace_curves(opt);
  std::ostringstream csv;
  write_curves_csv(csv, pts);
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out, csv.str());
  }
  if (!svg.empty()) {
    std::ostringstream s;
    write_curves_svg(s, pts);
    write_file(svg, s.str());
  }
  std::set<std::array<int, 4>> labels;
  for (const auto& pt : pts) labels.insert(pt.label());
  std::cerr << "curves: " << pts.size() << " points on " << labels.size()
            << " branches\n";
  return 0;
}

int cmd_verify(const std::string& name, std::optional<std::size_t> n,
               std::optional<std::uint64_t> seed, const std::string& out,
               const std::string& catalog_path) {
  auto catalog = load_catalog(catalog_path);
  const Scenario& sc = find_scenario(catalog, name);
  TailReport rep = run_scenario(sc, n, seed);
  ojson j = report_to_json(rep);
  j["scenario"] = sc.name;
  j["ref"] = sc.ref;
  if (!out.empty()) {
    write_file(out + ".json", j.dump(2) + "\n");
    std::ostringstream csv;
    tail_report_csv(csv, rep);
    write_file(out + ".csv", csv.str());
  }
  std::cout << j.dump(2) << "\n";
  return rep.pass() ? 0 : 4;
}

int cmd_catalog(const std::string& catalog_path) {
  auto catalog = load_catalog(catalog_path);
  ojson arr = ojson::array();
  for (const auto& sc : catalog)
    arr.push_back(ojson{{"name", sc.name},
                        {"op", sc.op},
                        {"alpha", sc.alpha},
                        {"n", sc.n},
                        {"seed", sc.seed},
                        {"ref", sc.ref}});
  std::cout << arr.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail-determination toolkit for linear filters"};
  app.require_subcommand(1);
  std::string default_catalog = std::string(RVDET_DATA_DIR) + "/scenarios.json";

  auto* check = app.add_subcommand(
      "check", "decide whether a weight set / distribution / kernel is "
               "tail-determining");
  std::string w_arg, d_arg, k_arg;
  double alpha = 1.0, tol = 0.0;
  std::optional<double> theta_max;
  check->add_option("--weights", w_arg,
                    "comma list of positive weights, or geom:scale,beta");
  check->add_option("--dist", d_arg, "distribution descriptor name:params");
  check->add_option("--kernel", k_arg, "kernel descriptor ou:l, exp2:l, "
                                       "step:v1,m1,...");
  check->add_option("--alpha", alpha, "tail index (default 1)");
  check->add_option("--theta-max", theta_max, "scan window override");
  check->add_option("--tol", tol, "relative zero tolerance override");

  auto* cex = app.add_subcommand("counterexample",
                                 "build a log-periodic noise law and verify "
                                 "the filtered output");
  double cex_alpha = 1.0, cex_a = 0.9, cex_b = 0.0;
  std::optional<double> cex_theta0;
  std::string cex_weights, cex_out = "counterexample";
  std::size_t cex_n = 1000000;
  std::uint64_t cex_seed = 20090401;
  cex->add_option("--alpha", cex_alpha, "tail index (default 1)");
  cex->add_option("--theta0", cex_theta0, "oscillation frequency");
  cex->add_option("--weights", cex_weights,
                  "weight set to derive theta0 from (default 0.5,0.5,1)");
  cex->add_option("--a", cex_a, "cosine amplitude (default 0.9)");
  cex->add_option("--b", cex_b, "sine amplitude (default 0)");
  cex->add_option("--n", cex_n, "Monte Carlo sample count");
  cex->add_option("--seed", cex_seed, "RNG seed");
  cex->add_option("--out", cex_out, "output file prefix");

  auto* curves = app.add_subcommand("curves",
                                    "trace the q=3 failure curves (CSV/SVG)");
  int branches = 8;
  double th_min = 3.0, th_max = 30.0, th_step = 0.05;
  std::string curves_out, curves_svg;
  curves->add_option("--branches", branches, "shift-index search range");
  curves->add_option("--theta-min", th_min, "lower end of the theta range");
  curves->add_option("--theta-max", th_max, "upper end of the theta range");
  curves->add_option("--theta-step", th_step, "theta grid step");
  curves->add_option("--out", curves_out, "CSV output path (default stdout)");
  curves->add_option("--svg", curves_svg, "SVG output path");

  auto* verify = app.add_subcommand("verify", "run a named scenario");
  std::string scen_name, verify_out, catalog_path = default_catalog;
  std::optional<std::size_t> v_n;
  std::optional<std::uint64_t> v_seed;
  verify->add_option("scenario", scen_name, "scenario name")->required();
  verify->add_option("--n", v_n, "sample count override");
  verify->add_option("--seed", v_seed, "seed override");
  verify->add_option("--out", verify_out, "output file prefix");
  verify->add_option("--catalog", catalog_path, "scenario catalog path");

  auto* catalog = app.add_subcommand("catalog", "list shipped scenarios");
  std::string cat_path = default_catalog;
  catalog->add_option("--catalog", cat_path, "scenario catalog path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed())
      return cmd_check(w_arg, d_arg, k_arg, alpha, theta_max, tol);
    if (cex->parsed())
      return cmd_counterexample(cex_alpha, cex_theta0, cex_weights, cex_a,
                                cex_b, cex_n, cex_seed, cex_out);
    if (curves->parsed())
      return cmd_curves(branches, th_min, th_max, th_step, curves_out,
                        curves_svg);
    if (verify->parsed())
      return cmd_verify(scen_name, v_n, v_seed, verify_out, catalog_path);
    if (catalog->parsed()) return cmd_catalog(cat_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
