#pragma once

// Named verification scenarios loaded from a versioned catalog file. Each
// scenario pins an operation, its parameters, defaults for (n, seed), and a
// list of tolerance checks, so `verify <name>` is reproducible end to end.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvdet/serialize.hpp"
#include "rvdet/simulate.hpp"

namespace rvdet {

struct Scenario {
  std::string name;
  std::string ref;  // plain-language statement of the claim being checked
  std::string op;   // weighted-sum | product | integral | slowvar-sum
  double alpha = 1.0;
  std::vector<double> weights;
  std::optional<GeometricWeights> geometric;
  std::optional<Dist> noise;               // weighted-sum / slowvar-sum / jumps
  std::optional<Dist> factor_y, factor_z;  // product
  std::optional<Kernel> kernel;
  double rate = 1.0;
  double horizon = 0.0;
  int q = 0;
  std::size_t n = 200000;
  std::uint64_t seed = 20090401;
  std::vector<ScenarioCheck> checks;
};

inline ScenarioCheck check_from_json(const ojson& j) {
  ScenarioCheck ck;
  ck.type = j.at("type").get<std::string>();
  ck.x = j.value("x", 0.0);
  ck.target = j.value("target", 0.0);
  ck.k_se = j.value("k_se", 3.0);
  ck.tol = j.value("tol", 0.0);
  ck.lo = j.value("lo", -inf);
  ck.hi = j.value("hi", inf);
  ck.factor = j.value("factor", 4.0);
  ck.count = j.value("count", 100);
  return ck;
}

inline Scenario scenario_from_json(const ojson& j) {
  Scenario sc;
  sc.name = j.at("name").get<std::string>();
  sc.ref = j.value("ref", "");
  sc.op = j.at("op").get<std::string>();
  sc.alpha = j.value("alpha", 1.0);
  if (j.contains("weights"))
    sc.weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("geometric")) {
    GeometricWeights g;
    g.scale = j.at("geometric").value("scale", 1.0);
    g.beta = j.at("geometric").at("beta").get<double>();
    sc.geometric = g;
  }
  if (j.contains("noise")) sc.noise = dist_from_json(j.at("noise"));
  if (j.contains("y")) sc.factor_y = dist_from_json(j.at("y"));
  if (j.contains("z")) sc.factor_z = dist_from_json(j.at("z"));
  if (j.contains("kernel")) sc.kernel = kernel_from_json(j.at("kernel"));
  sc.rate = j.value("rate", 1.0);
  sc.horizon = j.value("horizon", 0.0);
  sc.q = j.value("q", 0);
  sc.n = j.value("n", std::size_t{200000});
  sc.seed = j.value("seed", std::uint64_t{20090401});
  if (j.contains("checks"))
    for (const auto& cj : j.at("checks")) sc.checks.push_back(check_from_json(cj));
  return sc;
}

inline std::vector<Scenario> load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario catalog: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ojson j = ojson::parse(ss.str());
  std::vector<Scenario> out;
  for (const auto& sj : j.at("scenarios")) out.push_back(scenario_from_json(sj));
  return out;
}

inline const Scenario& find_scenario(const std::vector<Scenario>& catalog,
                                     const std::string& name) {
  for (const auto& sc : catalog)
    if (sc.name == name) return sc;
  throw std::invalid_argument("unknown scenario: " + name);
}

// truncation rule for infinite weight families: keep the shortest prefix
// whose dropped (alpha - delta)-mass is below 1e-6 of the total, delta = alpha/2
inline std::vector<double> effective_weights(const Scenario& sc) {
  if (!sc.geometric) return sc.weights;
  double r = 0.5 * sc.alpha;
  std::size_t k = geometric_truncation(*sc.geometric, r, 1e-6);
  return geometric_prefix(*sc.geometric, k);
}

inline TailReport run_scenario(const Scenario& sc,
                               std::optional<std::size_t> n_override = {},
                               std::optional<std::uint64_t> seed_override = {}) {
  std::size_t n = n_override.value_or(sc.n);
  std::uint64_t seed = seed_override.value_or(sc.seed);
  std::vector<double> samples;
  TailReport rep;
  SimContext ctx;
  ctx.op = sc.op;
  ctx.alpha = sc.alpha;
  ctx.rate = sc.rate;
  ctx.horizon = sc.horizon;
  ctx.seed = seed;
  if (sc.op == "weighted-sum") {
    auto w = effective_weights(sc);
    if (!sc.noise) throw std::invalid_argument(sc.name + ": missing noise law");
    rep = verify_weighted_sum(w, *sc.noise, sc.alpha, n, seed, &samples);
    ctx.weights = w;
    ctx.noise = sc.noise;
  } else if (sc.op == "product") {
    if (!sc.factor_y || !sc.factor_z)
      throw std::invalid_argument(sc.name + ": missing product factors");
    rep = verify_product(*sc.factor_y, *sc.factor_z, sc.alpha, n, seed,
                         &samples);
    ctx.factor_y = sc.factor_y;
    ctx.factor_z = sc.factor_z;
  } else if (sc.op == "integral") {
    if (!sc.kernel || !sc.noise)
      throw std::invalid_argument(sc.name + ": missing kernel or jump law");
    rep = verify_integral(*sc.kernel, LevyModel{*sc.noise, sc.rate}, sc.alpha,
                          sc.horizon, n, seed, &samples);
    ctx.kernel = sc.kernel;
    ctx.noise = sc.noise;
    if (const auto* st = std::get_if<StepKernel>(&*sc.kernel)) {
      ctx.weights.clear();
      for (const auto& seg : st->segs) ctx.weights.push_back(seg.value);
    }
  } else if (sc.op == "slowvar-sum") {
    if (!sc.noise) throw std::invalid_argument(sc.name + ": missing noise law");
    rep = verify_slow_variation_sum(sc.q, *sc.noise, n, seed, &samples);
    ctx.weights.assign(std::max(sc.q, 1), 1.0);
    ctx.noise = sc.noise;
  } else {
    throw std::invalid_argument("unknown op: " + sc.op);
  }
  ctx.sorted = &samples;
  for (const auto& ck : sc.checks)
    rep.checks.push_back(evaluate_check(ck, rep, ctx));
  return rep;
}

}  // namespace rvdet
