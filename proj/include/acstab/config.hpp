#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "green_recursion.hpp"
#include "tree_model.hpp"

namespace acstab {

using json = nlohmann::json;

struct TreeCfg {
  int branching = 2;
  int depth = 12;
};

struct GridCfg {
  double e_min = -3.5;
  double e_max = 3.5;
  int points = 101;
  std::vector<double> lambdas{0.0};
  double eta = 0.0;  // fixed broadening; 0 means "descend the ladder"

  void validate() const {
    if (!(e_min < e_max)) throw config_error("grid: need e_min < e_max");
    if (points < 1) throw config_error("grid: points must be >= 1");
    if (lambdas.empty()) throw config_error("grid: lambdas must be nonempty");
    for (double l : lambdas)
      if (!(l >= 0.0)) throw config_error("grid: lambdas must be >= 0");
    if (eta < 0.0) throw config_error("grid: eta must be >= 0");
  }
};

struct PoolCfg {
  std::size_t size = 100000;
  int burn_in = 100;
  int sweeps = 200;
  std::size_t tuples = 20000;
  int chain_depth = 4000;  // radial-ensemble recursion depth

  void validate() const {
    if (size < 1000) throw config_error("pool: size must be >= 1000");
    if (burn_in < 1) throw config_error("pool: burn_in must be >= 1");
    if (sweeps < 1) throw config_error("pool: sweeps must be >= 1");
    if (tuples < 100) throw config_error("pool: tuples must be >= 100");
    if (chain_depth < 10) throw config_error("pool: chain_depth must be >= 10");
  }
};

struct QuantileCfg {
  double alpha = 0.25;

  void validate() const {
    if (!(alpha > 0.0) || !(alpha < 0.5))
      throw config_error("quantile: alpha must lie in (0, 1/2)");
  }
};

struct QGraphCfg {
  double base_length = 1.0;
  double alpha_root = 0.0;
  int bands = 3;
  double eta = 0.01;      // Im k^2 used for the measure profile
  double threshold = 0.0; // 0 means "relative to the clean profile peak"

  void validate() const {
    if (!(base_length > 0.0)) throw config_error("qgraph: base_length must be > 0");
    if (bands < 1) throw config_error("qgraph: bands must be >= 1");
    if (!(eta > 0.0)) throw config_error("qgraph: eta must be > 0");
    if (threshold < 0.0) throw config_error("qgraph: threshold must be >= 0");
  }
};

struct ScatterCfg {
  double coupling = 1.0;
  double momentum = 0.5 * kPi;
  double gamma_tol = 1e-3;  // tree side is "open" when mean Im Gamma exceeds this
  double r_tol = 1e-6;      // wire side is "open" when |r| < 1 - r_tol

  void validate() const {
    if (!(coupling > 0.0)) throw config_error("scatter: coupling must be > 0");
    if (!(momentum > 0.0) || !(momentum < kPi))
      throw config_error("scatter: momentum must lie in (0, pi)");
    if (!(gamma_tol > 0.0)) throw config_error("scatter: gamma_tol must be > 0");
    if (!(r_tol > 0.0) || r_tol >= 1.0) throw config_error("scatter: r_tol must lie in (0, 1)");
  }
};

struct VerifyCfg {
  std::vector<std::string> checks{"free-fixed-point", "radial-identity", "wt-identity",
                                  "current-deficit", "jensen", "flu1", "flu2",
                                  "log-current", "equivalence", "qg-bands"};
  int points = 5;  // energy grid used by the statistical checks

  void validate() const {
    if (checks.empty()) throw config_error("verify: checks must be nonempty");
    if (points < 1) throw config_error("verify: points must be >= 1");
  }
};

struct OutputCfg {
  std::string directory = ".";
  std::string basename = "acstab";
  bool svg = false;

  void validate() const {
    if (basename.empty()) throw config_error("output: basename must be nonempty");
  }
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string experiment;
  std::uint64_t seed = 1;
  TreeCfg tree;
  DisorderSpec disorder;
  PotentialSpec potential;
  GridCfg grid;
  EtaLadder ladder;
  PoolCfg pool;
  QuantileCfg quantile;
  QGraphCfg qgraph;
  ScatterCfg scatter;
  VerifyCfg verify;
  OutputCfg output;

  void validate() const {
    if (schema_version != 1) throw config_error("config: unsupported schema_version");
    static const char* kinds[] = {"density", "phase-sweep", "verify", "qgraph", "scatter"};
    bool ok = false;
    for (const char* k : kinds) ok = ok || experiment == k;
    if (!ok) throw config_error("config: unknown experiment '" + experiment + "'");
    if (tree.branching < 2) throw config_error("tree: branching must be >= 2");
    if (tree.depth < 0) throw config_error("tree: depth must be >= 0");
    disorder.validate();
    potential.validate();
    grid.validate();
    ladder.validate();
    pool.validate();
    quantile.validate();
    qgraph.validate();
    scatter.validate();
    verify.validate();
    output.validate();
  }
};

namespace detail {

inline void expect_keys(const json& j, const char* section,
                        std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw config_error(std::string("config: ") + section + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known)
      throw config_error(std::string("config: unknown key '") + it.key() + "' in " + section);
  }
}

template <class T>
T field(const json& j, const char* section, const char* key, const T& defv) {
  if (!j.contains(key)) return defv;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error(std::string("config: bad value for ") + section + "." + key + ": " +
                       e.what());
  }
}

inline std::string family_name(DisorderFamily f) {
  switch (f) {
    case DisorderFamily::uniform: return "uniform";
    case DisorderFamily::two_point: return "two_point";
    case DisorderFamily::truncated_gaussian: return "truncated_gaussian";
  }
  return "uniform";
}

inline DisorderFamily family_from(const std::string& s) {
  if (s == "uniform") return DisorderFamily::uniform;
  if (s == "two_point") return DisorderFamily::two_point;
  if (s == "truncated_gaussian") return DisorderFamily::truncated_gaussian;
  throw config_error("config: unknown disorder family '" + s + "'");
}

inline std::string potential_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::radial_periodic: return "radial_periodic";
    case PotentialKind::quasi_periodic: return "quasi_periodic";
  }
  return "zero";
}

inline PotentialKind potential_from(const std::string& s) {
  if (s == "zero") return PotentialKind::zero;
  if (s == "radial_periodic") return PotentialKind::radial_periodic;
  if (s == "quasi_periodic") return PotentialKind::quasi_periodic;
  throw config_error("config: unknown potential kind '" + s + "'");
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  using namespace detail;
  expect_keys(j, "root",
              {"schema_version", "experiment", "seed", "tree", "disorder", "potential", "grid",
               "ladder", "pool", "quantile", "qgraph", "scatter", "verify", "output"});
  ExperimentConfig c;
  c.schema_version = field(j, "root", "schema_version", 1);
  if (!j.contains("experiment")) throw config_error("config: missing field 'experiment'");
  c.experiment = field(j, "root", "experiment", std::string());
  c.seed = field(j, "root", "seed", std::uint64_t(1));

  if (j.contains("tree")) {
    const json& t = j.at("tree");
    expect_keys(t, "tree", {"branching", "depth"});
    c.tree.branching = field(t, "tree", "branching", c.tree.branching);
    c.tree.depth = field(t, "tree", "depth", c.tree.depth);
  }
  if (j.contains("disorder")) {
    const json& d = j.at("disorder");
    expect_keys(d, "disorder", {"family", "correlation", "strength", "kappa", "sigma", "cutoff"});
    c.disorder.family = family_from(field(d, "disorder", "family", std::string("uniform")));
    std::string corr = field(d, "disorder", "correlation", std::string("iid"));
    if (corr == "iid")
      c.disorder.correlation = DisorderCorrelation::iid;
    else if (corr == "radial")
      c.disorder.correlation = DisorderCorrelation::radial;
    else
      throw config_error("config: unknown disorder correlation '" + corr + "'");
    c.disorder.strength = field(d, "disorder", "strength", 0.0);
    c.disorder.kappa = field(d, "disorder", "kappa", 1.0);
    c.disorder.sigma = field(d, "disorder", "sigma", 1.0);
    c.disorder.cutoff = field(d, "disorder", "cutoff", 3.0);
  }
  if (j.contains("potential")) {
    const json& p = j.at("potential");
    expect_keys(p, "potential", {"kind", "values", "amplitude", "frequency", "phase"});
    c.potential.kind = potential_from(field(p, "potential", "kind", std::string("zero")));
    c.potential.values = field(p, "potential", "values", std::vector<double>{});
    c.potential.amplitude = field(p, "potential", "amplitude", 0.0);
    c.potential.frequency = field(p, "potential", "frequency", 0.0);
    c.potential.phase = field(p, "potential", "phase", 0.0);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    expect_keys(g, "grid", {"e_min", "e_max", "points", "lambdas", "eta"});
    c.grid.e_min = field(g, "grid", "e_min", c.grid.e_min);
    c.grid.e_max = field(g, "grid", "e_max", c.grid.e_max);
    c.grid.points = field(g, "grid", "points", c.grid.points);
    c.grid.lambdas = field(g, "grid", "lambdas", c.grid.lambdas);
    c.grid.eta = field(g, "grid", "eta", c.grid.eta);
  }
  if (j.contains("ladder")) {
    const json& l = j.at("ladder");
    expect_keys(l, "ladder", {"start", "factor", "floor", "tol"});
    c.ladder.start = field(l, "ladder", "start", c.ladder.start);
    c.ladder.factor = field(l, "ladder", "factor", c.ladder.factor);
    c.ladder.floor = field(l, "ladder", "floor", c.ladder.floor);
    c.ladder.tol = field(l, "ladder", "tol", c.ladder.tol);
  }
  if (j.contains("pool")) {
    const json& p = j.at("pool");
    expect_keys(p, "pool", {"size", "burn_in", "sweeps", "tuples", "chain_depth"});
    c.pool.size = field(p, "pool", "size", c.pool.size);
    c.pool.burn_in = field(p, "pool", "burn_in", c.pool.burn_in);
    c.pool.sweeps = field(p, "pool", "sweeps", c.pool.sweeps);
    c.pool.tuples = field(p, "pool", "tuples", c.pool.tuples);
    c.pool.chain_depth = field(p, "pool", "chain_depth", c.pool.chain_depth);
  }
  if (j.contains("quantile")) {
    const json& q = j.at("quantile");
    expect_keys(q, "quantile", {"alpha"});
    c.quantile.alpha = field(q, "quantile", "alpha", c.quantile.alpha);
  }
  if (j.contains("qgraph")) {
    const json& q = j.at("qgraph");
    expect_keys(q, "qgraph", {"base_length", "alpha_root", "bands", "eta", "threshold"});
    c.qgraph.base_length = field(q, "qgraph", "base_length", c.qgraph.base_length);
    c.qgraph.alpha_root = field(q, "qgraph", "alpha_root", c.qgraph.alpha_root);
    c.qgraph.bands = field(q, "qgraph", "bands", c.qgraph.bands);
    c.qgraph.eta = field(q, "qgraph", "eta", c.qgraph.eta);
    c.qgraph.threshold = field(q, "qgraph", "threshold", c.qgraph.threshold);
  }
  if (j.contains("scatter")) {
    const json& s = j.at("scatter");
    expect_keys(s, "scatter", {"coupling", "momentum", "gamma_tol", "r_tol"});
    c.scatter.coupling = field(s, "scatter", "coupling", c.scatter.coupling);
    c.scatter.momentum = field(s, "scatter", "momentum", c.scatter.momentum);
    c.scatter.gamma_tol = field(s, "scatter", "gamma_tol", c.scatter.gamma_tol);
    c.scatter.r_tol = field(s, "scatter", "r_tol", c.scatter.r_tol);
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    expect_keys(v, "verify", {"checks", "points"});
    c.verify.checks = field(v, "verify", "checks", c.verify.checks);
    c.verify.points = field(v, "verify", "points", c.verify.points);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    expect_keys(o, "output", {"directory", "basename", "svg"});
    c.output.directory = field(o, "output", "directory", c.output.directory);
    c.output.basename = field(o, "output", "basename", c.output.basename);
    c.output.svg = field(o, "output", "svg", c.output.svg);
  }
  c.validate();
  return c;
}

// Canonical form: every field is emitted, keys are sorted by the json
// container, numbers print in shortest round-trip form.  parse(dump(c))
// reproduces c exactly.
inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["tree"] = {{"branching", c.tree.branching}, {"depth", c.tree.depth}};
  j["disorder"] = {{"family", detail::family_name(c.disorder.family)},
                   {"correlation",
                    c.disorder.correlation == DisorderCorrelation::iid ? "iid" : "radial"},
                   {"strength", c.disorder.strength},
                   {"kappa", c.disorder.kappa},
                   {"sigma", c.disorder.sigma},
                   {"cutoff", c.disorder.cutoff}};
  j["potential"] = {{"kind", detail::potential_name(c.potential.kind)},
                    {"values", c.potential.values},
                    {"amplitude", c.potential.amplitude},
                    {"frequency", c.potential.frequency},
                    {"phase", c.potential.phase}};
  j["grid"] = {{"e_min", c.grid.e_min},
               {"e_max", c.grid.e_max},
               {"points", c.grid.points},
               {"lambdas", c.grid.lambdas},
               {"eta", c.grid.eta}};
  j["ladder"] = {{"start", c.ladder.start},
                 {"factor", c.ladder.factor},
                 {"floor", c.ladder.floor},
                 {"tol", c.ladder.tol}};
  j["pool"] = {{"size", c.pool.size},
               {"burn_in", c.pool.burn_in},
               {"sweeps", c.pool.sweeps},
               {"tuples", c.pool.tuples},
               {"chain_depth", c.pool.chain_depth}};
  j["quantile"] = {{"alpha", c.quantile.alpha}};
  j["qgraph"] = {{"base_length", c.qgraph.base_length},
                 {"alpha_root", c.qgraph.alpha_root},
                 {"bands", c.qgraph.bands},
                 {"eta", c.qgraph.eta},
                 {"threshold", c.qgraph.threshold}};
  j["scatter"] = {{"coupling", c.scatter.coupling},
                  {"momentum", c.scatter.momentum},
                  {"gamma_tol", c.scatter.gamma_tol},
                  {"r_tol", c.scatter.r_tol}};
  j["verify"] = {{"checks", c.verify.checks}, {"points", c.verify.points}};
  j["output"] = {{"directory", c.output.directory},
                 {"basename", c.output.basename},
                 {"svg", c.output.svg}};
  return j;
}

inline ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string dump_config(const ExperimentConfig& c) { return config_to_json(c).dump(); }

}  // namespace acstab
