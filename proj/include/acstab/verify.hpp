#pragma once

#include "experiment.hpp"

namespace acstab {

namespace detail {

inline json report_json(const CheckReport& r) {
  return {{"check", r.check}, {"lhs", r.lhs},       {"rhs", r.rhs},
          {"slack", r.slack}, {"std_error", r.std_error}, {"pass", r.pass}};
}

// Worst-slack aggregation across grid points for a statistical check.
struct Aggregate {
  CheckReport worst;
  bool any = false;

  void add(const CheckReport& r) {
    if (!any || r.slack - 3.0 * r.std_error < worst.slack - 3.0 * worst.std_error) worst = r;
    any = true;
    worst.pass = worst.pass && r.pass;
    // keep pass as the conjunction over all points
  }
};

// Closed-form residual of the self-consistent equation at random spectral
// points.
inline CheckReport check_free_fixed_point(const ExperimentConfig& cfg) {
  std::mt19937_64 g(derive_seed(cfg.seed, 9001));
  int K = cfg.tree.branching;
  double max_res = 0.0;
  double min_im = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 128; ++i) {
    double band = 2.0 * std::sqrt(double(K));
    double e = (2.0 * uniform01(g) - 1.0) * 1.5 * band;
    double eta = std::pow(10.0, -4.0 + 4.0 * uniform01(g));  // 1e-4 .. 1
    SpectralPoint zp{e, eta};
    Complex gm = free_fixed_point(K, zp);
    Complex res = double(K) * gm * gm + zp.z() * gm + Complex(1.0, 0.0);
    max_res = std::max(max_res, std::abs(res));
    min_im = std::min(min_im, gm.imag());
  }
  CheckReport r;
  r.check = "free-fixed-point";
  r.lhs = max_res;
  r.rhs = 1e-13;
  r.slack = r.rhs - r.lhs;
  r.pass = max_res < r.rhs && min_im > 0.0;
  return r;
}

// Exact equivalence of the radial tree ratio and the rescaled half-line
// continued fraction.
inline CheckReport check_radial_identity(const ExperimentConfig& cfg) {
  std::mt19937_64 g(derive_seed(cfg.seed, 9002));
  double max_err = 0.0;
  for (int i = 0; i < 64; ++i) {
    int K = (i % 2) ? 3 : 2;
    double rk = std::sqrt(double(K));
    int depth = 300;
    std::vector<double> u(depth), xi(depth), v(depth);
    for (int n = 0; n < depth; ++n) {
      u[n] = 2.0 * uniform01(g) - 1.0;
      xi[n] = 2.0 * uniform01(g) - 1.0;
      v[n] = (u[n] + 0.7 * xi[n]) / rk;
    }
    double e = (2.0 * uniform01(g) - 1.0) * 4.0;
    double eta = std::pow(10.0, -3.0 + 3.0 * uniform01(g));
    SpectralPoint zp{e, eta};
    Complex left = radial_recursion(u, xi, 0.7, K, zp);
    Complex right = halfline_m(v, zp.z() / rk) / rk;
    max_err = std::max(max_err, std::abs(left - right));
  }
  CheckReport r;
  r.check = "radial-identity";
  r.lhs = max_err;
  r.rhs = 1e-12;
  r.slack = r.rhs - r.lhs;
  r.pass = max_err < r.rhs;
  return r;
}

inline TreeInstance verify_instance(const ExperimentConfig& cfg) {
  TreeTopology topo{cfg.tree.branching, std::min(cfg.tree.depth, 10)};
  DisorderSpec dis = cfg.disorder;
  dis.strength = cfg.grid.lambdas[0];
  return build_instance(topo, dis, cfg.potential, derive_seed(cfg.seed, 9003));
}

// Ratio sweep against the direct resolvent column: G_x = -psi_x / psi_parent.
inline CheckReport check_wt_identity(const ExperimentConfig& cfg) {
  TreeInstance inst = verify_instance(cfg);
  double eta = cfg.grid.eta > 0.0 ? cfg.grid.eta : 1e-2;
  SpectralPoint zp{0.5 * (cfg.grid.e_min + cfg.grid.e_max), eta};
  std::vector<Complex> gam = recurse_finite(inst, zp, Complex(0.0, 0.0));
  PsiColumn col = resolvent_column(inst, zp);
  const TreeTopology& t = inst.topology;
  double max_err = 0.0;
  for (std::size_t v = 1; v < gam.size(); ++v) {
    Complex parent = col.psi[t.parent_index(v)];
    if (std::abs(parent) < 1e-300) throw numeric_error("wt-identity: vanishing parent amplitude");
    max_err = std::max(max_err, std::abs(gam[v] + col.psi[v] / parent));
  }
  CheckReport r;
  r.check = "wt-identity";
  r.lhs = max_err;
  r.rhs = 1e-9;
  r.slack = r.rhs - r.lhs;
  r.pass = max_err < r.rhs;
  return r;
}

inline CheckReport check_current_deficit(const ExperimentConfig& cfg) {
  TreeInstance inst = verify_instance(cfg);
  double eta = cfg.grid.eta > 0.0 ? cfg.grid.eta : 1e-2;
  SpectralPoint zp{0.5 * (cfg.grid.e_min + cfg.grid.e_max), eta};
  std::vector<Complex> gam = recurse_finite(inst, zp, Complex(0.0, 0.0));
  PsiColumn col = resolvent_column(inst, zp);
  DeficitReport rep = current_deficit(inst, col.psi, gam, zp);
  double scale = 0.0;
  for (double v : rep.eta_psi2) scale = std::max(scale, v);
  CheckReport r;
  r.check = "current-deficit";
  r.lhs = rep.max_identity_error / scale;
  r.rhs = 1e-8;
  r.slack = r.rhs - r.lhs;
  r.pass = r.lhs < r.rhs && rep.min_deficit >= -1e-12 * scale;
  return r;
}

inline CheckReport check_qg_bands(const ExperimentConfig& cfg) {
  int K = cfg.tree.branching;
  double L = cfg.qgraph.base_length;
  std::vector<QGraphBand> bands = regular_bands(K, L, cfg.qgraph.bands);
  std::vector<double> scan =
      qg_band_edges_from_fixed_point(K, L, double(cfg.qgraph.bands) * kPi / L);
  CheckReport r;
  r.check = "qg-bands";
  double max_err = 0.0;
  bool complete = scan.size() == 2 * bands.size();
  if (complete)
    for (std::size_t b = 0; b < bands.size(); ++b) {
      max_err = std::max(max_err, std::abs(scan[2 * b] - bands[b].k_lo));
      max_err = std::max(max_err, std::abs(scan[2 * b + 1] - bands[b].k_hi));
    }
  r.lhs = complete ? max_err : std::numeric_limits<double>::infinity();
  r.rhs = 1e-4;
  r.slack = r.rhs - r.lhs;
  r.pass = complete && max_err < r.rhs;
  return r;
}

}  // namespace detail

inline CommandResult run_verify(const ExperimentConfig& cfg, int workers) {
  using namespace detail;
  // Statistical checks share one pooled run per (lambda, energy) point.
  bool want_stats = false;
  for (const auto& c : cfg.verify.checks)
    want_stats = want_stats || c == "jensen" || c == "flu1" || c == "flu2" ||
                 c == "log-current" || c == "equivalence";
  for (const auto& c : cfg.verify.checks) {
    if (c != "free-fixed-point" && c != "radial-identity" && c != "wt-identity" &&
        c != "current-deficit" && c != "jensen" && c != "flu1" && c != "flu2" &&
        c != "log-current" && c != "equivalence" && c != "qg-bands")
      throw config_error("verify: unknown check '" + c + "'");
  }

  std::vector<double> energies = linspace(cfg.grid.e_min, cfg.grid.e_max, cfg.verify.points);
  std::vector<PointSummary> points;
  if (want_stats) {
    std::size_t nl = cfg.grid.lambdas.size(), ne = energies.size();
    points.resize(nl * ne);
    parallel_for(nl * ne, workers, [&](std::size_t idx) {
      std::size_t li = idx / ne, ei = idx % ne;
      PoolRunParams p = params_for(cfg, cfg.grid.lambdas[li], true);
      points[idx] = pool_point(p, energies[ei], derive_seed(cfg.seed, 20000 + idx));
    });
  }

  json checks = json::array();
  bool all_pass = true;
  for (const auto& name : cfg.verify.checks) {
    CheckReport rep;
    if (name == "free-fixed-point") {
      rep = check_free_fixed_point(cfg);
    } else if (name == "radial-identity") {
      rep = check_radial_identity(cfg);
    } else if (name == "wt-identity") {
      rep = check_wt_identity(cfg);
    } else if (name == "current-deficit") {
      rep = check_current_deficit(cfg);
    } else if (name == "qg-bands") {
      rep = check_qg_bands(cfg);
    } else if (name == "jensen") {
      Aggregate agg;
      for (std::size_t i = 0; i < points.size(); ++i) {
        TupleSet t = draw_tuples(points[i].samples, cfg.tree.branching, cfg.pool.tuples,
                                 derive_seed(cfg.seed, 30000 + i),
                                 [](Complex g) { return g.imag(); });
        CheckReport r = jensen_improvement_check(t, cfg.quantile.alpha, cfg.disorder.kappa);
        agg.add(r);
      }
      rep = agg.worst;
      rep.check = "jensen";
    } else if (name == "flu1" || name == "flu2") {
      Aggregate agg;
      for (const auto& p : points) {
        CheckReport r = name == "flu1"
                            ? fluctuation_bound_im(p.samples, cfg.tree.branching,
                                                   cfg.quantile.alpha, cfg.disorder.kappa)
                            : fluctuation_bound_mod(p.samples, cfg.tree.branching,
                                                    cfg.quantile.alpha, cfg.disorder.kappa);
        agg.add(r);
      }
      rep = agg.worst;
      rep.check = name;
    } else if (name == "log-current") {
      Aggregate agg;
      for (std::size_t i = 0; i < points.size(); ++i) {
        auto [lo, hi] = log_current_check(points[i].samples, cfg.tree.branching,
                                          cfg.pool.tuples, derive_seed(cfg.seed, 40000 + i));
        agg.add(lo);
        agg.add(hi);
      }
      rep = agg.worst;
      rep.check = "log-current";
    } else if (name == "equivalence") {
      WireSpec wire;
      wire.coupling = cfg.scatter.coupling;
      wire.momentum = cfg.scatter.momentum;
      long long disagree = 0, used = 0;
      for (const auto& p : points) {
        // Skip the ambiguous zone around the detection threshold.
        if (std::abs(p.im.value - cfg.scatter.gamma_tol) < 0.5 * cfg.scatter.gamma_tol) continue;
        ++used;
        Complex gamma(p.re.value, std::max(p.im.value, 0.0));
        ReflectionResult sol = reflection(gamma, wire);
        bool wire_open = std::abs(sol.r) < 1.0 - cfg.scatter.r_tol;
        bool tree_open = p.im.value > cfg.scatter.gamma_tol;
        if (wire_open != tree_open) ++disagree;
      }
      rep.check = "equivalence";
      rep.lhs = double(disagree);
      rep.rhs = 0.0;
      rep.slack = -double(disagree);
      rep.std_error = 0.0;
      rep.pass = used > 0 && disagree == 0;
    }
    all_pass = all_pass && rep.pass;
    checks.push_back(report_json(rep));
  }

  json report;
  report["schema_version"] = 1;
  report["experiment"] = "verify";
  report["config"] = config_to_json(cfg);
  report["checks"] = checks;
  report["all_pass"] = all_pass;

  CommandResult res;
  std::string path = out_path(cfg, "_verify.json");
  write_text_file(path, report.dump(2) + "\n");
  res.files.push_back(path);
  res.checks_passed = all_pass;
  return res;
}

}  // namespace acstab
