// Acceptance gate.  Twelve numbered end-to-end checks, one line each; the
// process exits nonzero if any line fails.  All thresholds and run sizes are
// fixed here on purpose: this binary is the contract, not a harness.

#include <acstab/acstab.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace acstab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 412;

int g_workers = 1;
int g_failures = 0;
fs::path g_scratch;

struct Criterion {
  bool ok = true;
  std::vector<std::string> notes;  // failure details
  std::string facts;               // measured values shown on the status line

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
  void fact(const std::string& key, double v, int digits = 6) {
    facts += " " + key + "=" + fmt_g(v, digits);
  }
};

template <class Body>
void criterion(int num, const char* name, double limit_s, Body&& body) {
  Criterion c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.notes.push_back(std::string("exception: ") + e.what());
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!(dt < limit_s)) {
    c.ok = false;
    c.notes.push_back("runtime " + fmt_g(dt, 4) + " s over the " + fmt_g(limit_s, 4) +
                      " s budget");
  }
  if (!c.ok) ++g_failures;
  std::printf("[%s] %02d %-20s %6.1f s %s\n", c.ok ? "PASS" : "FAIL", num, name, dt,
              c.facts.c_str());
  for (const auto& n : c.notes) std::printf("          - %s\n", n.c_str());
  std::fflush(stdout);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Numeric column of a CSV written by this project (comments, header, rows).
std::vector<double> csv_column(const fs::path& p, std::size_t col) {
  std::ifstream in(p);
  std::string line;
  std::vector<double> out;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::stringstream row(line);
    std::string cell;
    for (std::size_t i = 0; i <= col; ++i)
      if (!std::getline(row, cell, ',')) throw config_error("csv column out of range");
    out.push_back(std::strtod(cell.c_str(), nullptr));
  }
  return out;
}

fs::path scratch_dir(const std::string& name) {
  fs::path d = g_scratch / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// --------------------------------------------------------------------------
// 1. closed-form fixed point at random spectral points

void check_fixed_point(Criterion& c) {
  std::mt19937_64 g(derive_seed(kSeed, 101));
  double max_res = 0.0;
  double min_im = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    double e = (2.0 * uniform01(g) - 1.0) * 4.5;
    double eta = std::pow(10.0, -3.0 + 3.0 * uniform01(g));
    SpectralPoint zp{e, eta};
    Complex gm = free_fixed_point(2, zp);
    max_res = std::max(max_res, std::abs(2.0 * gm * gm + zp.z() * gm + Complex(1.0, 0.0)));
    min_im = std::min(min_im, gm.imag());
  }
  c.fact("max_residual", max_res, 3);
  c.expect(max_res < 1e-13, "quadratic residual reached " + fmt_g(max_res, 4));
  c.expect(min_im > 0.0, "fixed point left the upper half plane");
}

// --------------------------------------------------------------------------
// 2. support and height of the clean density of states

void check_band_support(Criterion& c) {
  PoolRunParams p;
  p.branching = 2;
  p.pool.size = 1000;
  p.pool.burn_in = 60;
  p.pool.sweeps = 30;
  p.ladder = EtaLadder{1.0, 2.0, 1e-3, 1e-5};
  std::vector<double> energies = linspace(-3.5, 3.5, 400);
  std::vector<double> dens(energies.size());
  parallel_for(energies.size(), g_workers, [&](std::size_t i) {
    dens[i] = pool_point(p, energies[i], derive_seed(kSeed, 200 + i)).im.value / kPi;
  });
  double thr = default_density_threshold(2);
  std::ptrdiff_t lo = -1, hi = -1;
  for (std::size_t i = 0; i < dens.size(); ++i)
    if (dens[i] > thr) {
      if (lo < 0) lo = std::ptrdiff_t(i);
      hi = std::ptrdiff_t(i);
    }
  c.expect(lo >= 0, "no point above the detection threshold");
  const double edge = 2.0 * std::sqrt(2.0);
  if (lo >= 0) {
    c.fact("lo", energies[std::size_t(lo)]);
    c.fact("hi", energies[std::size_t(hi)]);
    c.expect(std::abs(energies[std::size_t(lo)] + edge) < 0.05, "lower support endpoint off");
    c.expect(std::abs(energies[std::size_t(hi)] - edge) < 0.05, "upper support endpoint off");
  }
  double rho0 = pool_point(p, 0.0, derive_seed(kSeed, 299)).im.value / kPi;
  c.fact("rho0", rho0);
  c.expect(std::abs(rho0 - 1.0 / (kPi * std::sqrt(2.0))) < 2e-2,
           "density at the band center is " + fmt_g(rho0, 6));
}

// --------------------------------------------------------------------------
// 3. Lyapunov functional of the clean model

void check_lyapunov(Criterion& c) {
  PoolRunParams p;
  p.branching = 2;
  p.pool.size = 2000;
  p.pool.burn_in = 80;
  p.pool.sweeps = 20;
  p.ladder = EtaLadder{1.0, 2.0, 1e-3, 1e-9};
  p.keep_samples = true;
  for (double e : {0.0, 1.0, 2.0}) {
    PointSummary s = pool_point(p, e, derive_seed(kSeed, 300 + std::uint64_t(e)));
    Estimate gam = lyapunov(s.samples, 2);
    c.fact("g" + fmt_g(e, 1), gam.value, 3);
    c.expect(gam.value < 1e-3, "in-band exponent at E=" + fmt_g(e, 3) + " is " +
                                   fmt_g(gam.value, 4));
  }
  PointSummary s3 = pool_point(p, 3.0, derive_seed(kSeed, 310));
  Estimate g3 = lyapunov(s3.samples, 2);
  c.fact("g3", g3.value);
  c.expect(std::abs(g3.value - 0.346574) < 1e-3,
           "exponent at E=3 is " + fmt_g(g3.value, 7) + ", want 0.346574 +- 1e-3");
}

// --------------------------------------------------------------------------
// 4. averaging improvement over Jensen

void check_jensen(Criterion& c) {
  TupleSet two;
  two.k = 2;
  two.values = {1, 1, 1, 2, 2, 1, 2, 2};
  CheckReport exact = jensen_improvement_check(two, 0.25, 1.0);
  double margin = 0.25 * (2.0 * std::log(3.0) - 3.0 * std::log(2.0)) - 1.0 / 256.0;
  c.fact("exact_margin", exact.slack, 8);
  c.expect(std::abs(exact.slack - margin) < 1e-6, "enumerated two-point margin off");

  std::uint64_t stream = 400;
  for (double lambda : {0.1, 0.3}) {
    PoolRunParams p;
    p.branching = 2;
    p.disorder.strength = lambda;
    p.pool.size = 20000;
    p.pool.burn_in = 200;
    p.pool.sweeps = 20;
    p.fixed_eta = 1e-3;
    p.keep_samples = true;
    PointSummary s = pool_point(p, 0.5, derive_seed(kSeed, ++stream));
    TupleSet mc = draw_tuples(s.samples, 2, 20000, derive_seed(kSeed, ++stream),
                              [](Complex g) { return g.imag(); });
    CheckReport rep = jensen_improvement_check(mc, 0.25, 1.0);
    c.fact("slack" + fmt_g(lambda, 2), rep.slack, 3);
    c.expect(rep.slack >= -3.0 * rep.std_error,
             "margin at lambda=" + fmt_g(lambda, 3) + " is " + fmt_g(rep.slack, 4) +
                 " +- " + fmt_g(rep.std_error, 3));
  }
}

// --------------------------------------------------------------------------
// 5. quantile-width fluctuation bounds across the whole grid

void check_fluctuation(Criterion& c) {
  std::vector<double> energies = linspace(-3.5, 3.5, 200);
  std::uint64_t block = 500;
  for (double lambda : {0.1, 0.3}) {
    std::vector<CheckReport> im_rep(energies.size()), mod_rep(energies.size());
    std::uint64_t base = (block += 1000);
    parallel_for(energies.size(), g_workers, [&](std::size_t i) {
      PoolRunParams p;
      p.branching = 2;
      p.disorder.strength = lambda;
      p.pool.size = 4000;
      p.pool.burn_in = 100;
      p.pool.sweeps = 10;
      p.fixed_eta = 1e-3;
      p.keep_samples = true;
      PointSummary s = pool_point(p, energies[i], derive_seed(kSeed, base + i));
      im_rep[i] = fluctuation_bound_im(s.samples, 2, 0.25, 1.0);
      mod_rep[i] = fluctuation_bound_mod(s.samples, 2, 0.25, 1.0);
    });
    int viol_im = 0, viol_mod = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < energies.size(); ++i) {
      if (!im_rep[i].pass) ++viol_im;
      if (!mod_rep[i].pass) ++viol_mod;
      worst = std::min(worst, im_rep[i].slack);
    }
    c.fact("worst_slack" + fmt_g(lambda, 2), worst, 3);
    c.expect(viol_im == 0, fmt_g(viol_im, 3) + " width-vs-Im violations at lambda=" +
                               fmt_g(lambda, 3));
    c.expect(viol_mod == 0, fmt_g(viol_mod, 3) + " width-vs-modulus violations at lambda=" +
                                fmt_g(lambda, 3));
  }
}

// --------------------------------------------------------------------------
// 6. vertex current identity on a finite tree

void check_current(Criterion& c) {
  TreeTopology topo{2, 8};
  DisorderSpec dis;
  dis.strength = 0.4;
  PotentialSpec pot;
  TreeInstance inst = build_instance(topo, dis, pot, derive_seed(kSeed, 600));
  const double etas[3] = {1e-2, 1e-3, 1e-4};
  double total[3] = {0, 0, 0};
  for (int j = 0; j < 3; ++j) {
    SpectralPoint zp{0.7, etas[j]};
    std::vector<Complex> gam = recurse_finite(inst, zp, Complex(0.0, 0.0));
    PsiColumn col = resolvent_column(inst, zp);
    DeficitReport rep = current_deficit(inst, col.psi, gam, zp);
    double max_psi2 = 0.0;
    for (Complex a : col.psi) max_psi2 = std::max(max_psi2, std::norm(a));
    for (std::size_t v = 1; v < rep.deficit.size(); ++v) total[j] += rep.deficit[v];
    if (j == 0) {
      c.fact("identity_err", rep.max_identity_error / max_psi2, 3);
      c.expect(rep.max_identity_error < 1e-10 * max_psi2, "balance identity violated");
      c.expect(rep.min_deficit > 0.0, "negative deficit found");
    }
  }
  double r1 = total[1] / total[0], r2 = total[2] / total[1];
  c.fact("decade_ratio1", r1, 4);
  c.fact("decade_ratio2", r2, 4);
  c.expect(r1 > 0.05 && r1 < 0.2, "deficit not linear from eta=1e-2 to 1e-3");
  c.expect(r2 > 0.05 && r2 < 0.2, "deficit not linear from eta=1e-3 to 1e-4");
}

// --------------------------------------------------------------------------
// 7. radial tree equals rescaled half line

void check_radial_reduction(Criterion& c) {
  std::mt19937_64 g(derive_seed(kSeed, 700));
  const int depth = 1000;
  double max_err = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    int K = (rep % 2) ? 3 : 2;
    double rk = std::sqrt(double(K));
    std::vector<double> u(depth), xi(depth), v(depth);
    for (int n = 0; n < depth; ++n) {
      u[std::size_t(n)] = 2.0 * uniform01(g) - 1.0;
      xi[std::size_t(n)] = 2.0 * uniform01(g) - 1.0;
      v[std::size_t(n)] = (u[std::size_t(n)] + 0.7 * xi[std::size_t(n)]) / rk;
    }
    double e = (2.0 * uniform01(g) - 1.0) * 4.5;
    double eta = std::pow(10.0, -3.0 + 3.0 * uniform01(g));
    SpectralPoint zp{e, eta};
    Complex left = radial_recursion(u, xi, 0.7, K, zp);
    Complex right = halfline_m(v, zp.z() / rk) / rk;
    max_err = std::max(max_err, std::abs(left - right));
  }
  c.fact("max_err", max_err, 3);
  c.expect(max_err < 1e-12, "reduction identity residual " + fmt_g(max_err, 4));
}

// --------------------------------------------------------------------------
// 8. radially correlated disorder destroys the ac component

void check_radial_instability(Criterion& c) {
  DisorderSpec dis;
  dis.family = DisorderFamily::two_point;
  dis.correlation = DisorderCorrelation::radial;
  dis.strength = 0.5;
  PotentialSpec pot;
  LyapunovRun run = halfline_lyapunov(dis, pot, 2, 0.0, 2000000, derive_seed(kSeed, 800));
  c.fact("gamma_halfline", run.gamma, 5);
  c.expect(run.gamma - 3.0 * run.std_error > 0.01,
           "half-line exponent " + fmt_g(run.gamma, 5) + " +- " + fmt_g(run.std_error, 3));

  double free_im = free_fixed_point(2, SpectralPoint{0.0, 0.0}).imag();
  std::vector<double> rungs = EtaLadder{1.0, 4.0, 1e-5, 1e-12}.rungs();
  double geo = free_im, first = 0.0;
  for (std::size_t r = 0; r < rungs.size(); ++r) {
    std::vector<Complex> samples = radial_ensemble(dis, pot, 2, SpectralPoint{0.0, rungs[r]},
                                                   2000, 1500, derive_seed(kSeed, 810 + r));
    double s = 0.0;
    for (Complex gm : samples) s += std::log(gm.imag());
    geo = std::exp(s / double(samples.size()));
    if (r == 0) first = geo;
  }
  c.fact("typical_im", geo, 3);
  c.expect(geo < first, "typical Im did not decrease down the ladder");
  c.expect(geo < 1e-2 * free_im,
           "typical Im " + fmt_g(geo, 4) + " not below 1e-2 of the free value " +
               fmt_g(free_im, 6));
}

// --------------------------------------------------------------------------
// 9. L1 convergence of the density to the free one as lambda -> 0

void check_l1_convergence(Criterion& c) {
  const int npts = 41;
  std::vector<double> energies = linspace(-1.0, 1.0, npts);
  DensityCurve free_curve;
  free_curve.energies = energies;
  free_curve.mean_im.resize(energies.size());
  free_curve.se_im.assign(energies.size(), 0.0);
  for (std::size_t i = 0; i < energies.size(); ++i)
    free_curve.mean_im[i] = std::sqrt(std::max(0.0, 8.0 - energies[i] * energies[i])) / 4.0;

  const double lambdas[4] = {0.4, 0.2, 0.1, 0.05};
  double dist[4] = {0, 0, 0, 0};
  for (int li = 0; li < 4; ++li) {
    DensityCurve cur;
    cur.energies = energies;
    cur.eta = std::max(1e-3, lambdas[li] * lambdas[li]);
    cur.mean_im.resize(energies.size());
    cur.se_im.assign(energies.size(), 0.0);
    parallel_for(energies.size(), g_workers, [&](std::size_t i) {
      PoolRunParams p;
      p.branching = 2;
      p.disorder.strength = lambdas[li];
      p.pool.size = 4000;
      p.pool.burn_in = 120;
      p.pool.sweeps = 100;
      p.fixed_eta = cur.eta;
      PointSummary s = pool_point(p, energies[i],
                                  derive_seed(kSeed, 900 + std::uint64_t(li) * 100 + i));
      cur.mean_im[i] = s.im.value;
    });
    dist[li] = l1_density_distance(cur, free_curve, -1.0, 1.0);
    c.fact("D" + fmt_g(lambdas[li], 2), dist[li], 4);
  }
  c.expect(dist[0] > dist[1] && dist[1] > dist[2] && dist[2] > dist[3],
           "distances not strictly decreasing");
  c.expect(dist[3] < 0.5 * dist[0], "final distance not below half the first");
}

// --------------------------------------------------------------------------
// 10. metric tree bands and the disorder ladder of spectral measures

void check_qgraph(Criterion& c) {
  double theta = band_theta(2);
  c.fact("theta", theta, 9);
  c.expect(std::abs(theta - 0.339836909454121937) < 1e-9, "gap angle off");
  std::vector<QGraphBand> bands = regular_bands(2, 1.0, 1);
  c.expect(std::abs(bands[0].e_lo - 0.115489125027329) < 1e-6, "lower band edge off");
  c.expect(std::abs(bands[0].e_hi - 7.849835249797229) < 1e-6, "upper band edge off");
  std::vector<double> scan = qg_band_edges_from_fixed_point(2, 1.0, kPi);
  double scan_err = std::numeric_limits<double>::infinity();
  if (scan.size() == 2) {
    scan_err = std::max(std::abs(scan[0] - bands[0].k_lo), std::abs(scan[1] - bands[0].k_hi));
  }
  c.fact("scan_err", scan_err, 3);
  c.expect(scan_err < 1e-4, "fixed-point edge scan off in k");

  // The broadening must stay well below the 1% detection threshold inside the
  // gap above the band, otherwise the measures saturate at the window size and
  // the disorder ladder tests nothing.
  ExperimentConfig cfg;
  cfg.experiment = "qgraph";
  cfg.seed = kSeed + 10;
  cfg.grid = GridCfg{0.0, 8.5, 120, {0.2, 0.1, 0.05, 0.025, 0.0}, 0.0};
  cfg.qgraph = QGraphCfg{1.0, 0.0, 1, 2e-3, 0.0};
  cfg.pool.size = 2000;
  cfg.pool.burn_in = 120;
  cfg.pool.sweeps = 60;
  cfg.output.directory = scratch_dir("qgraph").string();
  cfg.output.basename = "acc";
  CommandResult res = run_qgraph(cfg, g_workers);
  json summary = json::parse(read_file(res.files[2]));
  std::map<double, double> measure;
  for (const auto& m : summary.at("measures"))
    measure[m.at("lambda").get<double>()] = m.at("measure").get<double>();
  double m0 = measure.at(0.0);
  double window_band = summary.at("band_total_closed_form").get<double>();
  c.fact("m0", m0, 5);
  c.expect(std::abs(m0 - window_band) < 0.3,
           "clean measure " + fmt_g(m0, 5) + " far from the band width " +
               fmt_g(window_band, 5));
  double prev = std::numeric_limits<double>::infinity();
  bool moved = false, monotone = true;
  for (double lambda : {0.2, 0.1, 0.05, 0.025}) {
    double d = std::abs(measure.at(lambda) - m0);
    if (d > prev + 1e-12) monotone = false;
    if (d > 1e-12) moved = true;
    prev = d;
  }
  c.fact("first_gap", std::abs(measure.at(0.2) - m0), 3);
  c.fact("final_gap", prev, 3);
  c.expect(moved, "disorder never moved the measure; the ladder is vacuous");
  c.expect(monotone, "measure ladder not monotone toward the clean value");
  c.expect(prev < 0.05 * m0, "measure at lambda=0.025 not within 5% of the clean value");
}

// --------------------------------------------------------------------------
// 11. wire reflection sees the same support as the tree ratio

void check_scatter_equivalence(Criterion& c) {
  ExperimentConfig cfg;
  cfg.experiment = "scatter";
  cfg.seed = kSeed + 11;
  cfg.grid = GridCfg{-3.5, 3.5, 200, {0.0, 0.1}, 1e-3};
  cfg.pool.size = 4000;
  cfg.pool.burn_in = 100;
  cfg.pool.sweeps = 20;
  cfg.scatter = ScatterCfg{1.0, 0.5 * kPi, 1e-2, 1.34e-2};
  cfg.output.directory = scratch_dir("scatter").string();
  cfg.output.basename = "acc";
  CommandResult res = run_scatter(cfg, g_workers);
  json summary = json::parse(read_file(res.files[1]));
  long long bulk = summary.at("disagreements_excluding_edges").get<long long>();
  c.fact("bulk_disagreements", double(bulk), 3);
  c.expect(bulk == 0, "route disagreement away from the band edges");
  std::vector<double> abs_r = csv_column(res.files[0], 7);
  double max_r = 0.0;
  for (double v : abs_r) max_r = std::max(max_r, v);
  c.fact("max_abs_r", max_r, 8);
  c.expect(abs_r.size() == 400, "unexpected scatter grid size");
  c.expect(max_r <= 1.0 + 1e-12, "reflection coefficient above unit modulus");
}

// --------------------------------------------------------------------------
// 12. byte-identical reruns of every CLI command

void run_cli(Criterion& c, const std::string& cmd, const fs::path& cfg_path) {
  std::string line = std::string(ACSTAB_BIN) + " " + cmd + " --config " + cfg_path.string() +
                     " > /dev/null 2>&1";
  int rc = std::system(line.c_str());
  c.expect(rc == 0, cmd + " exited with status " + fmt_g(rc, 6));
}

void check_determinism(Criterion& c) {
  struct Job {
    std::string cmd;
    ExperimentConfig cfg;
  };
  std::vector<Job> jobs;

  ExperimentConfig base;
  base.seed = kSeed + 12;
  base.pool.size = 1000;
  base.pool.burn_in = 30;
  base.pool.sweeps = 10;
  base.pool.tuples = 500;

  {
    Job j{"density", base};
    j.cfg.experiment = "density";
    j.cfg.grid = GridCfg{-1.0, 1.0, 6, {0.0, 0.25}, 0.04};
    j.cfg.output.svg = true;
    jobs.push_back(j);
  }
  {
    Job j{"phase-sweep", base};
    j.cfg.experiment = "phase-sweep";
    j.cfg.grid = GridCfg{-1.0, 1.0, 5, {0.1, 0.2}, 0.05};
    j.cfg.output.svg = true;
    jobs.push_back(j);
  }
  {
    Job j{"verify", base};
    j.cfg.experiment = "verify";
    j.cfg.grid = GridCfg{-1.0, 1.0, 3, {0.3}, 0.05};
    j.cfg.verify.points = 3;
    jobs.push_back(j);
  }
  {
    Job j{"qgraph", base};
    j.cfg.experiment = "qgraph";
    j.cfg.grid = GridCfg{0.0, 8.0, 4, {0.0, 0.1}, 0.0};
    j.cfg.qgraph = QGraphCfg{1.0, 0.0, 1, 0.01, 0.0};
    j.cfg.pool.burn_in = 20;
    jobs.push_back(j);
  }
  {
    Job j{"scatter", base};
    j.cfg.experiment = "scatter";
    j.cfg.grid = GridCfg{-1.0, 1.0, 5, {0.0, 0.2}, 0.05};
    jobs.push_back(j);
  }

  for (Job& j : jobs) {
    fs::path dir = scratch_dir("det_" + j.cmd);
    j.cfg.output.directory = dir.string();
    j.cfg.output.basename = "det";
    fs::path cfg_path = dir / "config.json";
    write_text_file(cfg_path.string(), dump_config(j.cfg) + "\n");

    run_cli(c, j.cmd, cfg_path);
    std::map<std::string, std::string> snap;
    for (const auto& ent : fs::directory_iterator(dir)) {
      if (ent.path() == cfg_path) continue;
      snap[ent.path().filename().string()] = read_file(ent.path());
    }
    c.expect(!snap.empty(), j.cmd + " produced no output files");

    run_cli(c, j.cmd, cfg_path);
    std::size_t seen = 0;
    for (const auto& ent : fs::directory_iterator(dir)) {
      if (ent.path() == cfg_path) continue;
      ++seen;
      auto it = snap.find(ent.path().filename().string());
      c.expect(it != snap.end(), j.cmd + " rerun created a new file " +
                                     ent.path().filename().string());
      if (it != snap.end())
        c.expect(read_file(ent.path()) == it->second,
                 j.cmd + " output " + it->first + " differs between reruns");
    }
    c.expect(seen == snap.size(), j.cmd + " rerun dropped output files");
  }
}

}  // namespace

int main() {
  g_workers = resolve_workers(0);
  g_scratch = fs::temp_directory_path() / "acstab_acceptance";
  fs::remove_all(g_scratch);
  fs::create_directories(g_scratch);

  criterion(1, "fixed-point", 1.0, check_fixed_point);
  criterion(2, "band-support", 120.0, check_band_support);
  criterion(3, "lyapunov", 30.0, check_lyapunov);
  criterion(4, "jensen-margin", 60.0, check_jensen);
  criterion(5, "fluctuation-bounds", 600.0, check_fluctuation);
  criterion(6, "current-identity", 60.0, check_current);
  criterion(7, "radial-reduction", 10.0, check_radial_reduction);
  criterion(8, "radial-instability", 120.0, check_radial_instability);
  criterion(9, "l1-convergence", 900.0, check_l1_convergence);
  criterion(10, "qgraph-bands", 600.0, check_qgraph);
  criterion(11, "scatter-equivalence", 300.0, check_scatter_equivalence);
  criterion(12, "determinism", 900.0, check_determinism);

  std::printf("%d/12 criteria passed\n", 12 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
