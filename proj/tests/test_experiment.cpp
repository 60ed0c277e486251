#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <acstab/experiment.hpp>
#include <acstab/verify.hpp>

using namespace acstab;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const char* name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig tiny_density_config(const fs::path& dir) {
  ExperimentConfig cfg = parse_config(R"({
    "experiment": "density",
    "seed": 5,
    "grid": {"e_min": -1.0, "e_max": 1.0, "points": 5, "lambdas": [0.0, 0.3], "eta": 0.05},
    "pool": {"size": 1000, "burn_in": 30, "sweeps": 20, "tuples": 200, "chain_depth": 200}
  })");
  cfg.output.directory = dir.string();
  cfg.output.basename = "tiny";
  cfg.output.svg = true;
  return cfg;
}

}  // namespace

TEST_CASE("config round trip is the identity") {
  std::string text = R"({
    "experiment": "phase-sweep",
    "seed": 42,
    "tree": {"branching": 3, "depth": 9},
    "disorder": {"family": "two_point", "strength": 0.4},
    "potential": {"kind": "radial_periodic", "values": [0.1, -0.2]},
    "grid": {"e_min": -2.0, "e_max": 2.0, "points": 11, "lambdas": [0.1, 0.2], "eta": 0.01},
    "quantile": {"alpha": 0.2},
    "output": {"basename": "run7", "svg": true}
  })";
  ExperimentConfig c1 = parse_config(text);
  ExperimentConfig c2 = parse_config(dump_config(c1));
  CHECK(dump_config(c1) == dump_config(c2));
  CHECK(c1.tree.branching == 3);
  CHECK(c1.disorder.family == DisorderFamily::two_point);
  CHECK(c1.potential.values == std::vector<double>{0.1, -0.2});
  CHECK(c1.grid.lambdas == std::vector<double>{0.1, 0.2});
  CHECK(c1.quantile.alpha == 0.2);
  CHECK(c1.output.svg);
  CHECK(c1.seed == 42);
}

TEST_CASE("config rejects unknown keys and malformed input") {
  CHECK_THROWS_AS(parse_config(R"({"experiment": "density", "typo": 1})"), config_error);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "density", "grid": {"emin": -1}})"),
                  config_error);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "densty"})"), config_error);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1})"), config_error);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "density", "disorder": {"family": "cauchy"}})"),
                  config_error);
  CHECK_THROWS_AS(
      parse_config(R"({"experiment": "density", "disorder": {"correlation": "spiral"}})"),
      config_error);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "density", "grid": {"points": "many"}})"),
                  config_error);
  CHECK_THROWS_AS(parse_config("not json at all"), config_error);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "density", "schema_version": 2})"), config_error);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "density", "grid": {"points": 0}})"),
                  config_error);
}

TEST_CASE("config defaults cover omitted sections") {
  ExperimentConfig c = parse_config(R"({"experiment": "density"})");
  CHECK(c.seed == 1);
  CHECK(c.tree.branching == 2);
  CHECK(c.tree.depth == 12);
  CHECK(c.grid.e_min == -3.5);
  CHECK(c.grid.points == 101);
  CHECK(c.grid.lambdas == std::vector<double>{0.0});
  CHECK(c.pool.size == 100000);
  CHECK(c.disorder.family == DisorderFamily::uniform);
  CHECK(c.potential.kind == PotentialKind::zero);
  CHECK(c.verify.checks.size() == 10);
  CHECK(c.output.directory == ".");
  CHECK_FALSE(c.output.svg);
}

TEST_CASE("linspace covers endpoints and the single point midpoint") {
  std::vector<double> v = linspace(-1.0, 3.0, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.front() == -1.0);
  CHECK(v.back() == 3.0);
  CHECK(v[2] == 1.0);
  std::vector<double> one = linspace(2.0, 4.0, 1);
  CHECK(one == std::vector<double>{3.0});
  CHECK_THROWS_AS(linspace(0.0, 1.0, 0), config_error);
}

TEST_CASE("worker resolution prefers the flag then the environment") {
  CHECK(resolve_workers(4) == 4);
  setenv("ACSTAB_WORKERS", "3", 1);
  CHECK(resolve_workers(0) == 3);
  CHECK(resolve_workers(2) == 2);
  setenv("ACSTAB_WORKERS", "zero", 1);
  CHECK_THROWS_AS(resolve_workers(0), config_error);
  setenv("ACSTAB_WORKERS", "-1", 1);
  CHECK_THROWS_AS(resolve_workers(0), config_error);
  unsetenv("ACSTAB_WORKERS");
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("parallel for visits every index once and propagates failures") {
  for (int workers : {1, 4}) {
    std::vector<int> hits(500, 0);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  CHECK_THROWS_AS(parallel_for(20, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw config_error("boom");
                               }),
                  config_error);
}

TEST_CASE("pool point estimates are reproducible") {
  PoolRunParams p;
  p.branching = 2;
  p.disorder.strength = 0.3;
  p.pool.size = 1000;
  p.pool.burn_in = 30;
  p.pool.sweeps = 20;
  p.pool.tuples = 200;
  p.pool.chain_depth = 200;
  p.fixed_eta = 0.05;
  PointSummary a = pool_point(p, 0.5, 12345);
  PointSummary b = pool_point(p, 0.5, 12345);
  CHECK(a.im.value == b.im.value);
  CHECK(a.re.value == b.re.value);
  CHECK(a.im.std_error == b.im.std_error);
  CHECK(a.eta == 0.05);
  CHECK(a.im.value > 0.0);

  PointSummary c = pool_point(p, 0.5, 54321);
  CHECK(a.im.value != c.im.value);

  // radially correlated disorder goes through the chain ensemble
  PoolRunParams r = p;
  r.disorder.correlation = DisorderCorrelation::radial;
  r.disorder.kappa = 0.5;
  PointSummary d = pool_point(r, 0.5, 777);
  PointSummary e = pool_point(r, 0.5, 777);
  CHECK(d.im.value == e.im.value);
  CHECK(d.im.value > 0.0);
}

TEST_CASE("ladder descent stops when successive rungs agree") {
  PoolRunParams p;
  p.branching = 2;
  p.disorder.strength = 0.0;
  p.pool.size = 1000;
  p.pool.burn_in = 20;
  p.pool.sweeps = 10;
  p.pool.tuples = 200;
  p.pool.chain_depth = 200;
  p.fixed_eta = 0.0;
  p.ladder.start = 0.5;
  p.ladder.factor = 2.0;
  p.ladder.floor = 0.1;
  p.ladder.tol = 1.0;  // any two rungs agree, stop at the second
  PointSummary out = pool_point(p, 0.3, 9);
  CHECK(out.rungs == 2);
  CHECK(out.eta == 0.25);

  p.ladder.tol = 1e-12;  // never agree, walk the whole ladder
  PointSummary full = pool_point(p, 0.3, 9);
  CHECK(full.eta == 0.1);
}

TEST_CASE("density command output is byte identical across worker counts") {
  fs::path dir = fresh_dir("acstab_test_density");
  ExperimentConfig cfg = tiny_density_config(dir);

  CommandResult r1 = run_density(cfg, 1);
  REQUIRE(r1.files.size() == 2);
  std::string csv1 = read_file(r1.files[0]);
  std::string svg1 = read_file(r1.files[1]);

  CommandResult r2 = run_density(cfg, 2);
  std::string csv2 = read_file(r2.files[0]);
  std::string svg2 = read_file(r2.files[1]);

  CHECK(csv1 == csv2);
  CHECK(svg1 == svg2);

  CHECK(csv1.rfind("# acstab density\n", 0) == 0);
  CHECK(csv1.find("# config: {") != std::string::npos);
  CHECK(csv1.find("lambda,energy,eta,mean_im,se_im,density") != std::string::npos);
  // 2 comments + 1 column header + 2 lambdas x 5 energies
  long lines = std::count(csv1.begin(), csv1.end(), '\n');
  CHECK(lines == 13);
  CHECK(svg1.rfind("<?xml", 0) == 0);
  CHECK(svg1.find("<svg") != std::string::npos);
  CHECK(svg1.find("polyline") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("phase sweep needs positive broadening") {
  fs::path dir = fresh_dir("acstab_test_phase");
  ExperimentConfig cfg = tiny_density_config(dir);
  cfg.experiment = "phase-sweep";
  cfg.grid.eta = 0.0;
  CHECK_THROWS_AS(run_phase_sweep(cfg, 1), config_error);

  cfg.grid.eta = 0.05;
  cfg.output.svg = true;
  CommandResult res = run_phase_sweep(cfg, 1);
  REQUIRE(res.files.size() == 2);
  std::string csv = read_file(res.files[0]);
  CHECK(csv.rfind("# acstab phase-sweep\n", 0) == 0);
  CHECK(csv.find("lambda,energy,eta,mean_im,se_im") != std::string::npos);
  std::string svg = read_file(res.files[1]);
  CHECK(svg.find("<rect") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("scatter command agrees with itself at zero coupling") {
  fs::path dir = fresh_dir("acstab_test_scatter");
  ExperimentConfig cfg = tiny_density_config(dir);
  cfg.experiment = "scatter";
  cfg.grid.lambdas = {0.0};
  CommandResult res = run_scatter(cfg, 1);
  REQUIRE(res.files.size() == 2);
  json summary = json::parse(read_file(res.files[1]));
  CHECK(summary.at("disagreements").get<long long>() == 0);
  CHECK(summary.at("disagreements_excluding_edges").get<long long>() == 0);
  CHECK(summary.at("points").get<int>() == 5);
  std::string csv = read_file(res.files[0]);
  CHECK(csv.find("wire_open,tree_open,edge_cell,agree") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("qgraph command reports bands measures and scan error") {
  fs::path dir = fresh_dir("acstab_test_qgraph");
  ExperimentConfig cfg = tiny_density_config(dir);
  cfg.experiment = "qgraph";
  cfg.grid = GridCfg{0.0, 8.0, 4, {0.0}, 0.0};
  cfg.qgraph.bands = 1;
  cfg.pool.burn_in = 20;
  cfg.pool.sweeps = 10;
  CommandResult res = run_qgraph(cfg, 1);
  REQUIRE(res.files.size() == 3);
  json summary = json::parse(read_file(res.files[2]));
  CHECK(std::abs(summary.at("theta").get<double>() - 0.339836909454122) < 1e-12);
  CHECK(summary.at("band_edge_scan_error").get<double>() < 1e-6);
  CHECK(summary.at("measures").size() == 1);
  double closed = summary.at("band_total_closed_form").get<double>();
  CHECK(std::abs(closed - (7.849835249797229 - 0.115489125027329)) < 1e-9);
  std::string bands = read_file(res.files[0]);
  CHECK(bands.find("band,k_lo,k_hi,e_lo,e_hi,k_lo_scan,k_hi_scan") != std::string::npos);
  std::string prof = read_file(res.files[1]);
  CHECK(prof.find("lambda,energy,im_m,se_im_m,im_m_clean,above_threshold") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("verify command checks names and writes a report") {
  fs::path dir = fresh_dir("acstab_test_verify");
  ExperimentConfig cfg = tiny_density_config(dir);
  cfg.experiment = "verify";
  cfg.verify.checks = {"not-a-check"};
  CHECK_THROWS_AS(run_verify(cfg, 1), config_error);

  cfg.verify.checks = {"free-fixed-point", "qg-bands"};
  CommandResult res = run_verify(cfg, 1);
  REQUIRE(res.files.size() == 1);
  CHECK(res.checks_passed);
  json report = json::parse(read_file(res.files[0]));
  CHECK(report.at("all_pass").get<bool>());
  CHECK(report.at("checks").size() == 2);
  CHECK(report.at("schema_version").get<int>() == 1);
  fs::remove_all(dir);
}

TEST_CASE("formatting helpers are stable") {
  CHECK(fmt_g(0.1) == "0.1");
  CHECK(fmt_g(1.0) == "1");
  CHECK(fmt_g(1e-7, 6) == "1e-07");
  CHECK(fmt_g(-2.5, 6) == "-2.5");
  CHECK(fmt_int(-42) == "-42");
  CHECK(rgb(255, 0, 16) == "#ff0010");
  CHECK(heat_color(-1.0) == heat_color(0.0));
  CHECK(heat_color(2.0) == heat_color(1.0));

  CsvWriter w;
  w.comment("note");
  w.columns({"a", "b"});
  w.comment("ignored after header");
  w.row({"1", "2"});
  CHECK(w.str() == "# note\na,b\n1,2\n");
}
