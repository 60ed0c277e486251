// Command line front end: density | phase-sweep | verify | qgraph | scatter.
// Exit codes: 0 success, 1 verification failure, 2 config error, 3 numeric error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <acstab/acstab.hpp>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw acstab::config_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file")->required();
  cmd->add_option("--seed", o.seed, "override the config seed")
      ->each([&](const std::string&) { o.seed_set = true; });
  cmd->add_option("--workers", o.workers, "worker threads (default: ACSTAB_WORKERS or hardware)");
  cmd->add_option("--out", o.out_dir, "override the output directory");
}

int dispatch(const std::string& command, const CommonOpts& o) {
  acstab::ExperimentConfig cfg = acstab::parse_config(read_file(o.config_path));
  if (cfg.experiment != command)
    throw acstab::config_error("config experiment '" + cfg.experiment +
                               "' does not match command '" + command + "'");
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.out_dir.empty()) cfg.output.directory = o.out_dir;
  int workers = acstab::resolve_workers(o.workers);

  acstab::CommandResult res;
  if (command == "density")
    res = acstab::run_density(cfg, workers);
  else if (command == "phase-sweep")
    res = acstab::run_phase_sweep(cfg, workers);
  else if (command == "verify")
    res = acstab::run_verify(cfg, workers);
  else if (command == "qgraph")
    res = acstab::run_qgraph(cfg, workers);
  else if (command == "scatter")
    res = acstab::run_scatter(cfg, workers);

  for (const auto& f : res.files) std::printf("%s\n", f.c_str());
  if (!res.checks_passed) {
    std::fprintf(stderr, "verification failed\n");
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral stability experiments on regular rooted trees"};
  app.require_subcommand(1);

  const char* commands[] = {"density", "phase-sweep", "verify", "qgraph", "scatter"};
  const char* blurbs[] = {
      "density of states profile over an energy grid",
      "Im G heat map over the (energy, disorder strength) plane",
      "internal consistency checks, reported as JSON",
      "metric tree band structure and spectral measure",
      "wire reflection probe against the tree ratio",
  };
  CommonOpts opts[5];
  std::string chosen;
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], blurbs[i]);
    add_common(sub, opts[i]);
    sub->callback([&chosen, name = std::string(commands[i])] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  int which = 0;
  for (int i = 0; i < 5; ++i)
    if (chosen == commands[i]) which = i;

  try {
    return dispatch(chosen, opts[which]);
  } catch (const acstab::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const acstab::numeric_error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
