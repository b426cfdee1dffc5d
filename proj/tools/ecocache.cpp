// ecocache: run the caching analytics, the PPP validation simulator, or the
// placement optimizers from a flat config file and write figure-ready rows.
//
// Exit codes: 0 success, 2 usage/config error, 3 I/O error, 4 numeric
// failure (solver infeasible/unbounded or integration breakdown).
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ecocache/config.hpp"
#include "ecocache/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::int64_t seed = -1;
  std::int64_t mc_samples = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "Config file (defaults apply when omitted)");
  cmd->add_option("--out", args.out_path, "Output file path")->required();
  cmd->add_option("--format", args.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", args.seed, "Override the run seed");
  cmd->add_option("--mc-samples", args.mc_samples,
                  "Override Monte Carlo samples / realizations");
}

ecocache::ExperimentConfig load(const CommonArgs& args) {
  ecocache::ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = ecocache::load_config(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.mc_samples >= 0) {
    cfg.mc_samples = static_cast<std::uint64_t>(args.mc_samples);
  }
  ecocache::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"economical caching experiments for two-tier cached networks"};
  app.require_subcommand(1);

  CommonArgs analyze_args, simulate_args, optimize_args, sweep_args;
  std::string sweep_var;
  std::vector<double> sweep_grid;

  auto* analyze = app.add_subcommand("analyze", "Analytic STP/ESR curves");
  add_common(analyze, analyze_args);
  auto* simulate = app.add_subcommand("simulate", "PPP Monte Carlo validation");
  add_common(simulate, simulate_args);
  auto* optimize = app.add_subcommand("optimize", "Placement algorithms at one point");
  add_common(optimize, optimize_args);
  auto* sweep = app.add_subcommand("sweep", "Sweep one variable");
  add_common(sweep, sweep_args);
  sweep->add_option("--sweep", sweep_var,
                    "Variable: gamma_s_dB, zipf_alpha, M_bits, c_bh or L");
  sweep->add_option("--grid", sweep_grid, "Comma-separated sweep grid")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ecocache::ResultSet rs;
    const CommonArgs* args = nullptr;
    if (*analyze) {
      args = &analyze_args;
      rs = ecocache::run_analyze(load(*args));
    } else if (*simulate) {
      args = &simulate_args;
      rs = ecocache::run_simulate(load(*args));
    } else if (*optimize) {
      args = &optimize_args;
      rs = ecocache::run_optimize(load(*args));
    } else {
      args = &sweep_args;
      auto cfg = load(*args);
      if (!sweep_var.empty()) cfg.sweep = sweep_var;
      if (!sweep_grid.empty()) cfg.grid = sweep_grid;
      if (cfg.sweep.empty()) {
        std::cerr << "sweep: missing --sweep variable\n";
        return 2;
      }
      rs = ecocache::run_sweep(cfg);
    }
    ecocache::emit_results(rs, args->out_path, args->format);
    return 0;
  } catch (const ecocache::config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ecocache::infeasible_catalog& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ecocache::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 4;
  }
}
