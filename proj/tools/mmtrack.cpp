// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmtrack/sim.hpp"

namespace {

mmtrack::ExperimentConfig config_from(const std::string& path) {
  if (path.empty()) return mmtrack::load_config("");
  return mmtrack::load_config_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmtrack: millimeter wave MIMO hybrid beam tracking simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int trials = 0;
  int threads = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment and write a CSV");
  run->add_option("--config", config_path, "experiment config file (key = value)");
  run->add_option("--out", out_path, "output CSV path")->required();
  CLI::Option* run_seed = run->add_option("--seed", seed, "override master_seed");
  CLI::Option* run_trials = run->add_option("--trials", trials, "override trial count");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");

  int cb_n_rx = 64;
  int cb_size = 24;
  int cb_order = 67;
  long cb_budget = 10000;
  std::uint64_t cb_seed = 1;
  std::string cb_out;
  CLI::App* codebook =
      app.add_subcommand("codebook", "design a basis codebook and save it");
  codebook->add_option("--n-rx", cb_n_rx, "codeword dimension")->required();
  codebook->add_option("--size", cb_size, "number of codewords")->required();
  codebook->add_option("--phase-order", cb_order, "prime phase grid order")
      ->required();
  codebook->add_option("--budget", cb_budget, "search restarts");
  codebook->add_option("--seed", cb_seed, "search seed");
  codebook->add_option("--out", cb_out, "output path")->required();

  std::vector<double> velocities;
  std::string sweep_prefix;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run one experiment per velocity");
  sweep->add_option("--velocities", velocities, "velocities in km/h")
      ->required()
      ->delimiter(',');
  sweep->add_option("--config", config_path, "base config file");
  sweep->add_option("--out-prefix", sweep_prefix, "output CSV path prefix")
      ->required();
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed, "override master_seed");
  CLI::Option* sweep_trials =
      sweep->add_option("--trials", trials, "override trial count");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      mmtrack::ExperimentConfig cfg = config_from(config_path);
      if (run_seed->count() > 0) cfg.master_seed = seed;
      if (run_trials->count() > 0) cfg.trials = trials;
      cfg.validate();
      const mmtrack::ThroughputTrace trace = mmtrack::run_experiment(cfg, threads);
      mmtrack::write_csv(trace, out_path);
      std::cout << "wrote " << out_path << " (" << trace.trials << " trials, rho="
                << trace.rho << ")\n";
    } else if (codebook->parsed()) {
      mmtrack::RngStream rng(cb_seed, 0, 0);
      const mmtrack::BasisCodebook basis = mmtrack::design_basis_codebook(
          cb_n_rx, cb_size, cb_order, cb_budget, rng);
      mmtrack::save_codebook(basis, cb_out);
      std::cout << "wrote " << cb_out << " (min chordal distance "
                << basis.min_distance << ")\n";
    } else if (sweep->parsed()) {
      mmtrack::ExperimentConfig base = config_from(config_path);
      if (sweep_seed->count() > 0) base.master_seed = seed;
      if (sweep_trials->count() > 0) base.trials = trials;
      for (const double v : velocities) {
        mmtrack::ExperimentConfig cfg = base;
        cfg.evolution_source = mmtrack::EvolutionSource::kPhysical;
        cfg.velocity_kmh = v;
        cfg.validate();
        char suffix[48];
        std::snprintf(suffix, sizeof suffix, "_v%g.csv", v);
        const std::string path = sweep_prefix + suffix;
        const mmtrack::ThroughputTrace trace = mmtrack::run_experiment(cfg, threads);
        mmtrack::write_csv(trace, path);
        std::cout << "wrote " << path << " (rho=" << trace.rho << ", delta="
                  << cfg.resolved_delta() * 180.0 / M_PI << " deg)\n";
      }
    }
  } catch (const mmtrack::ConfigError& e) {
    std::cerr << "mmtrack: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mmtrack: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mmtrack: error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
