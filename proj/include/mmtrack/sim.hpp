// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MMTRACK_SIM_HPP
#define MMTRACK_SIM_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmtrack/baseband.hpp"
#include "mmtrack/channel.hpp"
#include "mmtrack/codebook.hpp"
#include "mmtrack/tracker.hpp"

namespace mmtrack {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// How the block-to-block channel statistics are specified: directly as
// (rho, delta), or through carrier/velocity/block-length via Jakes' model
// and the linear velocity-to-drift map.
enum class EvolutionSource { kExplicit, kPhysical };

struct ExperimentConfig {
  ChannelParams channel;
  HybridConfig hybrid;

  EvolutionSource evolution_source = EvolutionSource::kPhysical;
  double rho = 0.0;    // explicit source
  double delta = 0.0;  // explicit source, radians
  double carrier_hz = 72.0e9;
  double velocity_kmh = 3.0;
  double block_s = 0.5e-3;

  int codebook_size = 24;  // rotation codebook N
  int phase_order = 67;    // M, prime and > max(n_tx, n_rx)
  double gamma = 0.9;
  int n_can = 200;
  long search_budget = 10000;
  AdaptNormalization adapt_normalization = AdaptNormalization::kGlobal;

  int n_pilot = 6;
  int blocks = 10;  // T_max; throughput is reported for blocks 0..T_max
  int trials = 500;
  std::uint64_t master_seed = 20260810;

  bool run_proposed = true;
  bool run_independent = true;

  double resolved_rho() const;
  double resolved_delta() const;
  // Velocity behind the evolution statistics; NaN for the explicit source.
  double resolved_velocity_kmh() const;
  EvolutionParams evolution() const;

  void validate() const;
};

// Parses flat "key = value" text. Unknown or duplicate keys, malformed
// values, and invariant violations all raise ConfigError with the line.
ExperimentConfig load_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Linear angle-drift law delta = 3.0 degrees per km/h, returned in radians.
double velocity_to_delta(double velocity_kmh);

// Everything trials share: adapted codebooks, dictionaries, pilots, budgets
// and the deterministic nominal state block 0 starts from.
struct ExperimentContext {
  ExperimentConfig config;
  EvolutionParams evolution;
  RotationCodebook rotations_rx;
  RotationCodebook rotations_tx;
  CandidateDictionary dict_rx;
  CandidateDictionary dict_tx;
  PilotMatrix pilot;
  SoundingBudget proposed_budget;
  SoundingBudget benchmark_budget;
  TrackerState nominal_state;
};

ExperimentContext build_context(const ExperimentConfig& config);

// Per-scheme throughput over blocks 0..T_max; a disabled scheme leaves its
// vector empty. Both schemes see the identical channel sequence and share
// block 0, which runs the independent sounding initialization.
struct TrialResult {
  std::vector<double> proposed;
  std::vector<double> independent;
};

TrialResult run_trial(const ExperimentContext& context,
                      std::uint32_t trial_index);
TrialResult run_trial(const ExperimentConfig& config,
                      std::uint32_t trial_index);

struct SchemeTrace {
  std::string scheme;
  std::vector<double> mean;        // bits/s/Hz per block
  std::vector<double> stderr_mean; // sample stddev / sqrt(trials)
  int overhead_uses = 0;           // channel uses per block, steady state
  double overhead_fraction = 0.0;  // of the ~500 uses available per block
};

struct ThroughputTrace {
  std::vector<SchemeTrace> schemes;
  int blocks = 0;
  int trials = 0;
  double rho = 1.0;
  double velocity_kmh = 0.0;  // NaN when the evolution source is explicit
  std::vector<TrialResult> per_trial;
};

// Runs all trials (in parallel when threads != 1) and aggregates. Output is
// identical for any thread count. threads == 0 picks the hardware count.
ThroughputTrace run_experiment(const ExperimentConfig& config, int threads = 0);

// CSV with header scheme,block,rho,velocity_kmh,mean_bits_per_hz,stderr,
// trials,overhead_uses; floats carry 6 significant digits, LF line endings.
std::string csv_string(const ThroughputTrace& trace);
void write_csv(const ThroughputTrace& trace, const std::string& destination);

}  // namespace mmtrack

#endif  // MMTRACK_SIM_HPP
