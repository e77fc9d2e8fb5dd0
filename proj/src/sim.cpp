// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mmtrack/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace mmtrack {

namespace {

// Substream tags for the per-trial Philox streams. The channel stream is
// separate from the scheme noise streams so both schemes run on identical
// channel realizations (common random numbers).
enum Substream : std::uint32_t {
  kStreamChannel = 0,
  kStreamInit = 1,
  kStreamProposed = 2,
  kStreamIndependent = 3,
  kStreamDesignRx = 4,
  kStreamDesignTx = 5,
};

// Codebook design is an experiment-level concern, not a trial-level one.
constexpr std::uint32_t kExperimentTrial = 0xFFFFFFFFu;

// One OFDM-symbol channel use, ~500 per block at the assumed numerology.
constexpr int kChannelUsesPerBlock = 500;

// The benchmark is granted this many channel uses per block; the largest
// static sweep that fits is derived from it.
constexpr int kBenchmarkMaxUses = 80;

bool is_prime(int m) {
  if (m < 2) return false;
  for (int d = 2; d * d <= m; ++d)
    if (m % d == 0) return false;
  return true;
}

int smallest_prime_above(int n) {
  int p = n + 1;
  while (!is_prime(p)) ++p;
  return p;
}

}  // namespace

double velocity_to_delta(double velocity_kmh) {
  if (velocity_kmh < 0.0)
    throw std::invalid_argument("velocity_to_delta: velocity must be >= 0");
  return velocity_kmh * 3.0 * M_PI / 180.0;
}

double ExperimentConfig::resolved_rho() const {
  if (evolution_source == EvolutionSource::kExplicit) return rho;
  return correlation_from_velocity(carrier_hz, velocity_kmh, block_s);
}

double ExperimentConfig::resolved_delta() const {
  if (evolution_source == EvolutionSource::kExplicit) return delta;
  return velocity_to_delta(velocity_kmh);
}

double ExperimentConfig::resolved_velocity_kmh() const {
  if (evolution_source == EvolutionSource::kExplicit)
    return std::numeric_limits<double>::quiet_NaN();
  return velocity_kmh;
}

EvolutionParams ExperimentConfig::evolution() const {
  EvolutionParams evo;
  evo.rho = resolved_rho();
  evo.delta = resolved_delta();
  evo.validate();
  return evo;
}

void ExperimentConfig::validate() const {
  channel.validate();
  hybrid.validate();
  if (channel.n_tx != hybrid.n_tx || channel.n_rx != hybrid.n_rx)
    throw ConfigError("config error: antenna counts are inconsistent");
  if (evolution_source == EvolutionSource::kExplicit) {
    if (!(rho >= 0.0 && rho <= 1.0))
      throw ConfigError("config error: rho must be in [0, 1]");
    if (!(delta >= 0.0))
      throw ConfigError("config error: delta must be >= 0");
  } else {
    if (!(carrier_hz > 0.0) || velocity_kmh < 0.0 || !(block_s > 0.0))
      throw ConfigError(
          "config error: carrier_hz and block_s must be > 0, velocity_kmh >= 0");
  }
  if (codebook_size < 1)
    throw ConfigError("config error: codebook_size must be >= 1");
  if (!is_prime(phase_order) ||
      phase_order <= std::max(channel.n_tx, channel.n_rx))
    throw ConfigError(
        "config error: phase_order must be prime and > max(n_tx, n_rx)");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ConfigError("config error: gamma must be in (0, 1]");
  if (n_can < std::max(channel.n_tx, channel.n_rx))
    throw ConfigError("config error: n_can must be >= max(n_tx, n_rx)");
  if (search_budget < 1)
    throw ConfigError("config error: search_budget must be >= 1");
  if (n_pilot < hybrid.n_rf)
    throw ConfigError("config error: n_pilot must be >= n_rf");
  if (blocks < 1) throw ConfigError("config error: blocks must be >= 1");
  if (trials < 1) throw ConfigError("config error: trials must be >= 1");
  if (!run_proposed && !run_independent)
    throw ConfigError("config error: schemes must name at least one scheme");
}

namespace {

struct RawConfig {
  std::map<std::string, std::pair<std::string, int>> values;  // key -> (value, line)

  bool has(const std::string& key) const { return values.count(key) != 0; }

  std::string take(const std::string& key) {
    auto it = values.find(key);
    const std::string v = it->second.first;
    values.erase(it);
    return v;
  }

  int line_of(const std::string& key) const { return values.at(key).second; }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config error at line " + std::to_string(line) + ": " +
                    message);
}

double parse_double(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    fail(line, "key '" + key + "' has a malformed number '" + value + "'");
  }
}

long long parse_int(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, "key '" + key + "' has a malformed integer '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& value, const std::string& key,
                        int line) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, "key '" + key + "' has a malformed integer '" + value + "'");
  }
}

const std::set<std::string> kKnownKeys = {
    "n_tx",          "n_rx",        "n_paths",       "spacing_ratio",
    "n_rf",          "n_streams",   "phase_bits",    "noise_var",
    "rho",           "delta",       "carrier_hz",    "velocity_kmh",
    "block_s",       "codebook_size", "phase_order", "gamma",
    "n_can",         "search_budget", "adapt_normalization",
    "n_pilot",       "blocks",      "trials",        "master_seed",
    "schemes",
};

}  // namespace

ExperimentConfig load_config(const std::string& text) {
  RawConfig raw;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (kKnownKeys.count(key) == 0) fail(line_no, "unknown key '" + key + "'");
    if (raw.has(key))
      fail(line_no, "duplicate key '" + key + "' (first at line " +
                        std::to_string(raw.line_of(key)) + ")");
    if (value.empty()) fail(line_no, "key '" + key + "' has no value");
    raw.values[key] = {value, line_no};
  }

  ExperimentConfig cfg;

  auto take_int = [&](const std::string& key, int& out) {
    if (!raw.has(key)) return;
    const int ln = raw.line_of(key);
    const long long v = parse_int(raw.take(key), key, ln);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      fail(ln, "key '" + key + "' is out of range");
    out = int(v);
  };
  auto take_double = [&](const std::string& key, double& out) {
    if (!raw.has(key)) return;
    const int ln = raw.line_of(key);
    out = parse_double(raw.take(key), key, ln);
  };

  take_int("n_tx", cfg.channel.n_tx);
  take_int("n_rx", cfg.channel.n_rx);
  take_int("n_paths", cfg.channel.n_paths);
  take_double("spacing_ratio", cfg.channel.spacing_ratio);

  const bool n_streams_given = raw.has("n_streams");
  take_int("n_rf", cfg.hybrid.n_rf);
  take_int("n_streams", cfg.hybrid.n_streams);
  take_int("phase_bits", cfg.hybrid.phase_bits);
  take_double("noise_var", cfg.hybrid.noise_var);
  if (!n_streams_given) cfg.hybrid.n_streams = std::min(4, cfg.hybrid.n_rf);
  cfg.hybrid.n_tx = cfg.channel.n_tx;
  cfg.hybrid.n_rx = cfg.channel.n_rx;

  const bool has_explicit = raw.has("rho") || raw.has("delta");
  const bool has_physical =
      raw.has("carrier_hz") || raw.has("velocity_kmh") || raw.has("block_s");
  if (has_explicit && has_physical) {
    throw ConfigError(
        "config error: specify either (rho, delta) or "
        "(carrier_hz, velocity_kmh, block_s), not both");
  }
  if (has_explicit) {
    cfg.evolution_source = EvolutionSource::kExplicit;
    if (!raw.has("rho")) {
      const int ln = raw.line_of("delta");
      fail(ln, "'delta' requires 'rho'");
    }
    take_double("rho", cfg.rho);
    take_double("delta", cfg.delta);
  } else {
    cfg.evolution_source = EvolutionSource::kPhysical;
    take_double("carrier_hz", cfg.carrier_hz);
    take_double("velocity_kmh", cfg.velocity_kmh);
    take_double("block_s", cfg.block_s);
  }

  take_int("codebook_size", cfg.codebook_size);
  const bool phase_order_given = raw.has("phase_order");
  take_int("phase_order", cfg.phase_order);
  if (!phase_order_given)
    cfg.phase_order =
        smallest_prime_above(std::max(cfg.channel.n_tx, cfg.channel.n_rx));
  take_double("gamma", cfg.gamma);
  take_int("n_can", cfg.n_can);
  if (raw.has("search_budget")) {
    const int ln = raw.line_of("search_budget");
    cfg.search_budget = long(parse_int(raw.take("search_budget"), "search_budget", ln));
  }
  if (raw.has("adapt_normalization")) {
    const int ln = raw.line_of("adapt_normalization");
    const std::string v = raw.take("adapt_normalization");
    if (v == "global")
      cfg.adapt_normalization = AdaptNormalization::kGlobal;
    else if (v == "entrywise")
      cfg.adapt_normalization = AdaptNormalization::kEntrywise;
    else
      fail(ln, "adapt_normalization must be 'global' or 'entrywise'");
  }

  const bool n_pilot_given = raw.has("n_pilot");
  take_int("n_pilot", cfg.n_pilot);
  if (!n_pilot_given)
    cfg.n_pilot = int(std::lround(1.5 * cfg.hybrid.n_rf));
  take_int("blocks", cfg.blocks);
  take_int("trials", cfg.trials);
  if (raw.has("master_seed")) {
    const int ln = raw.line_of("master_seed");
    cfg.master_seed = parse_u64(raw.take("master_seed"), "master_seed", ln);
  }
  if (raw.has("schemes")) {
    const int ln = raw.line_of("schemes");
    const std::string v = raw.take("schemes");
    cfg.run_proposed = false;
    cfg.run_independent = false;
    std::istringstream parts(v);
    std::string part;
    while (std::getline(parts, part, ',')) {
      part = trim(part);
      if (part == "proposed")
        cfg.run_proposed = true;
      else if (part == "independent")
        cfg.run_independent = true;
      else
        fail(ln, "unknown scheme '" + part + "'");
    }
  }

  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config error: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return load_config(buffer.str());
}

ExperimentContext build_context(const ExperimentConfig& config) {
  config.validate();
  ExperimentContext ctx;
  ctx.config = config;
  ctx.evolution = config.evolution();

  RngStream design_rx(config.master_seed, kExperimentTrial, kStreamDesignRx);
  RngStream design_tx(config.master_seed, kExperimentTrial, kStreamDesignTx);
  const BasisCodebook basis_rx =
      design_basis_codebook(config.channel.n_rx, config.codebook_size,
                            config.phase_order, config.search_budget, design_rx);
  const BasisCodebook basis_tx =
      design_basis_codebook(config.channel.n_tx, config.codebook_size,
                            config.phase_order, config.search_budget, design_tx);
  ctx.rotations_rx = adapt_codebook(basis_rx, ctx.evolution.rho, config.gamma,
                                    config.adapt_normalization);
  ctx.rotations_tx = adapt_codebook(basis_tx, ctx.evolution.rho, config.gamma,
                                    config.adapt_normalization);

  ctx.dict_rx = build_candidate_dictionary(config.channel.n_rx, config.n_can,
                                           config.hybrid.phase_bits,
                                           config.channel.spacing_ratio);
  ctx.dict_tx = build_candidate_dictionary(config.channel.n_tx, config.n_can,
                                           config.hybrid.phase_bits,
                                           config.channel.spacing_ratio);
  ctx.pilot = make_pilot(config.hybrid.n_rf, config.n_pilot);
  ctx.proposed_budget = SoundingBudget::proposed(config.codebook_size,
                                                 config.hybrid.n_rf,
                                                 config.n_pilot);
  ctx.benchmark_budget = SoundingBudget::benchmark(kBenchmarkMaxUses,
                                                   config.hybrid.n_rf,
                                                   config.n_pilot);

  // Deterministic nominal state: analog stages point at an even dictionary
  // spread, digital stages are identity columns scaled to the power budget.
  const int n_rf = config.hybrid.n_rf;
  const std::vector<int> w_idx = static_sweep_indices(n_rf, ctx.dict_rx.size());
  const std::vector<int> f_idx = static_sweep_indices(n_rf, ctx.dict_tx.size());
  ctx.nominal_state.analog_combiner.entries = CxMat(config.channel.n_rx, n_rf);
  ctx.nominal_state.analog_precoder.entries = CxMat(config.channel.n_tx, n_rf);
  for (int l = 0; l < n_rf; ++l) {
    ctx.nominal_state.analog_combiner.entries.col(l) =
        ctx.dict_rx.columns.col(w_idx[std::size_t(l) % w_idx.size()]);
    ctx.nominal_state.analog_precoder.entries.col(l) =
        ctx.dict_tx.columns.col(f_idx[std::size_t(l) % f_idx.size()]);
  }
  const CxMat eye =
      CxMat::Identity(n_rf, config.hybrid.n_streams);
  ctx.nominal_state.digital_combiner = normalize_power(
      ctx.nominal_state.analog_combiner, eye, config.hybrid.n_streams);
  ctx.nominal_state.digital_precoder = normalize_power(
      ctx.nominal_state.analog_precoder, eye, config.hybrid.n_streams);
  return ctx;
}

TrialResult run_trial(const ExperimentContext& ctx, std::uint32_t trial_index) {
  const ExperimentConfig& cfg = ctx.config;
  RngStream channel_rng(cfg.master_seed, trial_index, kStreamChannel);
  RngStream init_rng(cfg.master_seed, trial_index, kStreamInit);

  // One channel realization per block, shared by both schemes.
  std::vector<ChannelMatrix> h;
  h.reserve(std::size_t(cfg.blocks) + 1);
  PathState path_state = sample_initial_state(channel_rng, cfg.channel);
  h.push_back(assemble_channel(path_state, cfg.channel));
  for (int n = 1; n <= cfg.blocks; ++n) {
    path_state = evolve_state(path_state, ctx.evolution, channel_rng);
    h.push_back(assemble_channel(path_state, cfg.channel));
  }

  // Block 0 is the independent sounding initialization for both schemes.
  const BlockResult block0 = block_pipeline_independent(
      ctx.nominal_state, h[0], ctx.dict_rx, ctx.dict_tx, ctx.benchmark_budget,
      ctx.pilot, cfg.hybrid, init_rng);

  TrialResult result;
  if (cfg.run_proposed) {
    result.proposed.resize(std::size_t(cfg.blocks) + 1);
    result.proposed[0] = block0.throughput;
  }
  if (cfg.run_independent) {
    result.independent.resize(std::size_t(cfg.blocks) + 1);
    result.independent[0] = block0.throughput;
  }

  if (cfg.run_proposed) {
    RngStream rng(cfg.master_seed, trial_index, kStreamProposed);
    TrackerState state = block0.state;
    for (int n = 1; n <= cfg.blocks; ++n) {
      BlockResult res = block_pipeline(state, h[std::size_t(n)],
                                       ctx.rotations_rx, ctx.rotations_tx,
                                       ctx.dict_rx, ctx.dict_tx, ctx.pilot,
                                       cfg.hybrid, rng);
      state = std::move(res.state);
      result.proposed[std::size_t(n)] = res.throughput;
    }
  }
  if (cfg.run_independent) {
    RngStream rng(cfg.master_seed, trial_index, kStreamIndependent);
    TrackerState state = block0.state;
    for (int n = 1; n <= cfg.blocks; ++n) {
      BlockResult res = block_pipeline_independent(
          state, h[std::size_t(n)], ctx.dict_rx, ctx.dict_tx,
          ctx.benchmark_budget, ctx.pilot, cfg.hybrid, rng);
      state = std::move(res.state);
      result.independent[std::size_t(n)] = res.throughput;
    }
  }
  return result;
}

TrialResult run_trial(const ExperimentConfig& config, std::uint32_t trial_index) {
  return run_trial(build_context(config), trial_index);
}

namespace {

SchemeTrace aggregate_scheme(const std::string& name,
                             const std::vector<TrialResult>& per_trial,
                             std::vector<double> TrialResult::* member,
                             int blocks, int uses) {
  SchemeTrace trace;
  trace.scheme = name;
  trace.overhead_uses = uses;
  trace.overhead_fraction = double(uses) / kChannelUsesPerBlock;
  trace.mean.assign(std::size_t(blocks) + 1, 0.0);
  trace.stderr_mean.assign(std::size_t(blocks) + 1, 0.0);
  const double n = double(per_trial.size());
  for (std::size_t b = 0; b <= std::size_t(blocks); ++b) {
    double sum = 0.0;
    for (const TrialResult& t : per_trial) sum += (t.*member)[b];
    const double mean = sum / n;
    trace.mean[b] = mean;
    if (per_trial.size() > 1) {
      double ss = 0.0;
      for (const TrialResult& t : per_trial) {
        const double d = (t.*member)[b] - mean;
        ss += d * d;
      }
      trace.stderr_mean[b] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
  }
  return trace;
}

}  // namespace

ThroughputTrace run_experiment(const ExperimentConfig& config, int threads) {
  const ExperimentContext ctx = build_context(config);

  std::vector<TrialResult> results(std::size_t(config.trials));
  int worker_count = threads > 0 ? threads
                                 : int(std::thread::hardware_concurrency());
  worker_count = std::clamp(worker_count, 1, config.trials);

  std::atomic<int> next_trial{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const int i = next_trial.fetch_add(1);
      if (i >= config.trials) break;
      try {
        results[std::size_t(i)] = run_trial(ctx, std::uint32_t(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        break;
      }
    }
  };
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(worker_count));
    for (int t = 0; t < worker_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ThroughputTrace trace;
  trace.blocks = config.blocks;
  trace.trials = config.trials;
  trace.rho = ctx.evolution.rho;
  trace.velocity_kmh = config.resolved_velocity_kmh();
  if (config.trials == 1)
    std::cerr << "mmtrack: warning: trials=1, standard errors are reported "
                 "as 0 and are not meaningful\n";
  if (config.run_proposed)
    trace.schemes.push_back(aggregate_scheme(
        "proposed", results, &TrialResult::proposed, config.blocks,
        ctx.proposed_budget.total_uses_per_block));
  if (config.run_independent)
    trace.schemes.push_back(aggregate_scheme(
        "independent", results, &TrialResult::independent, config.blocks,
        ctx.benchmark_budget.total_uses_per_block));
  trace.per_trial = std::move(results);
  return trace;
}

std::string csv_string(const ThroughputTrace& trace) {
  std::string out =
      "scheme,block,rho,velocity_kmh,mean_bits_per_hz,stderr,trials,"
      "overhead_uses\n";
  char buf[256];
  for (const SchemeTrace& scheme : trace.schemes) {
    for (std::size_t b = 0; b < scheme.mean.size(); ++b) {
      std::snprintf(buf, sizeof buf, "%s,%zu,%.6g,%.6g,%.6g,%.6g,%d,%d\n",
                    scheme.scheme.c_str(), b, trace.rho, trace.velocity_kmh,
                    scheme.mean[b], scheme.stderr_mean[b], trace.trials,
                    scheme.overhead_uses);
      out += buf;
    }
  }
  return out;
}

void write_csv(const ThroughputTrace& trace, const std::string& destination) {
  std::ofstream os(destination, std::ios::binary);
  if (!os)
    throw std::runtime_error("write_csv: cannot open '" + destination + "'");
  os << csv_string(trace);
  if (!os)
    throw std::runtime_error("write_csv: write failed for '" + destination + "'");
}

}  // namespace mmtrack
