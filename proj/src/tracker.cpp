// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mmtrack/tracker.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace mmtrack {

void HybridConfig::validate() const {
  if (n_tx < 1 || n_rx < 1)
    throw std::invalid_argument("HybridConfig: antenna counts must be >= 1");
  if (!(n_streams <= n_rf && n_rf <= std::min(n_tx, n_rx)) || n_streams < 1)
    throw std::invalid_argument(
        "HybridConfig: need 1 <= n_streams <= n_rf <= min(n_tx, n_rx)");
  if (phase_bits < 1)
    throw std::invalid_argument("HybridConfig: phase_bits must be >= 1");
  if (!(noise_var > 0.0))
    throw std::invalid_argument("HybridConfig: noise_var must be > 0");
}

SoundingBudget SoundingBudget::proposed(int codebook_size, int n_rf,
                                        int n_pilot) {
  if (codebook_size < 1 || n_rf < 1 || n_pilot < 0)
    throw std::invalid_argument("SoundingBudget: invalid arguments");
  SoundingBudget b;
  b.codebook_size = codebook_size;
  b.uses_per_mode = (codebook_size + n_rf - 1) / n_rf;
  b.total_uses_per_block = 2 * n_rf * b.uses_per_mode + 2 * n_pilot;
  return b;
}

SoundingBudget SoundingBudget::benchmark(int max_uses, int n_rf, int n_pilot) {
  const int sweep_uses = max_uses - 2 * n_pilot;
  const int beams = n_rf * (sweep_uses / (2 * n_rf));
  if (beams < 1)
    throw std::invalid_argument(
        "SoundingBudget: benchmark budget leaves no room for sounding");
  return proposed(beams, n_rf, n_pilot);
}

CxVec training_vector(int n_streams) {
  if (n_streams < 1)
    throw std::invalid_argument("training_vector: n_streams must be >= 1");
  return CxVec::Constant(n_streams, Complex(1.0 / std::sqrt(double(n_streams)), 0.0));
}

CxMat generate_mode_candidates(const CxVec& prev_mode,
                               const RotationCodebook& rotations) {
  if (rotations.size() == 0)
    throw std::invalid_argument("generate_mode_candidates: empty codebook");
  if (prev_mode.size() != rotations.dim())
    throw std::invalid_argument("generate_mode_candidates: dimension mismatch");
  CxMat candidates(prev_mode.size(), rotations.size());
  for (int k = 0; k < rotations.size(); ++k)
    candidates.col(k) =
        rotations.codewords[std::size_t(k)].cwiseProduct(prev_mode);
  return candidates;
}

CxMat project_out_updated_modes(const CxMat& candidates, const CxMat& updated) {
  if (updated.cols() == 0) return candidates;
  if (updated.rows() != candidates.rows())
    throw std::invalid_argument("project_out_updated_modes: dimension mismatch");
  if (condition_number(updated) > 1e12)
    throw std::runtime_error(
        "project_out_updated_modes: degenerate projection, updated modes are "
        "rank deficient");
  const CxMat gram = updated.adjoint() * updated;
  const CxMat coeffs = gram.llt().solve(updated.adjoint() * candidates);
  return candidates - updated * coeffs;
}

CxMat legalize_candidates(const CxMat& candidates,
                          const CandidateDictionary& dict) {
  if (candidates.rows() != dict.columns.rows())
    throw std::invalid_argument("legalize_candidates: dimension mismatch");
  const CxMat correlations = dict.columns.adjoint() * candidates;
  CxMat out(candidates.rows(), candidates.cols());
  for (Eigen::Index m = 0; m < candidates.cols(); ++m) {
    int best = 0;
    if (candidates.col(m).squaredNorm() == 0.0) {
      std::cerr << "mmtrack: warning: zero candidate column after projection; "
                   "replacing with dictionary column 0\n";
    } else {
      double best_sq = std::norm(correlations(0, m));
      for (Eigen::Index j = 1; j < correlations.rows(); ++j) {
        const double sq = std::norm(correlations(j, m));
        if (sq > best_sq) {
          best_sq = sq;
          best = int(j);
        }
      }
    }
    out.col(m) = dict.columns.col(best);
  }
  return out;
}

CxVec sound_candidates(const CxMat& candidates, const ChannelMatrix& channel,
                       const AnalogMatrix& precoder_analog,
                       const CxMat& precoder_digital, const CxVec& training,
                       double noise_var, RngStream& rng) {
  if (precoder_digital.cols() != training.size())
    throw std::invalid_argument("sound_candidates: training length mismatch");
  const CxVec transmitted =
      channel.entries * (precoder_analog.entries * (precoder_digital * training));
  if (transmitted.size() != candidates.rows())
    throw std::invalid_argument("sound_candidates: dimension mismatch");

  const Eigen::Index n_rf = precoder_analog.entries.cols();
  const double sigma = std::sqrt(noise_var);
  CxVec x(candidates.cols());
  for (Eigen::Index start = 0; start < candidates.cols(); start += n_rf) {
    // One physical channel use sounds up to n_rf candidates against the
    // same received waveform.
    CxVec noise(transmitted.size());
    for (Eigen::Index i = 0; i < noise.size(); ++i)
      noise(i) = sigma * rng.complex_gaussian();
    const CxVec received = transmitted + noise;
    const Eigen::Index count = std::min(n_rf, candidates.cols() - start);
    x.segment(start, count) =
        candidates.middleCols(start, count).adjoint() * received;
  }
  return x;
}

int select_best(const CxVec& soundings) {
  if (soundings.size() == 0)
    throw std::invalid_argument("select_best: empty sounding vector");
  int best = 0;
  double best_sq = std::norm(soundings(0));
  for (int k = 1; k < soundings.size(); ++k) {
    const double sq = std::norm(soundings(k));
    if (sq > best_sq) {
      best_sq = sq;
      best = k;
    }
  }
  return best + 1;
}

namespace {

// Shared per-mode loop of Algorithm 1. candidate_source(l) yields the raw
// candidate matrix for mode l; everything after that (projection,
// legalization, sounding, selection) is identical for the tracking and the
// independent sounding schemes.
template <typename CandidateSource>
AnalogUpdate update_modes(int n_modes, Eigen::Index dim,
                          CandidateSource&& candidate_source,
                          const CandidateDictionary& dict,
                          const ChannelMatrix& channel,
                          const AnalogMatrix& precoder_analog,
                          const CxMat& precoder_digital, const CxVec& training,
                          double noise_var, RngStream& rng) {
  const Eigen::Index n_rf = precoder_analog.entries.cols();
  AnalogUpdate update;
  update.matrix.entries = CxMat(dim, n_modes);
  for (int l = 0; l < n_modes; ++l) {
    CxMat candidates = candidate_source(l);
    if (l >= 1)
      candidates = project_out_updated_modes(
          candidates, update.matrix.entries.leftCols(l));
    candidates = legalize_candidates(candidates, dict);
    const CxVec x = sound_candidates(candidates, channel, precoder_analog,
                                     precoder_digital, training, noise_var, rng);
    const int k = select_best(x);
    update.matrix.entries.col(l) = candidates.col(k - 1);
    update.channel_uses +=
        int((candidates.cols() + n_rf - 1) / n_rf);
  }
  return update;
}

}  // namespace

AnalogUpdate update_analog_combiner(const TrackerState& state,
                                    const ChannelMatrix& channel_next,
                                    const RotationCodebook& rotations,
                                    const CandidateDictionary& dict,
                                    const HybridConfig& cfg, RngStream& rng) {
  cfg.validate();
  const CxVec training = training_vector(cfg.n_streams);
  return update_modes(
      cfg.n_rf, cfg.n_rx,
      [&](int l) {
        return generate_mode_candidates(state.analog_combiner.entries.col(l),
                                        rotations);
      },
      dict, channel_next, state.analog_precoder, state.digital_precoder,
      training, cfg.noise_var, rng);
}

AnalogUpdate update_analog_precoder(const TrackerState& state,
                                    const AnalogMatrix& combiner_next,
                                    const ChannelMatrix& channel_next,
                                    const RotationCodebook& rotations_tx,
                                    const CandidateDictionary& dict_tx,
                                    const HybridConfig& cfg, RngStream& rng) {
  cfg.validate();
  const CxVec training = training_vector(cfg.n_streams);
  ChannelMatrix uplink;
  uplink.entries = channel_next.entries.transpose();
  // In the uplink the mobile is the transmitter: its analog stage is the
  // just-updated combiner and its digital stage the current combiner.
  AnalogMatrix ms_analog{combiner_next.entries};
  return update_modes(
      cfg.n_rf, cfg.n_tx,
      [&](int l) {
        return generate_mode_candidates(state.analog_precoder.entries.col(l),
                                        rotations_tx);
      },
      dict_tx, uplink, ms_analog, state.digital_combiner, training,
      cfg.noise_var, rng);
}

std::vector<int> static_sweep_indices(int n_beams, int n_can) {
  if (n_beams < 1 || n_can < 1)
    throw std::invalid_argument("static_sweep_indices: counts must be >= 1");
  std::vector<int> indices;
  indices.reserve(std::size_t(n_beams));
  for (int j = 0; j < n_beams; ++j) {
    const int idx =
        std::min(int(std::lround(double(j) * n_can / n_beams)), n_can - 1);
    if (indices.empty() || indices.back() != idx) indices.push_back(idx);
  }
  return indices;
}

AnalogPairUpdate independent_sounding_update(const TrackerState& state,
                                             const ChannelMatrix& channel_next,
                                             const CandidateDictionary& dict_rx,
                                             const CandidateDictionary& dict_tx,
                                             const HybridConfig& cfg,
                                             const SoundingBudget& budget,
                                             RngStream& rng) {
  cfg.validate();
  if (budget.codebook_size < 1)
    throw std::invalid_argument("independent_sounding_update: infeasible budget");
  const CxVec training = training_vector(cfg.n_streams);

  const std::vector<int> rx_idx =
      static_sweep_indices(budget.codebook_size, dict_rx.size());
  CxMat rx_sweep(dict_rx.dim(), Eigen::Index(rx_idx.size()));
  for (std::size_t j = 0; j < rx_idx.size(); ++j)
    rx_sweep.col(Eigen::Index(j)) = dict_rx.columns.col(rx_idx[j]);

  AnalogPairUpdate pair;
  AnalogUpdate combiner = update_modes(
      cfg.n_rf, cfg.n_rx, [&](int) { return rx_sweep; }, dict_rx, channel_next,
      state.analog_precoder, state.digital_precoder, training, cfg.noise_var,
      rng);

  const std::vector<int> tx_idx =
      static_sweep_indices(budget.codebook_size, dict_tx.size());
  CxMat tx_sweep(dict_tx.dim(), Eigen::Index(tx_idx.size()));
  for (std::size_t j = 0; j < tx_idx.size(); ++j)
    tx_sweep.col(Eigen::Index(j)) = dict_tx.columns.col(tx_idx[j]);

  ChannelMatrix uplink;
  uplink.entries = channel_next.entries.transpose();
  AnalogUpdate precoder = update_modes(
      cfg.n_rf, cfg.n_tx, [&](int) { return tx_sweep; }, dict_tx, uplink,
      combiner.matrix, state.digital_combiner, training, cfg.noise_var, rng);

  pair.combiner = std::move(combiner.matrix);
  pair.precoder = std::move(precoder.matrix);
  pair.channel_uses = combiner.channel_uses + precoder.channel_uses;
  return pair;
}

}  // namespace mmtrack
