// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mmtrack/baseband.hpp"

#include <cmath>
#include <stdexcept>

namespace mmtrack {

EffectiveChannel effective_channel(const AnalogMatrix& combiner,
                                   const ChannelMatrix& channel,
                                   const AnalogMatrix& precoder) {
  if (combiner.entries.rows() != channel.entries.rows() ||
      precoder.entries.rows() != channel.entries.cols())
    throw std::invalid_argument("effective_channel: dimension mismatch");
  EffectiveChannel eff;
  eff.entries =
      combiner.entries.adjoint() * channel.entries * precoder.entries;
  return eff;
}

PilotMatrix make_pilot(int n_rf, int n_p) {
  if (n_rf < 1) throw std::invalid_argument("make_pilot: n_rf must be >= 1");
  if (n_p < n_rf)
    throw std::invalid_argument("make_pilot: pilot length must be >= n_rf");
  PilotMatrix pilot;
  pilot.entries = CxMat(n_rf, n_p);
  const double scale = 1.0 / std::sqrt(double(n_p));
  for (int k = 0; k < n_rf; ++k)
    for (int l = 0; l < n_p; ++l)
      pilot.entries(k, l) =
          std::polar(scale, -2.0 * M_PI * double(k) * double(l) / double(n_p));
  return pilot;
}

EffectiveChannel ls_estimate(const CxMat& received, const PilotMatrix& pilot) {
  if (received.cols() != pilot.entries.cols())
    throw std::invalid_argument("ls_estimate: dimension mismatch");
  EffectiveChannel est;
  est.entries = received * pilot.entries.adjoint();
  return est;
}

SvdResult svd(const EffectiveChannel& effective) {
  return jacobi_svd(effective.entries);
}

CxMat digital_update(const EffectiveChannel& estimate, int n_streams) {
  if (n_streams < 1 || n_streams > estimate.entries.cols())
    throw std::invalid_argument("digital_update: invalid n_streams");
  return svd(estimate).left.leftCols(n_streams);
}

CxMat normalize_power(const AnalogMatrix& analog, const CxMat& digital,
                      int n_streams) {
  const double norm = (analog.entries * digital).norm();
  if (norm == 0.0)
    throw std::runtime_error("normalize_power: degenerate zero product");
  return digital * (std::sqrt(double(n_streams)) / norm);
}

double throughput(const ChannelMatrix& channel, const TrackerState& state,
                  double noise_var, int n_streams) {
  const CxMat wu = state.analog_combiner.entries *
                   state.digital_combiner.leftCols(n_streams);
  const CxMat fv = state.analog_precoder.entries *
                   state.digital_precoder.leftCols(n_streams);

  const SvdResult wu_svd = jacobi_svd(wu);
  const double smax = wu_svd.singular_values(0);
  const double smin = wu_svd.singular_values(n_streams - 1);
  // cond(U^H W^H W U) = cond(WU)^2
  if (smin <= 0.0 || (smax / smin) * (smax / smin) > 1e12)
    throw std::runtime_error(
        "throughput: degenerate combiner, whitening matrix is singular");

  const CxMat gram = wu.adjoint() * wu;
  const CxMat coupled = wu.adjoint() * channel.entries * fv;  // B
  // det(I + c G^-1 B B^H) = det(I + c B^H G^-1 B); the right-hand side is
  // Hermitian positive definite, so a Cholesky factorization gives the
  // log-determinant without an explicit inverse.
  const CxMat whitened = coupled.adjoint() * gram.llt().solve(coupled);
  const double c = 1.0 / (noise_var * double(n_streams));
  CxMat inside = CxMat::Identity(n_streams, n_streams) + c * whitened;
  inside = 0.5 * (inside + inside.adjoint().eval());

  const Eigen::LLT<CxMat> llt(inside);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("throughput: capacity matrix not positive definite");
  double log_det = 0.0;
  const CxMat l = llt.matrixL();
  for (int i = 0; i < n_streams; ++i) log_det += 2.0 * std::log(l(i, i).real());
  return std::max(log_det / std::log(2.0), 0.0);
}

namespace {

struct DigitalPair {
  CxMat combiner;
  CxMat precoder;
};

CxMat noise_matrix(Eigen::Index rows, Eigen::Index cols, double sigma,
                   RngStream& rng) {
  CxMat z(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      z(i, j) = sigma * rng.complex_gaussian();
  return z;
}

// Pilot-based digital update for both ends. The mobile estimates the
// downlink effective channel; the base station estimates the transposed
// effective channel from uplink pilots with its own independent noise, so
// no channel state is shared between the two ends.
DigitalPair update_digital_pair(const AnalogMatrix& combiner,
                                const AnalogMatrix& precoder,
                                const ChannelMatrix& channel,
                                const PilotMatrix& pilot,
                                const HybridConfig& cfg, RngStream& rng) {
  const EffectiveChannel eff = effective_channel(combiner, channel, precoder);
  const double sigma = std::sqrt(cfg.noise_var);

  const CxMat received_dl =
      eff.entries * pilot.entries +
      noise_matrix(eff.entries.rows(), pilot.entries.cols(), sigma, rng);
  const EffectiveChannel est_ms = ls_estimate(received_dl, pilot);

  const CxMat received_ul =
      eff.entries.transpose() * pilot.entries +
      noise_matrix(eff.entries.rows(), pilot.entries.cols(), sigma, rng);
  EffectiveChannel est_bs;
  est_bs.entries = ls_estimate(received_ul, pilot).entries.transpose();

  DigitalPair pair;
  pair.combiner = digital_update(est_ms, cfg.n_streams);
  pair.precoder = svd(est_bs).right.leftCols(cfg.n_streams);
  return pair;
}

BlockResult finish_block(AnalogMatrix combiner, AnalogMatrix precoder,
                         int analog_uses, const ChannelMatrix& channel_next,
                         const PilotMatrix& pilot, const HybridConfig& cfg,
                         RngStream& rng) {
  const DigitalPair digital =
      update_digital_pair(combiner, precoder, channel_next, pilot, cfg, rng);

  BlockResult result;
  result.state.digital_combiner =
      normalize_power(combiner, digital.combiner, cfg.n_streams);
  result.state.digital_precoder =
      normalize_power(precoder, digital.precoder, cfg.n_streams);
  result.state.analog_combiner = std::move(combiner);
  result.state.analog_precoder = std::move(precoder);
  result.channel_uses = analog_uses + 2 * pilot.length();
  result.throughput =
      throughput(channel_next, result.state, cfg.noise_var, cfg.n_streams);
  return result;
}

}  // namespace

BlockResult block_pipeline(const TrackerState& state,
                           const ChannelMatrix& channel_next,
                           const RotationCodebook& rotations_rx,
                           const RotationCodebook& rotations_tx,
                           const CandidateDictionary& dict_rx,
                           const CandidateDictionary& dict_tx,
                           const PilotMatrix& pilot, const HybridConfig& cfg,
                           RngStream& rng) {
  AnalogUpdate combiner = update_analog_combiner(state, channel_next,
                                                 rotations_rx, dict_rx, cfg, rng);
  AnalogUpdate precoder =
      update_analog_precoder(state, combiner.matrix, channel_next, rotations_tx,
                             dict_tx, cfg, rng);
  return finish_block(std::move(combiner.matrix), std::move(precoder.matrix),
                      combiner.channel_uses + precoder.channel_uses,
                      channel_next, pilot, cfg, rng);
}

BlockResult block_pipeline_independent(const TrackerState& state,
                                       const ChannelMatrix& channel_next,
                                       const CandidateDictionary& dict_rx,
                                       const CandidateDictionary& dict_tx,
                                       const SoundingBudget& budget,
                                       const PilotMatrix& pilot,
                                       const HybridConfig& cfg,
                                       RngStream& rng) {
  AnalogPairUpdate analog = independent_sounding_update(
      state, channel_next, dict_rx, dict_tx, cfg, budget, rng);
  return finish_block(std::move(analog.combiner), std::move(analog.precoder),
                      analog.channel_uses, channel_next, pilot, cfg, rng);
}

}  // namespace mmtrack
