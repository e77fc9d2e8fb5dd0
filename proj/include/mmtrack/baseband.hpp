// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MMTRACK_BASEBAND_HPP
#define MMTRACK_BASEBAND_HPP

#include "mmtrack/channel.hpp"
#include "mmtrack/codebook.hpp"
#include "mmtrack/linalg.hpp"
#include "mmtrack/rng.hpp"
#include "mmtrack/tracker.hpp"

namespace mmtrack {

// Unitary training signal: P * P^H = I.
struct PilotMatrix {
  CxMat entries;  // n_rf x n_p

  int length() const { return int(entries.cols()); }
};

struct EffectiveChannel {
  CxMat entries;  // n_rf x n_rf
};

// H_eff = W^H * H * F, the low-dimensional channel seen by the digital stage.
EffectiveChannel effective_channel(const AnalogMatrix& combiner,
                                   const ChannelMatrix& channel,
                                   const AnalogMatrix& precoder);

// First n_rf rows of the unitary n_p-point DFT matrix.
PilotMatrix make_pilot(int n_rf, int n_p);

// Least-squares estimate from received pilots: H_hat = Q * P^H.
EffectiveChannel ls_estimate(const CxMat& received, const PilotMatrix& pilot);

// Jacobi SVD of the effective channel estimate.
SvdResult svd(const EffectiveChannel& effective);

// First n_streams left singular vectors; the digital combiner choice.
CxMat digital_update(const EffectiveChannel& estimate, int n_streams);

// Scales digital so that ||analog * digital||_F^2 = n_streams.
CxMat normalize_power(const AnalogMatrix& analog, const CxMat& digital,
                      int n_streams);

// Achievable rate log2 det(I + (1/(noise_var*n_streams)) *
// (U^H W^H W U)^-1 U^H W^H H F V V^H F^H H^H W U) in bits/s/Hz.
double throughput(const ChannelMatrix& channel, const TrackerState& state,
                  double noise_var, int n_streams);

struct BlockResult {
  TrackerState state;
  double throughput = 0.0;
  int channel_uses = 0;
};

// One full block of the tracking scheme: analog combiner update, analog
// precoder update, downlink LS + digital combiner, uplink LS + digital
// precoder, power normalization, throughput on the true channel.
BlockResult block_pipeline(const TrackerState& state,
                           const ChannelMatrix& channel_next,
                           const RotationCodebook& rotations_rx,
                           const RotationCodebook& rotations_tx,
                           const CandidateDictionary& dict_rx,
                           const CandidateDictionary& dict_tx,
                           const PilotMatrix& pilot, const HybridConfig& cfg,
                           RngStream& rng);

// Same block structure with the static-sweep analog update of the
// independent sounding benchmark.
BlockResult block_pipeline_independent(const TrackerState& state,
                                       const ChannelMatrix& channel_next,
                                       const CandidateDictionary& dict_rx,
                                       const CandidateDictionary& dict_tx,
                                       const SoundingBudget& budget,
                                       const PilotMatrix& pilot,
                                       const HybridConfig& cfg, RngStream& rng);

}  // namespace mmtrack

#endif  // MMTRACK_BASEBAND_HPP
