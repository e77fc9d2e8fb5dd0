// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MMTRACK_TRACKER_HPP
#define MMTRACK_TRACKER_HPP

#include <vector>

#include "mmtrack/channel.hpp"
#include "mmtrack/codebook.hpp"
#include "mmtrack/linalg.hpp"
#include "mmtrack/rng.hpp"

namespace mmtrack {

// Dimensions and constraints of the hybrid analog/digital transceiver.
struct HybridConfig {
  int n_tx = 64;
  int n_rx = 64;
  int n_rf = 4;
  int n_streams = 4;
  int phase_bits = 4;
  double noise_var = 1.0;

  void validate() const;
};

// Phase-shifter stage: every entry has modulus 1/sqrt(antennas) and a phase
// on the Q-bit grid. All matrices produced here are built from dictionary
// columns, so the constraint holds by construction.
struct AnalogMatrix {
  CxMat entries;  // antennas x n_rf
};

struct TrackerState {
  AnalogMatrix analog_combiner;  // W, n_rx x n_rf
  AnalogMatrix analog_precoder;  // F, n_tx x n_rf
  CxMat digital_combiner;        // U, n_rf x n_streams
  CxMat digital_precoder;        // V, n_rf x n_streams
};

// Channel-use bookkeeping for one sounding scheme. The hybrid front end
// sounds up to n_rf candidates per channel use, so a codebook of N vectors
// costs ceil(N/n_rf) uses per mode.
struct SoundingBudget {
  int codebook_size = 0;
  int uses_per_mode = 0;
  int total_uses_per_block = 0;

  // Both link directions plus the two pilot phases.
  static SoundingBudget proposed(int codebook_size, int n_rf, int n_pilot);
  // Largest static per-mode sweep that fits in max_uses channel uses.
  static SoundingBudget benchmark(int max_uses, int n_rf, int n_pilot);
};

struct AnalogUpdate {
  AnalogMatrix matrix;
  int channel_uses = 0;
};

struct AnalogPairUpdate {
  AnalogMatrix combiner;
  AnalogMatrix precoder;
  int channel_uses = 0;
};

// Training vector: all ones scaled by 1/sqrt(n_streams) so the sounding
// power matches the data constraint E[s s^H] = I/n_streams.
CxVec training_vector(int n_streams);

// Column k is rotations.codewords[k] (a diagonal) applied to prev_mode.
CxMat generate_mode_candidates(const CxVec& prev_mode,
                               const RotationCodebook& rotations);

// (I - T (T^H T)^-1 T^H) * candidates for T = updated. A T with no columns
// passes candidates through unchanged. Throws when T is rank deficient
// (condition number above 1e12).
CxMat project_out_updated_modes(const CxMat& candidates, const CxMat& updated);

// Replace every column by its nearest dictionary column; an exactly-zero
// column maps to dictionary column 0 with a warning.
CxMat legalize_candidates(const CxMat& candidates,
                          const CandidateDictionary& dict);

// x(k) = candidates.col(k)^H * (H*F*V*training + noise), with one fresh
// noise vector per channel use and up to precoder.cols() candidates sounded
// per use.
CxVec sound_candidates(const CxMat& candidates, const ChannelMatrix& channel,
                       const AnalogMatrix& precoder_analog,
                       const CxMat& precoder_digital, const CxVec& training,
                       double noise_var, RngStream& rng);

// 1-based index of the entry with the largest squared magnitude, ties to the
// lowest index.
int select_best(const CxVec& soundings);

// Mode-by-mode combiner update: generate, project (modes 2..), legalize,
// sound through the previous block's precoder pair, select, commit.
AnalogUpdate update_analog_combiner(const TrackerState& state,
                                    const ChannelMatrix& channel_next,
                                    const RotationCodebook& rotations,
                                    const CandidateDictionary& dict,
                                    const HybridConfig& cfg, RngStream& rng);

// Uplink mirror: the mobile transmits through the just-updated combiner and
// the current digital combiner; the uplink channel is the transpose of the
// downlink channel (TDD reciprocity).
AnalogUpdate update_analog_precoder(const TrackerState& state,
                                    const AnalogMatrix& combiner_next,
                                    const ChannelMatrix& channel_next,
                                    const RotationCodebook& rotations_tx,
                                    const CandidateDictionary& dict_tx,
                                    const HybridConfig& cfg, RngStream& rng);

// Evenly spaced dictionary subset used as the static benchmark codebook:
// round(j * n_can / n_beams) for j = 0..n_beams-1, deduplicated.
std::vector<int> static_sweep_indices(int n_beams, int n_can);

// Benchmark update: the same per-mode machinery, but candidates come from a
// static dictionary sweep instead of rotations of the previous mode. Also
// used to initialize block 0 of the tracking scheme.
AnalogPairUpdate independent_sounding_update(const TrackerState& state,
                                             const ChannelMatrix& channel_next,
                                             const CandidateDictionary& dict_rx,
                                             const CandidateDictionary& dict_tx,
                                             const HybridConfig& cfg,
                                             const SoundingBudget& budget,
                                             RngStream& rng);

}  // namespace mmtrack

#endif  // MMTRACK_TRACKER_HPP
