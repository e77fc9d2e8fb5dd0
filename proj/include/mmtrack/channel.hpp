// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MMTRACK_CHANNEL_HPP
#define MMTRACK_CHANNEL_HPP

#include <vector>

#include "mmtrack/linalg.hpp"
#include "mmtrack/rng.hpp"

namespace mmtrack {

// Geometry of the narrowband NLoS channel: uniform linear arrays at both
// ends, a small number of specular propagation paths.
struct ChannelParams {
  int n_tx = 64;
  int n_rx = 64;
  int n_paths = 4;
  double spacing_ratio = 0.5;  // inter-antenna spacing over wavelength

  void validate() const;
};

// Per-path parameterization of one channel realization. Angles are kept
// wrapped to [-pi, pi).
struct PathState {
  std::vector<double> aod;
  std::vector<double> aoa;
  std::vector<Complex> gains;
};

// First-order Gauss-Markov gain evolution plus bounded uniform angle drift.
struct EvolutionParams {
  double rho = 1.0;    // gain correlation between adjacent blocks, in [0, 1]
  double delta = 0.0;  // angle drift half-width in radians

  void validate() const;
};

struct ChannelMatrix {
  CxMat entries;  // n_rx x n_tx
};

// Wraps an angle into [-pi, pi). Exact for inputs already in range.
double wrap_angle(double angle);

// Unnormalized ULA steering vector: entry k = exp(j*2*pi*ratio*k*sin(angle)).
CxVec array_response(double angle, int n_antennas, double spacing_ratio);

// H = sqrt(n_tx*n_rx/L) * A_r(aoa) * diag(gains) * A_t(aod)^H with the
// array response matrices column-normalized by 1/sqrt(n).
ChannelMatrix assemble_channel(const PathState& state,
                               const ChannelParams& params);

// Gains i.i.d. CN(0,1); angles i.i.d. uniform on [-pi, pi).
PathState sample_initial_state(RngStream& rng, const ChannelParams& params);

// One block step: gains <- rho*gains + sqrt(1-rho^2)*CN(0,1),
// angles <- wrap(angles + U(-delta, delta)), drift i.i.d. per path per block.
PathState evolve_state(const PathState& state, const EvolutionParams& evo,
                       RngStream& rng);

// Maximum Doppler shift f_c * v / c with v given in km/h.
double doppler_hz(double carrier_hz, double velocity_kmh);

// Jakes' correlation rho = J0(2*pi*f_D*T). Negative values (past the first
// Bessel zero) are clamped to 0 with a warning since the evolution model
// requires rho in [0, 1].
double correlation_from_velocity(double carrier_hz, double velocity_kmh,
                                 double block_s);

}  // namespace mmtrack

#endif  // MMTRACK_CHANNEL_HPP
