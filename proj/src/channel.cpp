// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mmtrack/channel.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "mmtrack/bessel.hpp"

namespace mmtrack {

void ChannelParams::validate() const {
  if (n_tx < 1 || n_rx < 1)
    throw std::invalid_argument("ChannelParams: antenna counts must be >= 1");
  if (n_paths < 1 || n_paths > std::min(n_tx, n_rx))
    throw std::invalid_argument(
        "ChannelParams: need 1 <= n_paths <= min(n_tx, n_rx)");
  if (!(spacing_ratio > 0.0))
    throw std::invalid_argument("ChannelParams: spacing_ratio must be > 0");
}

void EvolutionParams::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("EvolutionParams: rho must be in [0, 1]");
  if (!(delta >= 0.0))
    throw std::invalid_argument("EvolutionParams: delta must be >= 0");
}

double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * M_PI);  // in [-pi, pi]
  if (w >= M_PI) w -= 2.0 * M_PI;
  return w;
}

CxVec array_response(double angle, int n_antennas, double spacing_ratio) {
  if (n_antennas < 1)
    throw std::invalid_argument("array_response: n_antennas must be >= 1");
  const double step = 2.0 * M_PI * spacing_ratio * std::sin(angle);
  CxVec v(n_antennas);
  for (int k = 0; k < n_antennas; ++k) v(k) = std::polar(1.0, step * k);
  return v;
}

ChannelMatrix assemble_channel(const PathState& state,
                               const ChannelParams& params) {
  params.validate();
  const std::size_t n_paths = std::size_t(params.n_paths);
  if (state.aod.size() != n_paths || state.aoa.size() != n_paths ||
      state.gains.size() != n_paths)
    throw std::invalid_argument(
        "assemble_channel: path state length does not match n_paths");

  CxMat a_rx(params.n_rx, params.n_paths);
  CxMat a_tx(params.n_tx, params.n_paths);
  for (int i = 0; i < params.n_paths; ++i) {
    a_rx.col(i) = array_response(state.aoa[std::size_t(i)], params.n_rx,
                                 params.spacing_ratio) /
                  std::sqrt(double(params.n_rx));
    a_tx.col(i) = array_response(state.aod[std::size_t(i)], params.n_tx,
                                 params.spacing_ratio) /
                  std::sqrt(double(params.n_tx));
  }
  CxVec gains(params.n_paths);
  for (int i = 0; i < params.n_paths; ++i) gains(i) = state.gains[std::size_t(i)];

  const double scale =
      std::sqrt(double(params.n_tx) * double(params.n_rx) / params.n_paths);
  ChannelMatrix h;
  h.entries = scale * a_rx * gains.asDiagonal() * a_tx.adjoint();
  return h;
}

PathState sample_initial_state(RngStream& rng, const ChannelParams& params) {
  params.validate();
  PathState s;
  s.aod.resize(std::size_t(params.n_paths));
  s.aoa.resize(std::size_t(params.n_paths));
  s.gains.resize(std::size_t(params.n_paths));
  for (auto& a : s.aod) a = rng.uniform(-M_PI, M_PI);
  for (auto& a : s.aoa) a = rng.uniform(-M_PI, M_PI);
  for (auto& g : s.gains) g = rng.complex_gaussian();
  return s;
}

PathState evolve_state(const PathState& state, const EvolutionParams& evo,
                       RngStream& rng) {
  evo.validate();
  PathState next;
  next.aod.resize(state.aod.size());
  next.aoa.resize(state.aoa.size());
  next.gains.resize(state.gains.size());
  for (std::size_t i = 0; i < state.aod.size(); ++i)
    next.aod[i] = wrap_angle(state.aod[i] + rng.uniform(-evo.delta, evo.delta));
  for (std::size_t i = 0; i < state.aoa.size(); ++i)
    next.aoa[i] = wrap_angle(state.aoa[i] + rng.uniform(-evo.delta, evo.delta));
  const double innovation = std::sqrt(1.0 - evo.rho * evo.rho);
  for (std::size_t i = 0; i < state.gains.size(); ++i)
    next.gains[i] = evo.rho * state.gains[i] + innovation * rng.complex_gaussian();
  return next;
}

double doppler_hz(double carrier_hz, double velocity_kmh) {
  // Grouped so the km/h conversion stays exact for round inputs.
  return (carrier_hz * velocity_kmh * 1000.0) / (3.0e8 * 3600.0);
}

double correlation_from_velocity(double carrier_hz, double velocity_kmh,
                                 double block_s) {
  const double rho =
      bessel_j0(2.0 * M_PI * doppler_hz(carrier_hz, velocity_kmh) * block_s);
  if (rho < 0.0) {
    std::cerr << "mmtrack: warning: Jakes correlation " << rho
              << " is negative (past the first Bessel zero); clamping to 0\n";
    return 0.0;
  }
  return std::min(rho, 1.0);
}

}  // namespace mmtrack
