// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MMTRACK_RNG_HPP
#define MMTRACK_RNG_HPP

#include <array>
#include <complex>
#include <cstdint>

namespace mmtrack {

// Single block of the Philox4x32-10 counter-based generator (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11). Exposed so the
// known-answer vectors from the reference implementation can be checked.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A seedable random stream addressed by (master_seed, trial_index, substream).
// Streams with distinct addresses are statistically independent, which lets
// Monte Carlo trials run in parallel and still reproduce bitwise.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint32_t trial_index,
            std::uint32_t substream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Circularly symmetric complex Gaussian, zero mean, unit variance.
  std::complex<double> complex_gaussian();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t trial_;
  std::uint32_t substream_;
  std::uint64_t block_;
  std::array<std::uint32_t, 4> buffer_;
  int cursor_;
};

}  // namespace mmtrack

#endif  // MMTRACK_RNG_HPP
