// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mmtrack/rng.hpp"

#include <cmath>

namespace mmtrack {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
  const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32);
  const std::uint32_t lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32);
  const std::uint32_t lo1 = std::uint32_t(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kWeyl0;
  key[1] += kWeyl1;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) philox_round(counter, key);
  return counter;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint32_t trial_index,
                     std::uint32_t substream)
    : key_{std::uint32_t(master_seed), std::uint32_t(master_seed >> 32)},
      trial_(trial_index),
      substream_(substream),
      block_(0),
      buffer_{},
      cursor_(4) {}

void RngStream::refill() {
  buffer_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32),
                        substream_, trial_},
                       key_);
  ++block_;
  cursor_ = 0;
}

std::uint32_t RngStream::next_u32() {
  if (cursor_ >= 4) refill();
  return buffer_[cursor_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::complex<double> RngStream::complex_gaussian() {
  // Box-Muller in polar form; u1 is mapped into (0, 1] so log stays finite.
  const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  const double radius = std::sqrt(-std::log(u1));
  return std::polar(radius, 2.0 * M_PI * u2);
}

}  // namespace mmtrack
