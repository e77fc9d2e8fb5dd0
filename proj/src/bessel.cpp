// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mmtrack/bessel.hpp"

#include <cmath>

namespace mmtrack {

double bessel_j0(double x) {
  const double ax = std::fabs(x);

  if (ax <= 8.0) {
    // sum_k (-(x^2/4))^k / (k!)^2
    const double ratio = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 80; ++k) {
      term *= ratio / (double(k) * double(k));
      sum += term;
      if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
  }

  // Hankel expansion with the rational fits of Abramowitz & Stegun 9.4.3.
  const double z = 8.0 / ax;
  const double y = z * z;
  const double p =
      1.0 + y * (-0.1098628627e-2 +
                 y * (0.2734510407e-4 +
                      y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
  const double q =
      -0.1562499995e-1 +
      y * (0.1430488765e-3 +
           y * (-0.6911147651e-5 + y * (0.7621095161e-6 - y * 0.934935152e-7)));
  const double chi = ax - 0.78539816339744830961;  // pi/4
  return std::sqrt(0.63661977236758134308 / ax) *  // 2/pi
         (std::cos(chi) * p - z * std::sin(chi) * q);
}

}  // namespace mmtrack
