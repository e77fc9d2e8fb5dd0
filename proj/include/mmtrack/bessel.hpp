// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MMTRACK_BESSEL_HPP
#define MMTRACK_BESSEL_HPP

namespace mmtrack {

// Zeroth-order Bessel function of the first kind. Power series on |x| <= 8,
// Hankel asymptotic expansion beyond; absolute error below 1e-8 everywhere.
double bessel_j0(double x);

}  // namespace mmtrack

#endif  // MMTRACK_BESSEL_HPP
