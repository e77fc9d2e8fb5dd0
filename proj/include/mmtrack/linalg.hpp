// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MMTRACK_LINALG_HPP
#define MMTRACK_LINALG_HPP

#include <complex>

#include <Eigen/Dense>

namespace mmtrack {

using Complex = std::complex<double>;
using CxMat = Eigen::MatrixXcd;
using CxVec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

struct SvdResult {
  CxMat left;                 // orthonormal columns, square when input is square
  RealVec singular_values;    // sorted nonincreasing
  CxMat right;                // unitary
};

// One-sided Jacobi SVD for small dense complex matrices. Rotates column
// pairs until the off-diagonal mass of the implicit Gram matrix is
// negligible, so it is slow but very robust, which is the right trade for
// the tiny effective-channel matrices this library decomposes.
// Throws std::invalid_argument on non-finite entries.
SvdResult jacobi_svd(const CxMat& a);

// sigma_max / sigma_min of a matrix; +inf when singular.
double condition_number(const CxMat& a);

}  // namespace mmtrack

#endif  // MMTRACK_LINALG_HPP
