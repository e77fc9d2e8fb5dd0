// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mmtrack/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mmtrack {

namespace {

// Orthonormal fill-in for columns whose singular value collapsed to zero.
// Picks standard basis vectors, strips their projection onto the columns
// already in place, and normalizes.
void complete_orthonormal_basis(CxMat& u, std::vector<bool>& is_set) {
  const Eigen::Index m = u.rows();
  const Eigen::Index n = u.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (is_set[std::size_t(j)]) continue;
    for (Eigen::Index e = 0; e < m; ++e) {
      CxVec candidate = CxVec::Zero(m);
      candidate(e) = 1.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (!is_set[std::size_t(k)]) continue;
        candidate -= u.col(k).dot(candidate) * u.col(k);
      }
      const double norm = candidate.norm();
      if (norm > 0.5) {
        u.col(j) = candidate / norm;
        is_set[std::size_t(j)] = true;
        break;
      }
    }
  }
}

}  // namespace

SvdResult jacobi_svd(const CxMat& a_in) {
  if (!a_in.allFinite())
    throw std::invalid_argument("jacobi_svd: matrix has non-finite entries");

  const Eigen::Index m = a_in.rows();
  const Eigen::Index n = a_in.cols();
  if (m < n) {
    // Decompose the adjoint and swap the factors back.
    SvdResult t = jacobi_svd(a_in.adjoint());
    return SvdResult{t.right, t.singular_values, t.left};
  }

  CxMat u = a_in;
  CxMat v = CxMat::Identity(n, n);
  constexpr double kPairTol = 1e-13;
  constexpr int kMaxSweeps = 60;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double app = u.col(p).squaredNorm();
        const double aqq = u.col(q).squaredNorm();
        const Complex apq = u.col(p).dot(u.col(q));
        const double mag = std::abs(apq);
        if (mag == 0.0 || mag <= kPairTol * std::sqrt(app * aqq)) continue;
        rotated = true;

        // Absorb the phase into column q so the 2x2 Gram block is real
        // symmetric, then apply the classic Jacobi rotation.
        const Complex phase = std::conj(apq / mag);
        const double tau = (aqq - app) / (2.0 * mag);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const CxVec up = u.col(p);
        const CxVec uq = u.col(q) * phase;
        u.col(p) = c * up - s * uq;
        u.col(q) = s * up + c * uq;

        const CxVec vp = v.col(p);
        const CxVec vq = v.col(q) * phase;
        v.col(p) = c * vp - s * vq;
        v.col(q) = s * vp + c * vq;
      }
    }
    if (!rotated) break;
  }

  RealVec sigma(n);
  for (Eigen::Index j = 0; j < n; ++j) sigma(j) = u.col(j).norm();

  // Sort nonincreasing, keeping the original order among ties.
  std::vector<Eigen::Index> order(std::size_t(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) {
                     return sigma(i) > sigma(j);
                   });

  SvdResult out;
  out.left = CxMat::Zero(m, n);
  out.right = CxMat::Zero(n, n);
  out.singular_values = RealVec(n);
  const double sigma_max = sigma(order.front());
  std::vector<bool> is_set(std::size_t(n), false);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[std::size_t(j)];
    out.singular_values(j) = sigma(src);
    out.right.col(j) = v.col(src);
    if (sigma(src) > sigma_max * std::numeric_limits<double>::epsilon() &&
        sigma(src) > 0.0) {
      out.left.col(j) = u.col(src) / sigma(src);
      is_set[std::size_t(j)] = true;
    }
  }
  complete_orthonormal_basis(out.left, is_set);
  return out;
}

double condition_number(const CxMat& a) {
  const SvdResult s = jacobi_svd(a);
  const double smax = s.singular_values(0);
  const double smin = s.singular_values(s.singular_values.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace mmtrack
