// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used only by the tests. Everything
// here is deliberately written with plain loops and textbook algorithms so
// it cannot share a failure mode with the library code it checks.

#ifndef MMTRACK_TESTS_ORACLES_HPP
#define MMTRACK_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mmtrack/channel.hpp"
#include "mmtrack/linalg.hpp"
#include "mmtrack/tracker.hpp"

namespace oracle {

using mmtrack::Complex;
using mmtrack::CxMat;

// Plain triple-loop matrix product.
inline CxMat mul(const CxMat& a, const CxMat& b) {
  CxMat c = CxMat::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Complex s(0, 0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline CxMat adjoint(const CxMat& a) {
  CxMat c(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
  return c;
}

// Determinant by LU factorization with partial pivoting.
inline Complex lu_determinant(CxMat a) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("lu_determinant: not square");
  Complex det(1.0, 0.0);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    double best = std::abs(a(col, col));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        pivot = r;
      }
    }
    if (best == 0.0) return Complex(0.0, 0.0);
    if (pivot != col) {
      for (Eigen::Index c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      det = -det;
    }
    det *= a(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const Complex factor = a(r, col) / a(col, col);
      for (Eigen::Index c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
    }
  }
  return det;
}

// Inverse by Gauss-Jordan elimination with partial pivoting.
inline CxMat gauss_jordan_inverse(CxMat a) {
  const Eigen::Index n = a.rows();
  CxMat inv = CxMat::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    double best = std::abs(a(col, col));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        pivot = r;
      }
    }
    if (best == 0.0)
      throw std::invalid_argument("gauss_jordan_inverse: singular matrix");
    if (pivot != col) {
      for (Eigen::Index c = 0; c < n; ++c) {
        std::swap(a(pivot, c), a(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    }
    const Complex d = a(col, col);
    for (Eigen::Index c = 0; c < n; ++c) {
      a(col, c) /= d;
      inv(col, c) /= d;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex factor = a(r, col);
      for (Eigen::Index c = 0; c < n; ++c) {
        a(r, c) -= factor * a(col, c);
        inv(r, c) -= factor * inv(col, c);
      }
    }
  }
  return inv;
}

// Eigenvalues of a Hermitian matrix through its characteristic polynomial:
// Faddeev-LeVerrier coefficients, then Durand-Kerner root iteration.
// Returns real parts sorted nonincreasing.
inline std::vector<double> charpoly_eigenvalues(const CxMat& m) {
  const Eigen::Index n = m.rows();
  std::vector<Complex> coeff(std::size_t(n) + 1);  // p(x) = sum coeff[k] x^(n-k)
  coeff[0] = Complex(1.0, 0.0);
  CxMat mk = CxMat::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    CxMat shifted = mk;
    for (Eigen::Index i = 0; i < n; ++i) shifted(i, i) += coeff[std::size_t(k - 1)];
    mk = mul(m, shifted);
    Complex trace(0, 0);
    for (Eigen::Index i = 0; i < n; ++i) trace += mk(i, i);
    coeff[std::size_t(k)] = -trace / double(k);
  }

  double scale = 1.0;
  for (const Complex& c : coeff) scale = std::max(scale, std::abs(c));
  std::vector<Complex> roots(std::size_t(n));
  Complex spread(0.4, 0.9);
  Complex point(1.0, 0.0);
  for (auto& r : roots) {
    point *= spread;
    r = point * scale;
  }
  auto eval = [&](Complex x) {
    Complex p = coeff[0];
    for (Eigen::Index k = 1; k <= n; ++k) p = p * x + coeff[std::size_t(k)];
    return p;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      Complex denom(1.0, 0.0);
      for (std::size_t j = 0; j < roots.size(); ++j)
        if (j != i) denom *= roots[i] - roots[j];
      const Complex update = eval(roots[i]) / denom;
      roots[i] -= update;
      moved = std::max(moved, std::abs(update));
    }
    if (moved < 1e-14 * scale) break;
  }

  std::vector<double> values;
  values.reserve(roots.size());
  for (const Complex& r : roots) values.push_back(std::max(r.real(), 0.0));
  std::sort(values.rbegin(), values.rend());
  return values;
}

// Simpson quadrature of the integral form J0(x) = (1/pi) int_0^pi cos(x sin t) dt.
inline double bessel_j0_quadrature(double x) {
  const int intervals = 20000;  // even
  const double h = M_PI / intervals;
  double sum = std::cos(x * std::sin(0.0)) + std::cos(x * std::sin(M_PI));
  for (int i = 1; i < intervals; ++i) {
    const double t = h * i;
    sum += (i % 2 == 1 ? 4.0 : 2.0) * std::cos(x * std::sin(t));
  }
  return sum * h / 3.0 / M_PI;
}

// Channel assembly as an explicit sum of rank-one path contributions.
inline CxMat rank1_sum_channel(const mmtrack::PathState& state,
                               const mmtrack::ChannelParams& params) {
  CxMat h = CxMat::Zero(params.n_rx, params.n_tx);
  const double scale =
      std::sqrt(double(params.n_tx) * double(params.n_rx) / params.n_paths) /
      std::sqrt(double(params.n_tx) * double(params.n_rx));
  for (int path = 0; path < params.n_paths; ++path) {
    const double ar_step =
        2.0 * M_PI * params.spacing_ratio * std::sin(state.aoa[std::size_t(path)]);
    const double at_step =
        2.0 * M_PI * params.spacing_ratio * std::sin(state.aod[std::size_t(path)]);
    for (int r = 0; r < params.n_rx; ++r)
      for (int t = 0; t < params.n_tx; ++t)
        h(r, t) += scale * state.gains[std::size_t(path)] *
                   std::polar(1.0, ar_step * r) *
                   std::conj(std::polar(1.0, at_step * t));
  }
  return h;
}

// Eq.-by-eq evaluation of the throughput expression with the Gram matrix
// explicitly inverted and the determinant taken by LU factorization.
inline double throughput_lu(const mmtrack::ChannelMatrix& channel,
                            const mmtrack::TrackerState& state,
                            double noise_var, int n_streams) {
  const CxMat wu = mul(state.analog_combiner.entries, state.digital_combiner);
  const CxMat fv = mul(state.analog_precoder.entries, state.digital_precoder);
  const CxMat gram = mul(adjoint(wu), wu);
  const CxMat coupled = mul(adjoint(wu), mul(channel.entries, fv));
  const CxMat signal = mul(coupled, adjoint(coupled));
  const CxMat inner = mul(gauss_jordan_inverse(gram), signal);
  CxMat arg = CxMat::Identity(n_streams, n_streams);
  const double c = 1.0 / (noise_var * double(n_streams));
  for (Eigen::Index i = 0; i < arg.rows(); ++i)
    for (Eigen::Index j = 0; j < arg.cols(); ++j) arg(i, j) += c * inner(i, j);
  const Complex det = lu_determinant(arg);
  return std::log2(std::abs(det));
}

}  // namespace oracle

#endif  // MMTRACK_TESTS_ORACLES_HPP
