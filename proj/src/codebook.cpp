// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mmtrack/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mmtrack/channel.hpp"

namespace mmtrack {

namespace {

bool is_prime(int m) {
  if (m < 2) return false;
  for (int d = 2; d * d <= m; ++d)
    if (m % d == 0) return false;
  return true;
}

// Distances between powers of one generator depend only on the power gap:
// |diag(R^i)^H diag(R^j)| = |sum_k w^((j-i)*t_k)|. Scoring a generator is
// therefore a scan over the gap sums S_1 .. S_{N-1}.
struct GeneratorScore {
  std::vector<Complex> gap_sums;  // S_m, m = 1 .. N-1
  double min_sq_distance = 0.0;   // min_m (n - |S_m|^2 / n)
};

class GeneratorSearch {
 public:
  GeneratorSearch(int n_rx, int size, int phase_order)
      : n_(n_rx), size_(size), order_(phase_order), roots_(std::size_t(phase_order)) {
    for (int r = 0; r < order_; ++r)
      roots_[std::size_t(r)] = std::polar(1.0, 2.0 * M_PI * r / order_);
  }

  GeneratorScore score(const std::vector<int>& exponents) const {
    GeneratorScore s;
    s.gap_sums.assign(std::size_t(std::max(size_ - 1, 0)), Complex(0, 0));
    for (int m = 1; m < size_; ++m) {
      Complex sum(0, 0);
      for (int k = 0; k < n_; ++k)
        sum += roots_[std::size_t((long(m) * exponents[std::size_t(k)]) % order_)];
      s.gap_sums[std::size_t(m - 1)] = sum;
    }
    s.min_sq_distance = min_sq_from_sums(s.gap_sums);
    return s;
  }

  double min_sq_from_sums(const std::vector<Complex>& sums) const {
    if (sums.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& s : sums)
      best = std::min(best, double(n_) - std::norm(s) / double(n_));
    return best;
  }

  // Coordinate-wise greedy improvement, repeated until a full pass over the
  // phases makes no change. Candidate scores are evaluated on the fly from
  // the gap-sum deltas; only an accepted move touches the stored sums.
  void refine(std::vector<int>& exponents, GeneratorScore& current) const {
    if (size_ < 2) return;
    for (int pass = 0; pass < 50; ++pass) {
      bool improved = false;
      for (int k = 0; k < n_; ++k) {
        const int old_val = exponents[std::size_t(k)];
        int best_val = old_val;
        double best_score = current.min_sq_distance;
        for (int val = 0; val < order_; ++val) {
          if (val == old_val) continue;
          double min_sq = std::numeric_limits<double>::infinity();
          for (int m = 1; m < size_; ++m) {
            const Complex s =
                current.gap_sums[std::size_t(m - 1)] +
                roots_[std::size_t((long(m) * val) % order_)] -
                roots_[std::size_t((long(m) * old_val) % order_)];
            min_sq = std::min(min_sq, double(n_) - std::norm(s) / double(n_));
          }
          if (min_sq > best_score) {
            best_score = min_sq;
            best_val = val;
          }
        }
        if (best_val != old_val) {
          for (int m = 1; m < size_; ++m)
            current.gap_sums[std::size_t(m - 1)] +=
                roots_[std::size_t((long(m) * best_val) % order_)] -
                roots_[std::size_t((long(m) * old_val) % order_)];
          current.min_sq_distance = best_score;
          exponents[std::size_t(k)] = best_val;
          improved = true;
        }
      }
      if (!improved) break;
    }
  }

  BasisCodebook build(const std::vector<int>& exponents, double min_sq) const {
    BasisCodebook book;
    book.phase_order = order_;
    book.generator_exponents = exponents;
    book.min_distance = std::sqrt(std::max(min_sq, 0.0));
    if (std::isinf(min_sq)) book.min_distance = min_sq;
    book.codewords.reserve(std::size_t(size_));
    for (int i = 1; i <= size_; ++i) {
      CxVec diag(n_);
      for (int k = 0; k < n_; ++k)
        diag(k) = roots_[std::size_t((long(i) * exponents[std::size_t(k)]) % order_)];
      book.codewords.push_back(std::move(diag));
    }
    return book;
  }

 private:
  int n_;
  int size_;
  int order_;
  std::vector<Complex> roots_;
};

}  // namespace

double quantize_phase(double phase, int bits) {
  if (bits < 1) throw std::invalid_argument("quantize_phase: bits must be >= 1");
  const double two_pi = 2.0 * M_PI;
  double p = phase - two_pi * std::floor(phase / two_pi);  // into [0, 2*pi)
  const long levels = 1L << bits;
  const double step = two_pi / double(levels);
  // ceil(x - 1/2) sends exact midpoints to the lower grid index.
  long k = long(std::ceil(p / step - 0.5));
  k %= levels;
  if (k < 0) k += levels;
  return double(k) * step;
}

double chordal_distance(const CxVec& r_i, const CxVec& r_j) {
  if (r_i.size() != r_j.size())
    throw std::invalid_argument("chordal_distance: dimension mismatch");
  const double n = double(r_i.size());
  const double ip_sq = std::norm(r_i.dot(r_j));
  return std::sqrt(std::max(n - ip_sq / n, 0.0));
}

BasisCodebook design_basis_codebook(int n_rx, int size, int phase_order,
                                    long search_budget, RngStream& rng) {
  if (n_rx < 1) throw std::invalid_argument("design_basis_codebook: n_rx must be >= 1");
  if (size < 1) throw std::invalid_argument("design_basis_codebook: size must be >= 1");
  if (!is_prime(phase_order) || phase_order <= n_rx)
    throw std::invalid_argument(
        "design_basis_codebook: phase_order must be prime and > n_rx");
  if (search_budget < 1)
    throw std::invalid_argument("design_basis_codebook: search_budget must be >= 1");

  const GeneratorSearch search(n_rx, size, phase_order);

  // Exhaustive enumeration when the grid fits in the budget.
  double space = 1.0;
  for (int k = 0; k < n_rx && space <= double(search_budget); ++k)
    space *= phase_order;
  if (space <= double(search_budget)) {
    std::vector<int> exponents(std::size_t(n_rx), 0);
    std::vector<int> best = exponents;
    double best_sq = search.score(exponents).min_sq_distance;
    while (true) {
      int k = 0;
      while (k < n_rx) {
        if (++exponents[std::size_t(k)] < phase_order) break;
        exponents[std::size_t(k)] = 0;
        ++k;
      }
      if (k == n_rx) break;
      const double sq = search.score(exponents).min_sq_distance;
      if (sq > best_sq) {
        best_sq = sq;
        best = exponents;
      }
    }
    return search.build(best, best_sq);
  }

  // Random restarts with greedy refinement; restart 0 is the identity
  // generator so the trivial baseline is always part of the comparison.
  std::vector<int> best;
  double best_sq = -std::numeric_limits<double>::infinity();
  for (long restart = 0; restart < search_budget; ++restart) {
    std::vector<int> exponents(std::size_t(n_rx), 0);
    if (restart > 0)
      for (int k = 0; k < n_rx; ++k)
        exponents[std::size_t(k)] = int(rng.next_u32() % std::uint32_t(phase_order));
    GeneratorScore sc = search.score(exponents);
    search.refine(exponents, sc);
    if (sc.min_sq_distance > best_sq) {
      best_sq = sc.min_sq_distance;
      best = exponents;
    }
  }
  return search.build(best, best_sq);
}

RotationCodebook adapt_codebook(const BasisCodebook& basis, double rho,
                                double gamma, AdaptNormalization normalization) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("adapt_codebook: rho must be in [0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("adapt_codebook: gamma must be in (0, 1]");

  const double eps = gamma * rho;
  const double radius = std::sqrt(std::max(1.0 - eps * eps, 0.0));
  const double inv_sqrt_n = 1.0 / std::sqrt(double(basis.dim()));

  RotationCodebook rot;
  rot.epsilon = eps;
  rot.codewords.reserve(basis.codewords.size());
  for (const CxVec& r : basis.codewords) {
    CxVec g = CxVec::Constant(r.size(), Complex(eps, 0.0)) + radius * r;
    if (normalization == AdaptNormalization::kGlobal) {
      rot.codewords.push_back(g / g.norm());
    } else {
      CxVec c(g.size());
      for (Eigen::Index k = 0; k < g.size(); ++k)
        c(k) = g(k) / std::abs(g(k)) * inv_sqrt_n;
      rot.codewords.push_back(std::move(c));
    }
  }
  return rot;
}

CandidateDictionary build_candidate_dictionary(int n_rx, int n_can, int bits,
                                               double spacing_ratio) {
  if (n_can < n_rx)
    throw std::invalid_argument("build_candidate_dictionary: n_can must be >= n_rx");
  CandidateDictionary dict;
  dict.phase_bits = bits;
  dict.columns = CxMat(n_rx, n_can);
  dict.grid_angles.resize(std::size_t(n_can));
  const double inv_sqrt_n = 1.0 / std::sqrt(double(n_rx));
  for (int i = 0; i < n_can; ++i) {
    const double angle = -M_PI + (2.0 * i + 1.0) * M_PI / n_can;
    dict.grid_angles[std::size_t(i)] = angle;
    const CxVec raw = array_response(angle, n_rx, spacing_ratio);
    for (int k = 0; k < n_rx; ++k)
      dict.columns(k, i) =
          std::polar(inv_sqrt_n, quantize_phase(std::arg(raw(k)), bits));
  }
  return dict;
}

int nearest_candidate(const CxVec& w, const CandidateDictionary& dict) {
  if (w.size() != dict.columns.rows())
    throw std::invalid_argument("nearest_candidate: dimension mismatch");
  if (w.squaredNorm() == 0.0)
    throw std::invalid_argument("nearest_candidate: zero vector");
  const CxVec correlations = dict.columns.adjoint() * w;
  int best = 0;
  double best_sq = std::norm(correlations(0));
  for (int j = 1; j < correlations.size(); ++j) {
    const double sq = std::norm(correlations(j));
    if (sq > best_sq) {
      best_sq = sq;
      best = j;
    }
  }
  return best;
}

namespace {

void write_blocks(std::ostream& os, const CxMat& columns) {
  char buf[80];
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    for (Eigen::Index k = 0; k < columns.rows(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", columns(k, j).real(),
                    columns(k, j).imag());
      os << buf;
    }
    os << "\n";
  }
}

CxMat read_blocks(std::istream& is, int dim, int count, const std::string& path) {
  CxMat columns(dim, count);
  std::string line;
  Eigen::Index j = 0, k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%lg,%lg", &re, &im) != 2)
      throw std::runtime_error("malformed codeword line in " + path + ": " + line);
    if (j >= count)
      throw std::runtime_error("too many codeword entries in " + path);
    columns(k, j) = Complex(re, im);
    if (++k == dim) {
      k = 0;
      ++j;
    }
  }
  if (j != count || k != 0)
    throw std::runtime_error("truncated codeword data in " + path);
  return columns;
}

}  // namespace

void save_codebook(const BasisCodebook& basis, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "basis " << basis.dim() << " " << basis.size() << " "
     << basis.phase_order << "\n";
  CxMat columns(basis.dim(), basis.size());
  for (int i = 0; i < basis.size(); ++i)
    columns.col(i) = basis.codewords[std::size_t(i)];
  write_blocks(os, columns);
  if (!os) throw std::runtime_error("write failed: " + path);
}

BasisCodebook load_codebook(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string tag;
  int dim = 0, count = 0, order = 0;
  is >> tag >> dim >> count >> order;
  if (!is || tag != "basis")
    throw std::runtime_error("not a basis codebook file: " + path);
  is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  const CxMat columns = read_blocks(is, dim, count, path);

  BasisCodebook basis;
  basis.phase_order = order;
  basis.codewords.reserve(std::size_t(count));
  for (int i = 0; i < count; ++i) basis.codewords.push_back(columns.col(i));
  // Generator exponents and the achieved distance are derived, not stored.
  basis.generator_exponents.resize(std::size_t(dim));
  for (int k = 0; k < dim; ++k) {
    const double phase = std::arg(columns(k, 0));
    long idx = std::lround(phase / (2.0 * M_PI) * order);
    idx %= order;
    if (idx < 0) idx += order;
    basis.generator_exponents[std::size_t(k)] = int(idx);
  }
  double best_sq = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j)
      best_sq = std::min(best_sq, chordal_distance(basis.codewords[std::size_t(i)],
                                                   basis.codewords[std::size_t(j)]));
  basis.min_distance = best_sq;
  return basis;
}

void save_dictionary(const CandidateDictionary& dict, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "dictionary " << dict.dim() << " " << dict.size() << " "
     << dict.phase_bits << "\n";
  write_blocks(os, dict.columns);
  if (!os) throw std::runtime_error("write failed: " + path);
}

CandidateDictionary load_dictionary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string tag;
  int dim = 0, count = 0, bits = 0;
  is >> tag >> dim >> count >> bits;
  if (!is || tag != "dictionary")
    throw std::runtime_error("not a dictionary file: " + path);
  is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');

  CandidateDictionary dict;
  dict.phase_bits = bits;
  dict.columns = read_blocks(is, dim, count, path);
  dict.grid_angles.resize(std::size_t(count));
  for (int i = 0; i < count; ++i)
    dict.grid_angles[std::size_t(i)] = -M_PI + (2.0 * i + 1.0) * M_PI / count;
  return dict;
}

}  // namespace mmtrack
