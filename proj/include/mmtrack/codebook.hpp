// Copyright (c) 2026 the mmtrack authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MMTRACK_CODEBOOK_HPP
#define MMTRACK_CODEBOOK_HPP

#include <string>
#include <vector>

#include "mmtrack/linalg.hpp"
#include "mmtrack/rng.hpp"

namespace mmtrack {

// Basis codebook of diagonal unitary rotations. Codeword i is the generator
// raised to the i-th power, so only the diagonals are stored. All diagonal
// phases live on the M-point grid {2*pi*m/M} with M prime and M > dim.
struct BasisCodebook {
  std::vector<CxVec> codewords;         // diagonals of R^1 .. R^N
  std::vector<int> generator_exponents; // grid indices of the generator phases
  int phase_order = 0;                  // M
  double min_distance = 0.0;            // achieved min pairwise chordal distance

  int size() const { return int(codewords.size()); }
  int dim() const { return codewords.empty() ? 0 : int(codewords.front().size()); }
};

// Correlation-adapted rotation codebook; diagonals normalized to unit
// Euclidean norm. The codewords are deliberately not unitary: hardware
// feasibility is restored downstream by dictionary replacement.
struct RotationCodebook {
  std::vector<CxVec> codewords;  // diagonals of C_1 .. C_N
  double epsilon = 0.0;

  int size() const { return int(codewords.size()); }
  int dim() const { return codewords.empty() ? 0 : int(codewords.front().size()); }
};

// How the shrunk generator G_i = eps*I + sqrt(1-eps^2)*R_i is pushed back
// toward a usable rotation: divide by the diagonal norm (literal), or keep
// only the entrywise phases (projection onto diagonal unitaries).
enum class AdaptNormalization { kGlobal, kEntrywise };

// Overcomplete grid of quantized steering vectors used to legalize arbitrary
// beamforming vectors back onto the phase-shifter hardware.
struct CandidateDictionary {
  CxMat columns;                   // n_rx x n_can, entries of modulus 1/sqrt(n_rx)
  std::vector<double> grid_angles; // angle of each column
  int phase_bits = 0;

  int dim() const { return int(columns.rows()); }
  int size() const { return int(columns.cols()); }
};

// Nearest point of the Q-bit phase grid {2*pi*k/2^Q} in circular distance.
// Exact midpoints round toward the smaller grid index.
double quantize_phase(double phase, int bits);

// Chordal distance between diagonal unitary codewords given as diagonals:
// sqrt(dim - |r_i^H r_j|^2 / dim). Zero iff the two differ by a global phase.
double chordal_distance(const CxVec& r_i, const CxVec& r_j);

// Max-min chordal distance search over generators with phases on the M-point
// grid. Enumerates all M^n_rx generators when that fits in search_budget,
// otherwise runs seeded random restarts with greedy coordinate refinement.
BasisCodebook design_basis_codebook(int n_rx, int size, int phase_order,
                                    long search_budget, RngStream& rng);

// C_i = (eps*I + sqrt(1-eps^2)*R_i) / ||diag||_2 with eps = gamma * rho.
RotationCodebook adapt_codebook(const BasisCodebook& basis, double rho,
                                double gamma,
                                AdaptNormalization normalization =
                                    AdaptNormalization::kGlobal);

// Columns are quantized steering vectors at angles -pi + (2i+1)*pi/n_can.
CandidateDictionary build_candidate_dictionary(int n_rx, int n_can, int bits,
                                               double spacing_ratio);

// Index of the dictionary column maximizing |w^H a_j|^2; invariant to global
// scaling of w, ties to the lowest index. Throws on a zero vector.
int nearest_candidate(const CxVec& w, const CandidateDictionary& dict);

// Plain-text save/load. Basis files start with "basis n_rx N M", dictionary
// files with "dictionary n_rx n_can Q"; each codeword/column follows as one
// "re,im" pair per line.
void save_codebook(const BasisCodebook& basis, const std::string& path);
BasisCodebook load_codebook(const std::string& path);
void save_dictionary(const CandidateDictionary& dict, const std::string& path);
CandidateDictionary load_dictionary(const std::string& path);

}  // namespace mmtrack

#endif  // MMTRACK_CODEBOOK_HPP
