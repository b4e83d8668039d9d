// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ptscan/hamiltonian.hpp"
#include "ptscan/linalg.hpp"

namespace ptscan {

enum class Sector { full, even, odd };

std::string_view to_string(Sector s);
Sector sector_from_string(std::string_view s);

/// Per-mode basis cutoffs, optionally restricted to a parity sector of the
/// oscillator quantum number.
struct Truncation {
  std::vector<std::size_t> cutoffs;
  std::vector<Sector> sectors;  // empty means full in every mode

  std::size_t mode_count() const noexcept { return cutoffs.size(); }
  Sector sector(std::size_t mode) const;
  /// Basis states kept in one mode after the sector restriction.
  std::size_t states(std::size_t mode) const;
  /// Product of states(); ResourceError on size_t overflow.
  std::size_t dimension() const;
  /// "50x50"; restricted modes carry a suffix, e.g. "50e x 50" -> "50ex50".
  std::string label() const;

  bool operator==(const Truncation&) const = default;
};

/// `modes` copies of cutoff n.
Truncation uniform_truncation(std::size_t modes, std::size_t n);
/// Parses "50x50", "50,50" or "64".
Truncation parse_truncation(std::string_view text);

/// Symmetric banded matrix. bands[off][t] is the entry at (t, t+off) for
/// off >= 0 and at (t-off, t) for off < 0, so bands[off] == bands[-off].
struct BandedOperator {
  std::size_t dim = 0;
  std::map<std::ptrdiff_t, std::vector<cplx>> bands;

  cplx at(std::size_t i, std::size_t j) const;
  DenseMatrix to_dense() const;
};

enum class OperatorKind { position_power, momentum_squared };

/// sqrt(4 kinetic quad): level spacing of kinetic p^2 + quad x^2.
double mode_frequency(double quad_coeff, double kinetic_coeff);

/// Oscillator-basis matrix of x^k or p^2 with x = (a + a^H)/sqrt(2 omega),
/// p = i sqrt(omega/2)(a^H - a). x^k is multiplied out at size N+k and
/// cropped, so every returned entry is exact.
BandedOperator single_mode_matrix(OperatorKind kind, int power, std::size_t n, double omega);

/// <j|x|k> for the normalized Dirichlet sine basis on [-L, L], k = 1..n.
BandedOperator box_position_matrix(std::size_t n, double half_width);
/// <m|cos theta|n> for the normalized sin(n theta) basis, n = 1..n.
BandedOperator fourier_cosine_matrix(std::size_t n);

struct AssembleOptions {
  std::size_t max_dim = std::size_t{1} << 24;
  /// Row-range workers; output does not depend on this.
  unsigned threads = 1;
};

/// Truncated Hamiltonian in the tensor-product basis, flat index
/// sum_i m_i prod_{j>i} states(j), with the coupling term scaled by g.
SparseMatrix assemble_sparse(const HamiltonianSpec& spec, const Truncation& trunc, double g,
                             const AssembleOptions& opts = {});

/// One-mode trigonometric models (fourier-sine-periodic or sine-box basis).
SparseMatrix assemble_trig(const HamiltonianSpec& spec, std::size_t n, double g);

/// Matrix Market coordinate format, complex general.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);
SparseMatrix read_matrix_market(std::istream& is);

}  // namespace ptscan
