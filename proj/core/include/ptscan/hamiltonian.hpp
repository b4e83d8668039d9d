// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ptscan {

using cplx = std::complex<double>;

/// Single-particle basis used to represent one coordinate.
enum class BasisKind {
  oscillator,    ///< harmonic-oscillator states |n>, n = 0..N-1
  fourier_sine,  ///< sin(n theta), n = 1..N, 2pi-periodic and odd
  sine_box,      ///< sin(k pi (x + L) / 2L), k = 1..N, Dirichlet on [-L, L]
};

/// One coordinate. The quadratic part contributed by a mode is
/// kinetic_coeff * p^2 + quad_coeff * x^2.
struct ModeSpec {
  std::size_t index = 0;
  double quad_coeff = 0.5;
  double kinetic_coeff = 0.5;
  BasisKind basis = BasisKind::oscillator;
  double half_width = 1.0;  // sine_box only

  bool operator==(const ModeSpec&) const = default;
};

enum class TermKind {
  position,  ///< c * prod_i x_i^{k_i}
  momentum,  ///< c * p_j^2
  cosine,    ///< c * cos(theta_j), native to the fourier_sine basis
};

/// One interaction term. Position and momentum factors never mix.
struct MonomialTerm {
  TermKind kind = TermKind::position;
  cplx coefficient = 0.0;
  std::vector<int> exponents;  // position: one exponent per mode
  std::size_t mode = 0;        // momentum / cosine: the mode acted on

  int total_degree() const;

  bool operator==(const MonomialTerm&) const = default;
};

/// Polynomial Hamiltonian sum_i (kappa_i p_i^2 + alpha_i x_i^2) + sum terms,
/// where the term at `coupling_term` is multiplied by the scan parameter g.
struct HamiltonianSpec {
  std::string name;
  std::vector<ModeSpec> modes;
  std::vector<MonomialTerm> terms;
  std::size_t coupling_term = 0;
  /// Value of g at which the preset describes the model without a scan
  /// (1 for p^2 + x^2 + ix^3, 0 for the coupled oscillators).
  double default_coupling = 0.0;

  std::size_t mode_count() const noexcept { return modes.size(); }
  bool is_trigonometric() const;

  bool operator==(const HamiltonianSpec&) const = default;
};

/// Throws DomainError when the spec is structurally inconsistent (exponent
/// slot count, mode indices, basis constraints, coupling index).
void check_well_formed(const HamiltonianSpec& spec);

/// Names of the built-in models: E1, E2, E3, E4, E10, E11, E12.
std::vector<std::string> preset_names();

/// Built-in model by name; NotFoundError for unknown names.
HamiltonianSpec preset(std::string_view name);

/// PT-validity of the term structure: even-degree position monomials carry
/// real coefficients, odd-degree ones purely imaginary coefficients, p^2
/// coefficients are real and the basis-native cosine is odd under the
/// reflection theta -> pi - theta (imaginary coefficient).
bool validate_pt(const HamiltonianSpec& spec);

/// Mode that maps g -> -g when reflected, for specs whose coupling term
/// is the only term odd in that mode. Returns mode_count() when none.
std::size_t sign_flip_mode(const HamiltonianSpec& spec);

std::string to_json(const HamiltonianSpec& spec, int indent = 2);
HamiltonianSpec spec_from_json(std::string_view text);

// The 2x2 model [[r e^{i theta}, s], [s, r e^{-i theta}]].
struct TwoByTwoSpec {
  double r = 1.0;
  double s = 1.0;
  double theta = 0.0;
};

/// Row-major entries of the 2x2 matrix.
std::array<cplx, 4> two_by_two_entries(const TwoByTwoSpec& spec);

/// E+- = r cos(theta) +- sqrt(s^2 - r^2 sin^2(theta)), principal branch.
std::pair<cplx, cplx> eigs_2x2(const TwoByTwoSpec& spec);

/// s^2 >= r^2 sin^2(theta).
bool two_by_two_unbroken(const TwoByTwoSpec& spec);

std::string_view to_string(BasisKind kind);
std::string_view to_string(TermKind kind);

}  // namespace ptscan
