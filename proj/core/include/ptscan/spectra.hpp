// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptscan/assemble.hpp"
#include "ptscan/hamiltonian.hpp"

namespace ptscan {

struct Eigenvalue {
  cplx value;
  double residual = 0.0;
};

enum class SolverBackend { automatic, dense, arnoldi };
std::string_view to_string(SolverBackend b);
SolverBackend backend_from_string(std::string_view s);

/// Eigenvalues of one truncation at one g, real parts <= window, sorted by
/// (real, imaginary).
struct Spectrum {
  std::string model;
  double g = 0.0;
  Truncation truncation;
  std::vector<Eigenvalue> eigenvalues;
  double window = std::numeric_limits<double>::infinity();
  /// "dense", "diagonal", "arnoldi-shift-invert" or "arnoldi-direct".
  std::string backend;
  /// The Krylov solver stopped before every requested value converged.
  bool partial = false;
};

struct SolveOptions {
  /// Keep eigenvalues with real part <= window.
  double window = std::numeric_limits<double>::infinity();
  /// Requested eigenvalue count for the Krylov backend; 0 derives it from
  /// the window. Ignored by the dense backend.
  std::size_t nev = 0;
  SolverBackend backend = SolverBackend::automatic;
  /// Dimensions up to this use the dense oracle under `automatic`.
  std::size_t dense_threshold = 600;
  /// Banded factorizations larger than this fall back to direct iteration.
  std::size_t band_bytes_cap = std::size_t{1} << 30;
  double tol = 1e-11;
  std::size_t max_restarts = 2000;
  std::uint64_t seed = 0x5eed2026;
  unsigned assemble_threads = 1;
};

/// Assembles and solves one truncation.
Spectrum compute_spectrum(const HamiltonianSpec& spec, const Truncation& trunc, double g,
                          const SolveOptions& opts = {});
/// Solves an already assembled matrix; `model`, `g` and `trunc` are labels.
Spectrum solve_matrix(const SparseMatrix& a, const SolveOptions& opts);

struct ConvergedLevel {
  cplx value;
  /// |lambda_last - lambda_prev| / (1 + |lambda_last|) over the final rung.
  double rel_change = 0.0;
  double residual = 0.0;
  std::vector<Truncation> ladder;

  bool is_complex(double imag_threshold = 1e-6) const { return std::abs(value.imag()) > imag_threshold; }
};

struct LadderOptions {
  double threshold = 1e-6;
  /// Greedy nearest matching refuses links longer than this.
  double match_cap = 0.1;
};

/// Chains eigenvalues through increasing truncations and keeps the chains
/// present in every rung whose final relative change is below threshold.
/// Needs at least two rungs with the same model and g.
std::vector<ConvergedLevel> ladder_filter(std::span<const Spectrum> rungs, const LadderOptions& opts = {});

/// Single-rung pass-through: every level with rel_change 0.
std::vector<ConvergedLevel> unfiltered_levels(const Spectrum& s);

struct Classification {
  std::vector<ConvergedLevel> real;
  std::vector<std::pair<ConvergedLevel, ConvergedLevel>> pairs;  // (Im > 0, Im < 0)
  std::vector<ConvergedLevel> unpaired;
  std::vector<std::string> warnings;

  std::size_t complex_count() const { return 2 * pairs.size() + unpaired.size(); }
};

Classification classify(std::span<const ConvergedLevel> levels, double imag_threshold = 1e-6,
                        double pair_tol = 1e-8);

/// Bisects a two-valued predicate until the bracket is narrower than
/// `width`; returns the midpoint. BracketError when the ends agree.
double bisect_transition(const std::function<bool(double)>& broken, double lo, double hi,
                         double width = 1e-3);

/// Levels [first, first + count) of a spectrum sorted by real part.
struct LevelSelector {
  std::size_t first = 0;
  std::size_t count = 2;
};

/// True when any selected level has |Im| > imag_threshold.
bool selection_is_complex(const Spectrum& s, const LevelSelector& sel, double imag_threshold = 1e-6);

/// Exceptional point in g between lo (selection real) and hi (selection
/// complex), or vice versa, at a fixed truncation.
double exceptional_point(const HamiltonianSpec& spec, const LevelSelector& sel, double lo, double hi,
                         const Truncation& trunc, const SolveOptions& opts = {}, double width = 1e-3,
                         double imag_threshold = 1e-6);

}  // namespace ptscan
