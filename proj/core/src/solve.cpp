// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ptscan/arnoldi.hpp"
#include "ptscan/errors.hpp"
#include "ptscan/spectra.hpp"

namespace ptscan {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kDenseCap = 4096;
constexpr int kMaxAttempts = 5;

void finish(Spectrum& s, double window) {
  std::erase_if(s.eigenvalues, [window](const Eigenvalue& e) { return e.value.real() > window; });
  std::stable_sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  s.window = window;
}

bool is_diagonal(const SparseMatrix& a) {
  for (std::size_t i = 0; i < a.dim; ++i) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      if (a.col_idx[k] != i) return false;
    }
  }
  return true;
}

Spectrum solve_dense(const SparseMatrix& a) {
  const DenseMatrix d = DenseMatrix::from_sparse(a);
  const double fro = d.frobenius_norm();
  Spectrum s;
  s.backend = "dense";
  // Backward-stable QR: report the a priori bound eps ||A||_F / |lambda|.
  for (const cplx v : dense_eigenvalues(d)) {
    s.eigenvalues.push_back({v, kEps * fro / std::max(std::abs(v), std::numeric_limits<double>::min())});
  }
  return s;
}

std::size_t window_count(const SparseMatrix& a, double window) {
  const double margin = std::max(2.0, 0.15 * std::abs(window));
  std::size_t count = 0;
  for (const cplx d : a.diagonal()) count += d.real() < window + margin ? 1 : 0;
  return count + 4;
}

}  // namespace

Spectrum solve_matrix(const SparseMatrix& a, const SolveOptions& opts) {
  const std::size_t n = a.dim;
  if (n == 0) throw DomainError("solve: empty matrix");
  const bool windowed = std::isfinite(opts.window);

  if (is_diagonal(a) && opts.backend != SolverBackend::arnoldi) {
    Spectrum s;
    s.backend = "diagonal";
    for (const cplx v : a.diagonal()) s.eigenvalues.push_back({v, 0.0});
    finish(s, opts.window);
    return s;
  }

  std::size_t nev = opts.nev;
  if (nev == 0) {
    if (!windowed && opts.backend != SolverBackend::dense && !(opts.backend == SolverBackend::automatic &&
                                                                n <= opts.dense_threshold)) {
      throw DomainError("solve: the Krylov backend needs a window or an eigenvalue count");
    }
    nev = windowed ? window_count(a, opts.window) : n;
  }

  auto dense_ok = [&] { return n <= kDenseCap; };
  bool use_dense = opts.backend == SolverBackend::dense ||
                   (opts.backend == SolverBackend::automatic && n <= opts.dense_threshold);
  if (!use_dense && 2 * nev + 20 > n) {
    if (opts.backend == SolverBackend::arnoldi || !dense_ok()) {
      nev = std::min(nev, (n - 2) / 2);
      if (nev == 0) throw DomainError("solve: matrix too small for the Krylov backend");
    } else {
      use_dense = true;
    }
  }
  if (use_dense) {
    Spectrum s = solve_dense(a);
    finish(s, opts.window);
    return s;
  }

  double sigma = std::numeric_limits<double>::infinity();
  for (const cplx d : a.diagonal()) sigma = std::min(sigma, d.real());
  sigma -= 0.5;
  const bool invert = BandedLU::storage_bytes(a) <= opts.band_bytes_cap;
  const LinearOperator original = make_operator(a);
  std::optional<BandedLU> lu;
  if (invert) lu.emplace(a, cplx{sigma});

  for (int attempt = 0;; ++attempt) {
    EigsConfig cfg;
    cfg.k = nev;
    cfg.tol = opts.tol;
    cfg.max_restarts = opts.max_restarts;
    cfg.seed = opts.seed;
    if (invert) {
      cfg.mode = SpectralMode::shift_invert;
      cfg.sigma = sigma;
      cfg.which = Which::nearest_shift;
      cfg.ncv = std::min(n, 2 * nev + 20);
    } else {
      cfg.which = Which::smallest_real;
      cfg.ncv = std::min(n, std::max(4 * nev, nev + 40));
    }

    Spectrum s;
    s.backend = invert ? "arnoldi-shift-invert" : "arnoldi-direct";
    std::vector<RitzPair> pairs;
    try {
      pairs = invert ? eigs(make_inverse_operator(*lu), cfg, &original) : eigs(original, cfg);
    } catch (const PartialResultError& e) {
      pairs = e.converged();
      s.partial = true;
    }
    for (const auto& p : pairs) s.eigenvalues.push_back({p.value, p.residual});

    bool covered = true;
    if (windowed && opts.nev == 0 && !s.partial) {
      double reach = 0.0;
      for (const auto& e : s.eigenvalues) {
        reach = std::max(reach, invert ? std::abs(e.value - sigma) : e.value.real() - sigma);
      }
      // The disk |lambda - sigma| <= reach must contain the window strip
      // with |Im| <= 1.
      covered = reach >= std::hypot(opts.window - sigma, invert ? 1.0 : 0.0);
    }
    if (covered || attempt + 1 >= kMaxAttempts) {
      finish(s, opts.window);
      return s;
    }
    const std::size_t grown = nev + nev / 2 + 10;
    if (2 * grown + 20 > n) {
      if (dense_ok()) {
        Spectrum d = solve_dense(a);
        finish(d, opts.window);
        return d;
      }
      finish(s, opts.window);
      return s;
    }
    nev = grown;
  }
}

Spectrum compute_spectrum(const HamiltonianSpec& spec, const Truncation& trunc, double g,
                          const SolveOptions& opts) {
  AssembleOptions ao;
  ao.threads = opts.assemble_threads;
  const SparseMatrix a = assemble_sparse(spec, trunc, g, ao);
  Spectrum s = solve_matrix(a, opts);
  s.model = spec.name;
  s.g = g;
  s.truncation = trunc;
  return s;
}

}  // namespace ptscan
