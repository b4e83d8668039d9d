// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ptscan/errors.hpp"
#include "ptscan/linalg.hpp"

namespace ptscan {

/// y = Op(x). The callback must not retain the spans.
struct LinearOperator {
  std::size_t dim = 0;
  std::function<void(std::span<const cplx>, std::span<cplx>)> apply;
};

/// Wraps a CSR matrix; the matrix must outlive the operator.
LinearOperator make_operator(const SparseMatrix& a);
LinearOperator make_operator(const DenseMatrix& a);
/// (A - sigma I)^{-1} through a factorization that must outlive the operator.
LinearOperator make_inverse_operator(const BandedLU& lu);
LinearOperator make_inverse_operator(const DenseLU& lu);

enum class Which { smallest_real, smallest_magnitude, largest_magnitude, nearest_shift };
enum class SpectralMode { direct, shift_invert };

struct EigsConfig {
  std::size_t k = 6;
  Which which = Which::smallest_real;
  /// Subspace dimension; 0 picks min(n, max(2k + 1, k + 20)).
  std::size_t ncv = 0;
  double tol = 1e-10;
  std::size_t max_restarts = 1000;
  SpectralMode mode = SpectralMode::direct;
  cplx sigma = 0.0;
  std::uint64_t seed = 0x5eed2026;
  bool want_vectors = false;
};

struct RitzPair {
  cplx value;
  /// ||A x - lambda x|| / |lambda| for unit x.
  double residual = 0.0;
  std::vector<cplx> vector;
};

struct EigsStats {
  std::size_t restarts = 0;
  std::size_t applications = 0;
  std::size_t breakdowns = 0;
};

/// Thrown when max_restarts is exhausted; carries what did converge.
class PartialResultError : public NumericError {
 public:
  PartialResultError(const std::string& what, std::vector<RitzPair> converged)
      : NumericError(what), converged_(std::move(converged)) {}
  const std::vector<RitzPair>& converged() const noexcept { return converged_; }

 private:
  std::vector<RitzPair> converged_;
};

/// A V_m = V_{m+1} H, with V stored column-major (n x capacity+1) and H
/// (capacity+1) x capacity; only the leading m columns are live.
struct KrylovFactorization {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t capacity = 0;
  std::vector<cplx> v;
  DenseMatrix h;

  KrylovFactorization() = default;
  KrylovFactorization(std::size_t n, std::size_t capacity);

  std::span<cplx> column(std::size_t j) { return {v.data() + j * n, n}; }
  std::span<const cplx> column(std::size_t j) const { return {v.data() + j * n, n}; }
  /// H(m, m-1), the norm of the residual direction.
  double beta() const { return m == 0 ? 0.0 : std::abs(h(m, m - 1)); }
};

/// Seeded start: fills column 0 with a normalized pseudo-random vector.
void arnoldi_start(KrylovFactorization& fact, std::mt19937_64& rng);
/// Uses `v0` (normalized internally) as the start vector.
void arnoldi_start(KrylovFactorization& fact, std::span<const cplx> v0);

/// Extends the factorization by one column with classical Gram-Schmidt and
/// DGKS reorthogonalization. On breakdown H(m, m-1) is zero and the new
/// column is a fresh random vector orthogonal to the basis. Returns false
/// on breakdown.
bool arnoldi_step(KrylovFactorization& fact, const LinearOperator& op, std::mt19937_64& rng);

/// Applies the shifts as implicit single-shift QR sweeps and compresses the
/// factorization to `keep` columns. keep + shifts.size() must equal m.
void implicit_restart(KrylovFactorization& fact, std::span<const cplx> shifts, std::size_t keep);

/// Implicitly restarted Arnoldi. In shift-invert mode `op` must apply
/// (A - sigma I)^{-1}; Ritz values are mapped back as sigma + 1/mu and, when
/// `original` is given, residuals are recomputed against it.
std::vector<RitzPair> eigs(const LinearOperator& op, const EigsConfig& config,
                           const LinearOperator* original = nullptr, EigsStats* stats = nullptr);

/// Orders values by the selection criterion (ties by imaginary part).
void sort_by(std::vector<cplx>& values, Which which, cplx sigma = 0.0);

}  // namespace ptscan
