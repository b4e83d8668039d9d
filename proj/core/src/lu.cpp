// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ptscan/errors.hpp"
#include "ptscan/linalg.hpp"

namespace ptscan {
namespace {

constexpr double kPivotTol = 1e-14;

[[noreturn]] void singular_pivot(std::size_t k, cplx shift) {
  throw NumericError("LU: pivot " + std::to_string(k) + " is singular to tolerance for shift (" +
                         std::to_string(shift.real()) + ", " + std::to_string(shift.imag()) +
                         "); try a different shift",
                     static_cast<std::ptrdiff_t>(k));
}

}  // namespace

DenseLU::DenseLU(const DenseMatrix& a, cplx shift) : lu_(a), piv_(a.dim()) {
  if (a.rows() != a.cols()) throw DomainError("DenseLU: matrix is not square");
  const std::size_t n = a.dim();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lu_(i, i) -= shift;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(lu_(i, j)));
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv_[k] = p;
    if (best <= kPivotTol * scale) singular_pivot(k, shift);
    if (p != k) {
      auto rk = lu_.row(k);
      auto rp = lu_.row(p);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
    }
    const cplx inv = 1.0 / lu_(k, k);
    const auto rk = lu_.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = lu_.row(i);
      ri[k] *= inv;
      const cplx m = ri[k];
      if (m == cplx{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
    }
  }
}

void DenseLU::solve_in_place(std::span<cplx> b) const {
  const std::size_t n = lu_.dim();
  if (b.size() != n) throw DomainError("DenseLU::solve: length mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = lu_.row(i);
    cplx s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * b[j];
    b[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto ri = lu_.row(i);
    cplx s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= ri[j] * b[j];
    b[i] = s / ri[i];
  }
}

std::vector<cplx> DenseLU::solve(std::span<const cplx> b) const {
  std::vector<cplx> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

std::size_t BandedLU::storage_bytes(const SparseMatrix& a) {
  const std::size_t kl = a.lower_bandwidth();
  const std::size_t ku = a.upper_bandwidth();
  return a.dim * (2 * kl + ku + 1) * sizeof(cplx);
}

BandedLU::BandedLU(const SparseMatrix& a, cplx shift)
    : n_(a.dim),
      kl_(a.lower_bandwidth()),
      ku_(a.upper_bandwidth()),
      kv_(kl_ + ku_),
      ldab_(2 * kl_ + ku_ + 1),
      ab_(n_ * ldab_),
      piv_(n_) {
  double scale = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    bool has_diag = false;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const std::size_t j = a.col_idx[k];
      cplx v = a.values[k];
      if (j == i) {
        v -= shift;
        has_diag = true;
      }
      at(i, j) = v;
      scale = std::max(scale, std::abs(v));
    }
    if (!has_diag) {
      at(i, i) = -shift;
      scale = std::max(scale, std::abs(shift));
    }
  }

  // Unblocked gbtf2 with partial pivoting. `ju` tracks the last column
  // touched by row interchanges so far.
  std::size_t ju = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t km = std::min(kl_, n_ - 1 - j);
    std::size_t p = j;
    double best = std::abs(at(j, j));
    for (std::size_t i = j + 1; i <= j + km; ++i) {
      const double v = std::abs(at(i, j));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv_[j] = p;
    if (best <= kPivotTol * scale) singular_pivot(j, shift);
    ju = std::max(ju, std::min(p + ku_, n_ - 1));
    if (p != j) {
      for (std::size_t c = j; c <= ju; ++c) std::swap(at(p, c), at(j, c));
    }
    if (km == 0) continue;
    const cplx inv = 1.0 / at(j, j);
    for (std::size_t i = j + 1; i <= j + km; ++i) at(i, j) *= inv;
    for (std::size_t c = j + 1; c <= ju; ++c) {
      const cplx u = at(j, c);
      if (u == cplx{}) continue;
      // Column c of the band is contiguous in rows.
      cplx* col = &at(j + 1, c);
      const cplx* l = &at(j + 1, j);
      for (std::size_t r = 0; r < km; ++r) col[r] -= l[r] * u;
    }
  }
}

void BandedLU::solve_in_place(std::span<cplx> b) const {
  if (b.size() != n_) throw DomainError("BandedLU::solve: length mismatch");
  for (std::size_t j = 0; j + 1 < n_; ++j) {
    const std::size_t lm = std::min(kl_, n_ - 1 - j);
    if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
    const cplx bj = b[j];
    if (bj == cplx{}) continue;
    const cplx* l = &at(j + 1, j);
    for (std::size_t r = 0; r < lm; ++r) b[j + 1 + r] -= l[r] * bj;
  }
  // Column-oriented back substitution keeps band accesses contiguous.
  for (std::size_t j = n_; j-- > 0;) {
    b[j] /= at(j, j);
    const cplx bj = b[j];
    if (bj == cplx{}) continue;
    const std::size_t top = j > kv_ ? j - kv_ : 0;
    const cplx* u = &at(top, j);
    for (std::size_t i = top; i < j; ++i) b[i] -= u[i - top] * bj;
  }
}

std::vector<cplx> BandedLU::solve(std::span<const cplx> b) const {
  std::vector<cplx> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

std::vector<cplx> lu_solve(const DenseMatrix& a, cplx shift, std::span<const cplx> b) {
  return DenseLU(a, shift).solve(b);
}

std::vector<cplx> lu_solve(const SparseMatrix& a, cplx shift, std::span<const cplx> b,
                           LuBackend backend) {
  if (backend == LuBackend::dense) return DenseLU(DenseMatrix::from_sparse(a), shift).solve(b);
  return BandedLU(a, shift).solve(b);
}

}  // namespace ptscan
