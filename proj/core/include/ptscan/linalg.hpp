// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ptscan {

using cplx = std::complex<double>;

/// Compressed sparse row complex matrix.
///
/// Invariants: row_ptr has dim+1 monotone entries, column indices are
/// strictly increasing within a row and no explicit zeros are stored.
struct SparseMatrix {
  std::size_t dim = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<cplx> values;

  std::size_t nnz() const noexcept { return values.size(); }
  double density() const noexcept;

  /// Throws DomainError when a structural invariant is violated.
  void validate() const;

  SparseMatrix transpose() const;
  /// Exact equality with the transpose (complex symmetric).
  bool is_symmetric() const;
  /// Exact equality with the conjugate transpose.
  bool is_hermitian() const;

  /// Entry lookup by binary search; zero when not stored.
  cplx at(std::size_t row, std::size_t col) const;
  std::vector<cplx> diagonal() const;

  /// Lower / upper bandwidth (max i-j and max j-i over stored entries).
  std::size_t lower_bandwidth() const;
  std::size_t upper_bandwidth() const;

  static SparseMatrix identity(std::size_t n);
};

/// Builds CSR row by row. Entries within a row may arrive in any order;
/// duplicates are summed in arrival order and exact zeros are dropped.
class SparseBuilder {
 public:
  explicit SparseBuilder(std::size_t dim);

  void add(std::size_t col, cplx value);
  /// Closes the current row; rows must be finished in order.
  void finish_row();
  SparseMatrix build() &&;

 private:
  std::size_t dim_;
  std::vector<std::pair<std::size_t, cplx>> pending_;
  SparseMatrix out_;
};

/// Row-major dense complex matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  explicit DenseMatrix(std::size_t dim) : DenseMatrix(dim, dim) {}

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_sparse(const SparseMatrix& a);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  /// Square dimension; rows() for square matrices.
  std::size_t dim() const noexcept { return rows_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

/// y = A x. Summation runs in ascending column order within each row.
void matvec(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y);
std::vector<cplx> matvec(const SparseMatrix& a, std::span<const cplx> x);
std::vector<cplx> matvec(const DenseMatrix& a, std::span<const cplx> x);

double norm2(std::span<const cplx> v);
cplx dot(std::span<const cplx> x, std::span<const cplx> y);  // x^H y

struct DenseEigenOptions {
  std::size_t max_dim = 4096;
  /// QR sweeps allowed per eigenvalue before giving up.
  std::size_t max_sweeps_per_eigenvalue = 60;
};

/// All eigenvalues of a square matrix: Householder reduction to upper
/// Hessenberg form followed by single-shift complex QR with Wilkinson
/// shifts. Order follows deflation (bottom of the matrix first).
std::vector<cplx> dense_eigenvalues(DenseMatrix a, const DenseEigenOptions& opts = {});

/// Reduces `a` to upper Hessenberg form in place; accumulates the unitary
/// similarity into `q` when non-null (a_in = q * a_out * q^H).
void hessenberg_reduce(DenseMatrix& a, DenseMatrix* q = nullptr);

/// Complex Schur form T = Z^H H Z of an upper Hessenberg matrix.
struct SchurForm {
  DenseMatrix t;
  DenseMatrix z;
  std::vector<cplx> eigenvalues;  // diagonal of t
};
SchurForm hessenberg_schur(DenseMatrix h, const DenseEigenOptions& opts = {});

/// Unit-norm eigenvectors of an upper triangular matrix (columns of the
/// returned matrix), by back substitution.
DenseMatrix triangular_eigenvectors(const DenseMatrix& t);

/// Eigenvalues of [[a, b], [c, d]] as mean +/- sqrt(((a-d)/2)^2 + bc).
std::pair<cplx, cplx> eigenvalues_2x2(cplx a, cplx b, cplx c, cplx d);

/// Partial-pivot LU of (A - shift I), dense storage.
class DenseLU {
 public:
  DenseLU(const DenseMatrix& a, cplx shift = 0.0);

  void solve_in_place(std::span<cplx> b) const;
  std::vector<cplx> solve(std::span<const cplx> b) const;
  std::size_t dim() const noexcept { return lu_.dim(); }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> piv_;
};

/// Partial-pivot LU of (A - shift I) restricted to the bandwidth of A
/// (LAPACK gbtrf layout, lower bandwidth kl, upper kl + ku after fill).
class BandedLU {
 public:
  BandedLU(const SparseMatrix& a, cplx shift = 0.0);

  void solve_in_place(std::span<cplx> b) const;
  std::vector<cplx> solve(std::span<const cplx> b) const;
  std::size_t dim() const noexcept { return n_; }
  std::size_t lower_bandwidth() const noexcept { return kl_; }
  std::size_t upper_bandwidth() const noexcept { return ku_; }

  /// Bytes needed to factor `a`; used to decide between shift-invert and
  /// direct iteration.
  static std::size_t storage_bytes(const SparseMatrix& a);

 private:
  cplx& at(std::size_t i, std::size_t j) { return ab_[j * ldab_ + kv_ + i - j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return ab_[j * ldab_ + kv_ + i - j]; }

  std::size_t n_ = 0;
  std::size_t kl_ = 0;
  std::size_t ku_ = 0;
  std::size_t kv_ = 0;
  std::size_t ldab_ = 0;
  std::vector<cplx> ab_;
  std::vector<std::size_t> piv_;
};

enum class LuBackend { dense, banded };

/// Solves (A - shift I) x = b.
std::vector<cplx> lu_solve(const DenseMatrix& a, cplx shift, std::span<const cplx> b);
std::vector<cplx> lu_solve(const SparseMatrix& a, cplx shift, std::span<const cplx> b,
                           LuBackend backend = LuBackend::banded);

}  // namespace ptscan
