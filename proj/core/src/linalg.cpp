// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptscan/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptscan/errors.hpp"

namespace ptscan {

double SparseMatrix::density() const noexcept {
  if (dim == 0) return 0.0;
  return static_cast<double>(nnz()) / (static_cast<double>(dim) * static_cast<double>(dim));
}

void SparseMatrix::validate() const {
  if (row_ptr.size() != dim + 1 || row_ptr.front() != 0) {
    throw DomainError("CSR row_ptr must have dim+1 entries starting at 0");
  }
  if (row_ptr.back() != col_idx.size() || col_idx.size() != values.size()) {
    throw DomainError("CSR row_ptr/col_idx/values sizes disagree");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw DomainError("CSR row_ptr not monotone");
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] >= dim) throw DomainError("CSR column index out of range");
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1]) {
        throw DomainError("CSR columns not strictly increasing in row " + std::to_string(i));
      }
      if (values[k] == cplx{}) throw DomainError("CSR stores an explicit zero");
    }
  }
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t;
  t.dim = dim;
  t.row_ptr.assign(dim + 1, 0);
  for (std::size_t c : col_idx) ++t.row_ptr[c + 1];
  for (std::size_t i = 0; i < dim; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col_idx.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const std::size_t dst = next[col_idx[k]]++;
      t.col_idx[dst] = i;
      t.values[dst] = values[k];
    }
  }
  return t;
}

bool SparseMatrix::is_symmetric() const {
  const SparseMatrix t = transpose();
  return t.row_ptr == row_ptr && t.col_idx == col_idx && t.values == values;
}

bool SparseMatrix::is_hermitian() const {
  SparseMatrix t = transpose();
  for (auto& v : t.values) v = std::conj(v);
  return t.row_ptr == row_ptr && t.col_idx == col_idx && t.values == values;
}

cplx SparseMatrix::at(std::size_t row, std::size_t col) const {
  const auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[row]);
  const auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return {};
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

std::vector<cplx> SparseMatrix::diagonal() const {
  std::vector<cplx> d(dim);
  for (std::size_t i = 0; i < dim; ++i) d[i] = at(i, i);
  return d;
}

std::size_t SparseMatrix::lower_bandwidth() const {
  std::size_t kl = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (row_ptr[i] != row_ptr[i + 1] && col_idx[row_ptr[i]] < i) {
      kl = std::max(kl, i - col_idx[row_ptr[i]]);
    }
  }
  return kl;
}

std::size_t SparseMatrix::upper_bandwidth() const {
  std::size_t ku = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (row_ptr[i] != row_ptr[i + 1] && col_idx[row_ptr[i + 1] - 1] > i) {
      ku = std::max(ku, col_idx[row_ptr[i + 1] - 1] - i);
    }
  }
  return ku;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m;
  m.dim = n;
  m.row_ptr.resize(n + 1);
  m.col_idx.resize(n);
  m.values.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.row_ptr[i + 1] = i + 1;
    m.col_idx[i] = i;
  }
  return m;
}

SparseBuilder::SparseBuilder(std::size_t dim) : dim_(dim) { out_.dim = dim; }

void SparseBuilder::add(std::size_t col, cplx value) {
  if (col >= dim_) throw DomainError("SparseBuilder: column out of range");
  pending_.emplace_back(col, value);
}

void SparseBuilder::finish_row() {
  if (out_.row_ptr.size() > dim_) throw DomainError("SparseBuilder: too many rows");
  std::stable_sort(pending_.begin(), pending_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < pending_.size();) {
    const std::size_t col = pending_[k].first;
    cplx sum = 0.0;
    for (; k < pending_.size() && pending_[k].first == col; ++k) sum += pending_[k].second;
    if (sum != cplx{}) {
      out_.col_idx.push_back(col);
      out_.values.push_back(sum);
    }
  }
  pending_.clear();
  out_.row_ptr.push_back(out_.col_idx.size());
}

SparseMatrix SparseBuilder::build() && {
  if (out_.row_ptr.size() != dim_ + 1) throw DomainError("SparseBuilder: unfinished rows");
  return std::move(out_);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& a) {
  DenseMatrix m(a.dim);
  for (std::size_t i = 0; i < a.dim; ++i) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) m(i, a.col_idx[k]) = a.values[k];
  }
  return m;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matrix product: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

void matvec(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
  if (x.size() != a.dim || y.size() != a.dim) {
    throw DomainError("matvec: vector length " + std::to_string(x.size()) +
                      " does not match dimension " + std::to_string(a.dim));
  }
  for (std::size_t i = 0; i < a.dim; ++i) {
    cplx s = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
    y[i] = s;
  }
}

std::vector<cplx> matvec(const SparseMatrix& a, std::span<const cplx> x) {
  std::vector<cplx> y(a.dim);
  matvec(a, x, y);
  return y;
}

std::vector<cplx> matvec(const DenseMatrix& a, std::span<const cplx> x) {
  if (x.size() != a.cols()) throw DomainError("matvec: vector length does not match");
  std::vector<cplx> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double norm2(std::span<const cplx> v) {
  // Scaled accumulation avoids overflow for badly scaled residual vectors.
  double scale = 0.0;
  double ssq = 1.0;
  for (const auto& z : v) {
    for (double part : {z.real(), z.imag()}) {
      if (part == 0.0) continue;
      const double a = std::abs(part);
      if (scale < a) {
        ssq = 1.0 + ssq * (scale / a) * (scale / a);
        scale = a;
      } else {
        ssq += (a / scale) * (a / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

}  // namespace ptscan
