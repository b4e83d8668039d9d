// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

// Dense complex eigenvalue kernels: Householder Hessenberg reduction and a
// single-shift QR iteration in the style of LAPACK's zlahqr.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ptscan/errors.hpp"
#include "ptscan/linalg.hpp"
#include "givens.hpp"

namespace ptscan {
namespace {

using detail::abs1;
using detail::Givens;
using detail::make_givens;
using detail::rotate_cols;
using detail::rotate_rows;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Core QR iteration on an upper Hessenberg matrix. With want_schur the full
// triangular form is produced and rotations are accumulated into z;
// otherwise only the active window is updated and 2x2 windows are finished
// in closed form.
std::vector<cplx> hqr(DenseMatrix& h, DenseMatrix* z, bool want_schur,
                      const DenseEigenOptions& opts) {
  const std::size_t n = h.dim();
  std::vector<cplx> w(n);
  if (n == 0) return w;

  double hnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) hnorm = std::max(hnorm, abs1(h(i, j)));
  }
  const double small = std::numeric_limits<double>::min() * static_cast<double>(n) / kEps;

  std::ptrdiff_t ihi = static_cast<std::ptrdiff_t>(n) - 1;
  std::size_t its = 0;
  while (ihi >= 0) {
    const auto hi = static_cast<std::size_t>(ihi);
    // Find the start of the unreduced block ending at hi.
    std::size_t l = hi;
    while (l > 0) {
      const double sub = abs1(h(l, l - 1));
      if (sub <= small) break;
      double tst = abs1(h(l - 1, l - 1)) + abs1(h(l, l));
      if (tst == 0.0) tst = hnorm;
      if (sub <= kEps * tst) break;
      --l;
    }
    if (l > 0) h(l, l - 1) = 0.0;

    if (l == hi) {
      w[hi] = h(hi, hi);
      --ihi;
      its = 0;
      continue;
    }
    if (!want_schur && l + 1 == hi) {
      const auto [e1, e2] = eigenvalues_2x2(h(l, l), h(l, hi), h(hi, l), h(hi, hi));
      w[l] = e1;
      w[hi] = e2;
      ihi -= 2;
      its = 0;
      continue;
    }
    if (its >= opts.max_sweeps_per_eigenvalue) {
      throw NumericError("QR iteration failed to converge for eigenvalue " + std::to_string(hi),
                         static_cast<std::ptrdiff_t>(hi));
    }

    cplx shift;
    if (its > 0 && its % 10 == 0) {
      // Exceptional shift.
      shift = h(hi, hi) + 0.75 * abs1(h(hi, hi - 1));
    } else {
      const auto [e1, e2] = eigenvalues_2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      shift = std::abs(e1 - h(hi, hi)) <= std::abs(e2 - h(hi, hi)) ? e1 : e2;
    }

    const std::size_t col_end = want_schur ? n : hi + 1;
    const std::size_t row_begin = want_schur ? 0 : l;
    for (std::size_t k = l; k < hi; ++k) {
      cplx x;
      cplx y;
      if (k == l) {
        x = h(l, l) - shift;
        y = h(l + 1, l);
      } else {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const Givens g = make_givens(x, y);
      if (k > l) {
        h(k, k - 1) = g.r;
        h(k + 1, k - 1) = 0.0;
      }
      rotate_rows(h, g, k, k > l ? k : l, col_end);
      rotate_cols(h, g, k, row_begin, std::min(k + 3, hi + 1));
      if (z != nullptr) rotate_cols(*z, g, k, 0, n);
    }
    ++its;
  }
  return w;
}

}  // namespace

std::pair<cplx, cplx> eigenvalues_2x2(cplx a, cplx b, cplx c, cplx d) {
  const cplx mean = (a + d) / 2.0;
  const cplx half = (a - d) / 2.0;
  const cplx root = std::sqrt(half * half + b * c);
  return {mean + root, mean - root};
}

void hessenberg_reduce(DenseMatrix& a, DenseMatrix* q) {
  const std::size_t n = a.dim();
  if (q != nullptr) *q = DenseMatrix::identity(n);
  std::vector<cplx> v(n);
  std::vector<cplx> work(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    // Householder reflector annihilating a(k+2:n, k).
    double alpha_norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha_norm += std::norm(a(i, k));
    alpha_norm = std::sqrt(alpha_norm);
    double tail = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) tail += std::norm(a(i, k));
    if (tail == 0.0) continue;

    const cplx x0 = a(k + 1, k);
    const cplx phase = (x0 == cplx{}) ? cplx{1.0} : x0 / std::abs(x0);
    const cplx beta = -phase * alpha_norm;
    std::fill(v.begin(), v.end(), cplx{});
    v[k + 1] = x0 - beta;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    const double tau = 2.0 / vnorm2;

    // A <- (I - tau v v^H) A, row-wise to stay contiguous.
    std::fill(work.begin(), work.end(), cplx{});
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx vi = std::conj(v[i]);
      const auto row = a.row(i);
      for (std::size_t j = k; j < n; ++j) work[j] += vi * row[j];
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx vi = tau * v[i];
      auto row = a.row(i);
      for (std::size_t j = k; j < n; ++j) row[j] -= vi * work[j];
    }
    // A <- A (I - tau v v^H)
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= tau;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
    }
    if (q != nullptr) {
      for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) s += (*q)(i, j) * v[j];
        s *= tau;
        for (std::size_t j = k + 1; j < n; ++j) (*q)(i, j) -= s * std::conj(v[j]);
      }
    }
    a(k + 1, k) = beta;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

std::vector<cplx> dense_eigenvalues(DenseMatrix a, const DenseEigenOptions& opts) {
  if (a.rows() != a.cols()) throw DomainError("dense_eigenvalues: matrix is not square");
  if (a.dim() > opts.max_dim) {
    throw ResourceError("dense_eigenvalues: dimension " + std::to_string(a.dim()) +
                        " exceeds cap " + std::to_string(opts.max_dim));
  }
  hessenberg_reduce(a);
  return hqr(a, nullptr, false, opts);
}

SchurForm hessenberg_schur(DenseMatrix h, const DenseEigenOptions& opts) {
  if (h.rows() != h.cols()) throw DomainError("hessenberg_schur: matrix is not square");
  SchurForm out;
  out.z = DenseMatrix::identity(h.dim());
  out.eigenvalues = hqr(h, &out.z, true, opts);
  out.t = std::move(h);
  return out;
}

DenseMatrix triangular_eigenvectors(const DenseMatrix& t) {
  const std::size_t n = t.dim();
  DenseMatrix x(n);
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) tnorm = std::max(tnorm, abs1(t(i, j)));
  }
  const double smin = std::max(kEps * tnorm, std::numeric_limits<double>::min());
  std::vector<cplx> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx lambda = t(k, k);
    std::fill(y.begin(), y.end(), cplx{});
    y[k] = 1.0;
    for (std::size_t jj = k; jj-- > 0;) {
      cplx s = 0.0;
      for (std::size_t m = jj + 1; m <= k; ++m) s += t(jj, m) * y[m];
      cplx denom = t(jj, jj) - lambda;
      if (abs1(denom) < smin) denom = smin;
      y[jj] = -s / denom;
    }
    const double nrm = norm2(std::span<const cplx>(y.data(), k + 1));
    for (std::size_t i = 0; i <= k; ++i) x(i, k) = y[i] / nrm;
  }
  return x;
}

}  // namespace ptscan
