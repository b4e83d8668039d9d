// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

// Complex plane rotations shared by the QR kernels (private header).

#pragma once

#include <cmath>

#include "ptscan/linalg.hpp"

namespace ptscan::detail {

inline double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

// G = [[c, s], [-conj(s), c]] with real c, G [x; y] = [r; 0].
struct Givens {
  double c = 1.0;
  cplx s = 0.0;
  cplx r = 0.0;
};

inline Givens make_givens(cplx x, cplx y) {
  Givens g;
  if (y == cplx{}) {
    g.r = x;
    return g;
  }
  if (x == cplx{}) {
    const double ay = std::abs(y);
    g.c = 0.0;
    g.s = std::conj(y) / ay;
    g.r = ay;
    return g;
  }
  const double ax = std::abs(x);
  const double rho = std::hypot(ax, std::abs(y));
  const cplx phase = x / ax;
  g.c = ax / rho;
  g.s = phase * std::conj(y) / rho;
  g.r = phase * rho;
  return g;
}

// Rows k, k+1 <- G * rows, columns [j0, j1).
inline void rotate_rows(DenseMatrix& m, const Givens& g, std::size_t k, std::size_t j0, std::size_t j1) {
  for (std::size_t j = j0; j < j1; ++j) {
    const cplx a = m(k, j);
    const cplx b = m(k + 1, j);
    m(k, j) = g.c * a + g.s * b;
    m(k + 1, j) = -std::conj(g.s) * a + g.c * b;
  }
}

// Columns k, k+1 <- columns * G^H, rows [i0, i1).
inline void rotate_cols(DenseMatrix& m, const Givens& g, std::size_t k, std::size_t i0, std::size_t i1) {
  for (std::size_t i = i0; i < i1; ++i) {
    const cplx a = m(i, k);
    const cplx b = m(i, k + 1);
    m(i, k) = g.c * a + std::conj(g.s) * b;
    m(i, k + 1) = -g.s * a + g.c * b;
  }
}

}  // namespace ptscan::detail
