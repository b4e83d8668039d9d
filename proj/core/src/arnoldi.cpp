// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

// Implicitly restarted Arnoldi (Sorensen 1992; Lehoucq's ARPACK layout)
// for complex non-Hermitian operators.

#include "ptscan/arnoldi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "givens.hpp"

namespace ptscan {
namespace {

using detail::abs1;
using detail::make_givens;
using detail::rotate_cols;
using detail::rotate_rows;

constexpr double kEps = std::numeric_limits<double>::epsilon();
// DGKS threshold: reorthogonalize while a pass removes more than ~30%.
constexpr double kDgks = 0.717;
constexpr double kBreakdown = 1e-14;

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void scale(std::span<cplx> x, cplx a) {
  for (auto& v : x) v *= a;
}

// One classical Gram-Schmidt pass of w against columns [0, ncols);
// coefficients accumulate into h.
void cgs_pass(const KrylovFactorization& f, std::size_t ncols, std::span<cplx> w, std::vector<cplx>& h) {
  std::vector<cplx> c(ncols);
  for (std::size_t i = 0; i < ncols; ++i) c[i] = dot(f.column(i), w);
  for (std::size_t i = 0; i < ncols; ++i) {
    axpy(-c[i], f.column(i), w);
    h[i] += c[i];
  }
}

void fill_random(std::span<cplx> x, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x) {
    const double re = u(rng);
    const double im = u(rng);
    v = {re, im};
  }
}

// Random unit vector orthogonal to columns [0, ncols), or zero if the
// basis already spans the space.
void random_orthogonal(KrylovFactorization& f, std::size_t ncols, std::size_t target, std::mt19937_64& rng) {
  auto x = f.column(target);
  std::vector<cplx> h(ncols);
  if (ncols < f.n) {
    for (int attempt = 0; attempt < 5; ++attempt) {
      fill_random(x, rng);
      const double n0 = norm2(x);
      cgs_pass(f, ncols, x, h);
      cgs_pass(f, ncols, x, h);
      const double n1 = norm2(x);
      if (n1 > 1e-8 * n0) {
        scale(x, 1.0 / n1);
        return;
      }
    }
  }
  std::fill(x.begin(), x.end(), cplx{});
}

struct RitzData {
  std::vector<cplx> theta;
  DenseMatrix y;  // unit eigenvectors of H_m, by column
};

RitzData ritz(const KrylovFactorization& f) {
  const std::size_t m = f.m;
  DenseMatrix hm(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = (i == 0 ? 0 : i - 1); j < m; ++j) hm(i, j) = f.h(i, j);
  }
  SchurForm s = hessenberg_schur(std::move(hm));
  RitzData out;
  out.theta = s.eigenvalues;
  out.y = s.z * triangular_eigenvectors(s.t);
  return out;
}

// Strict weak order on one value: primary key per criterion, then real,
// then imaginary part.
bool precedes(cplx a, cplx b, Which which, cplx sigma) {
  double ka = 0.0;
  double kb = 0.0;
  switch (which) {
    case Which::smallest_real:
      ka = a.real();
      kb = b.real();
      break;
    case Which::smallest_magnitude:
      ka = std::abs(a);
      kb = std::abs(b);
      break;
    case Which::largest_magnitude:
      ka = -std::abs(a);
      kb = -std::abs(b);
      break;
    case Which::nearest_shift:
      ka = std::abs(a - sigma);
      kb = std::abs(b - sigma);
      break;
  }
  if (ka != kb) return ka < kb;
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

LinearOperator make_operator(const SparseMatrix& a) {
  return {a.dim, [&a](std::span<const cplx> x, std::span<cplx> y) { matvec(a, x, y); }};
}

LinearOperator make_operator(const DenseMatrix& a) {
  return {a.rows(), [&a](std::span<const cplx> x, std::span<cplx> y) {
            const auto r = matvec(a, x);
            std::copy(r.begin(), r.end(), y.begin());
          }};
}

LinearOperator make_inverse_operator(const BandedLU& lu) {
  return {lu.dim(), [&lu](std::span<const cplx> x, std::span<cplx> y) {
            std::copy(x.begin(), x.end(), y.begin());
            lu.solve_in_place(y);
          }};
}

LinearOperator make_inverse_operator(const DenseLU& lu) {
  return {lu.dim(), [&lu](std::span<const cplx> x, std::span<cplx> y) {
            std::copy(x.begin(), x.end(), y.begin());
            lu.solve_in_place(y);
          }};
}

KrylovFactorization::KrylovFactorization(std::size_t n_, std::size_t capacity_)
    : n(n_), m(0), capacity(capacity_), v(n_ * (capacity_ + 1)), h(capacity_ + 1, capacity_) {
  if (capacity_ == 0 || capacity_ > n_) {
    throw DomainError("KrylovFactorization: need 0 < capacity <= n");
  }
}

void arnoldi_start(KrylovFactorization& fact, std::mt19937_64& rng) {
  fact.m = 0;
  auto x = fact.column(0);
  fill_random(x, rng);
  scale(x, 1.0 / norm2(x));
}

void arnoldi_start(KrylovFactorization& fact, std::span<const cplx> v0) {
  if (v0.size() != fact.n) throw DomainError("arnoldi_start: length mismatch");
  const double nrm = norm2(v0);
  if (nrm == 0.0) throw DomainError("arnoldi_start: zero start vector");
  fact.m = 0;
  auto x = fact.column(0);
  for (std::size_t i = 0; i < fact.n; ++i) x[i] = v0[i] / nrm;
}

bool arnoldi_step(KrylovFactorization& fact, const LinearOperator& op, std::mt19937_64& rng) {
  const std::size_t j = fact.m;
  if (j >= fact.capacity) throw DomainError("arnoldi_step: factorization is full");
  if (op.dim != fact.n) throw DomainError("arnoldi_step: operator dimension mismatch");
  if (norm2(fact.column(j)) == 0.0) random_orthogonal(fact, j, j, rng);

  auto w = fact.column(j + 1);
  op.apply(fact.column(j), w);
  const double w0 = norm2(w);
  std::vector<cplx> h(j + 1);
  cgs_pass(fact, j + 1, w, h);
  double prev = w0;
  double cur = norm2(w);
  for (int pass = 1; pass < 3 && cur < kDgks * prev; ++pass) {
    cgs_pass(fact, j + 1, w, h);
    prev = cur;
    cur = norm2(w);
  }

  for (std::size_t i = 0; i <= j; ++i) fact.h(i, j) = h[i];
  for (std::size_t i = j + 2; i <= fact.capacity; ++i) fact.h(i, j) = 0.0;
  fact.m = j + 1;

  const bool broke = w0 == 0.0 || cur <= kBreakdown * w0 || cur < kDgks * prev;
  if (broke) {
    fact.h(j + 1, j) = 0.0;
    random_orthogonal(fact, j + 1, j + 1, rng);
    return false;
  }
  fact.h(j + 1, j) = cur;
  scale(w, 1.0 / cur);
  return true;
}

void implicit_restart(KrylovFactorization& fact, std::span<const cplx> shifts, std::size_t keep) {
  const std::size_t m = fact.m;
  if (keep + shifts.size() != m) throw DomainError("implicit_restart: keep + shifts must equal m");
  if (shifts.empty()) return;
  if (keep == 0) throw DomainError("implicit_restart: keep must be positive");

  DenseMatrix& h = fact.h;
  DenseMatrix q = DenseMatrix::identity(m);
  for (const cplx mu : shifts) {
    std::size_t istart = 0;
    while (istart < m) {
      // Unreduced block [istart, iend].
      std::size_t iend = istart;
      while (iend + 1 < m) {
        const double sub = abs1(h(iend + 1, iend));
        double tst = abs1(h(iend, iend)) + abs1(h(iend + 1, iend + 1));
        if (tst == 0.0) tst = 1.0;
        if (sub <= kEps * tst) {
          h(iend + 1, iend) = 0.0;
          break;
        }
        ++iend;
      }
      for (std::size_t k = istart; k < iend; ++k) {
        cplx x;
        cplx y;
        if (k == istart) {
          x = h(k, k) - mu;
          y = h(k + 1, k);
        } else {
          x = h(k, k - 1);
          y = h(k + 1, k - 1);
        }
        const auto g = make_givens(x, y);
        if (k > istart) {
          h(k, k - 1) = g.r;
          h(k + 1, k - 1) = 0.0;
        }
        rotate_rows(h, g, k, k, m);
        rotate_cols(h, g, k, 0, std::min(k + 3, iend + 1));
        rotate_cols(q, g, k, 0, m);
      }
      istart = iend + 1;
    }
  }

  // V_keep <- V_m Q(:, 0:keep), residual from column keep and the old tail.
  const std::size_t n = fact.n;
  std::vector<cplx> vq(n * (keep + 1), cplx{});
  for (std::size_t c = 0; c <= keep; ++c) {
    std::span<cplx> dst(vq.data() + c * n, n);
    for (std::size_t i = 0; i < m; ++i) {
      const cplx qic = q(i, c);
      if (qic != cplx{}) axpy(qic, fact.column(i), dst);
    }
  }
  const cplx beta_old = h(m, m - 1);
  std::vector<cplx> f(n);
  const cplx hk = h(keep, keep - 1);
  const cplx tail = beta_old * q(m - 1, keep - 1);
  const auto vm = fact.column(m);
  for (std::size_t i = 0; i < n; ++i) f[i] = vq[keep * n + i] * hk + vm[i] * tail;

  std::copy(vq.begin(), vq.begin() + static_cast<std::ptrdiff_t>(keep * n), fact.v.begin());
  const double beta = norm2(f);
  auto next = fact.column(keep);
  if (beta > 0.0) {
    for (std::size_t i = 0; i < n; ++i) next[i] = f[i] / beta;
  } else {
    std::fill(next.begin(), next.end(), cplx{});
  }
  for (std::size_t j = 0; j < keep; ++j) {
    for (std::size_t i = j + 2; i <= fact.capacity; ++i) h(i, j) = 0.0;
  }
  h(keep, keep - 1) = beta;
  fact.m = keep;
}

void sort_by(std::vector<cplx>& values, Which which, cplx sigma) {
  std::sort(values.begin(), values.end(),
            [which, sigma](cplx a, cplx b) { return precedes(a, b, which, sigma); });
}

std::vector<RitzPair> eigs(const LinearOperator& op, const EigsConfig& config,
                           const LinearOperator* original, EigsStats* stats) {
  const std::size_t n = op.dim;
  const std::size_t k = config.k;
  if (k == 0 || k >= n) {
    throw DomainError("eigs: need 0 < k < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  std::size_t ncv = config.ncv != 0 ? config.ncv : std::max(2 * k + 1, k + 20);
  ncv = std::min(ncv, n);
  if (ncv <= k) throw DomainError("eigs: subspace dimension must exceed k");
  if (!(config.tol > 0.0)) throw DomainError("eigs: tolerance must be positive");

  const bool invert = config.mode == SpectralMode::shift_invert;
  const Which inner = invert ? Which::largest_magnitude : config.which;
  const double eps23 = std::pow(kEps, 2.0 / 3.0);

  EigsStats local;
  EigsStats& st = stats != nullptr ? *stats : local;
  st = {};
  const LinearOperator counted{n, [&](std::span<const cplx> x, std::span<cplx> y) {
                                 ++st.applications;
                                 op.apply(x, y);
                               }};

  std::mt19937_64 rng(config.seed);
  KrylovFactorization fact(n, ncv);
  arnoldi_start(fact, rng);

  RitzData rd;
  std::vector<std::size_t> order;
  std::vector<double> estimate;
  std::vector<char> converged;
  std::size_t nconv = 0;
  for (;;) {
    while (fact.m < ncv) {
      if (!arnoldi_step(fact, counted, rng)) ++st.breakdowns;
    }
    rd = ritz(fact);
    const double beta = fact.beta();
    order.resize(ncv);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return precedes(rd.theta[a], rd.theta[b], inner, config.sigma);
    });
    estimate.assign(ncv, 0.0);
    converged.assign(ncv, 0);
    nconv = 0;
    for (std::size_t i = 0; i < ncv; ++i) {
      estimate[i] = beta * std::abs(rd.y(ncv - 1, i));
      converged[i] = estimate[i] <= config.tol * std::max(eps23, std::abs(rd.theta[i]));
    }
    for (std::size_t r = 0; r < k; ++r) nconv += converged[order[r]] ? 1 : 0;
    if (nconv >= k || st.restarts >= config.max_restarts) break;

    // Soft locking: grow the kept block by part of the converged count so
    // converged wanted values are never used as shifts.
    const std::size_t p = ncv - k;
    std::size_t keep = k + std::min(nconv, p / 2);
    if (keep == 1 && ncv >= 6) {
      keep = ncv / 2;
    } else if (keep == 1 && ncv > 3) {
      keep = 2;
    }
    std::vector<cplx> shifts;
    for (std::size_t r = keep; r < ncv; ++r) shifts.push_back(rd.theta[order[r]]);
    implicit_restart(fact, shifts, keep);
    ++st.restarts;
  }

  std::vector<RitzPair> out;
  std::vector<cplx> x(n);
  std::vector<cplx> ax(n);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = order[r];
    if (!converged[i]) continue;
    const cplx theta = rd.theta[i];
    RitzPair pair;
    pair.value = invert ? config.sigma + 1.0 / theta : theta;
    std::fill(x.begin(), x.end(), cplx{});
    for (std::size_t c = 0; c < ncv; ++c) axpy(rd.y(c, i), fact.column(c), x);
    scale(x, 1.0 / norm2(x));
    const LinearOperator* check = invert ? original : &op;
    if (check != nullptr) {
      check->apply(x, ax);
      axpy(-pair.value, x, ax);
      pair.residual = norm2(ax) / std::max(std::abs(pair.value), std::numeric_limits<double>::min());
    } else {
      // Relative residual of the transformed problem.
      pair.residual = estimate[i] / std::max(std::abs(theta), std::numeric_limits<double>::min());
    }
    if (config.want_vectors) pair.vector = x;
    out.push_back(std::move(pair));
  }
  std::sort(out.begin(), out.end(), [&](const RitzPair& a, const RitzPair& b) {
    return precedes(a.value, b.value, config.which, config.sigma);
  });
  if (nconv < k) {
    throw PartialResultError("eigs: " + std::to_string(nconv) + " of " + std::to_string(k) +
                                 " eigenvalues converged after " + std::to_string(st.restarts) +
                                 " restarts",
                             std::move(out));
  }
  return out;
}

}  // namespace ptscan
