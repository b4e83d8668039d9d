// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "ptscan/assemble.hpp"
#include "ptscan/linalg.hpp"

namespace {

using namespace ptscan;

SparseMatrix e1(std::size_t n) { return assemble_sparse(preset("E1"), uniform_truncation(2, n), 0.3); }

void BM_SparseMatvec(benchmark::State& state) {
  const auto a = e1(static_cast<std::size_t>(state.range(0)));
  std::vector<cplx> x(a.dim, cplx(1.0, 0.5));
  std::vector<cplx> y(a.dim);
  for (auto _ : state) {
    matvec(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * a.nnz()));
}
BENCHMARK(BM_SparseMatvec)->Arg(40)->Arg(70)->Arg(100);

void BM_BandedLUFactor(benchmark::State& state) {
  const auto a = e1(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    BandedLU lu(a, cplx(-0.5, 0.0));
    benchmark::DoNotOptimize(lu);
  }
}
BENCHMARK(BM_BandedLUFactor)->Arg(40)->Arg(70)->Unit(benchmark::kMillisecond);

void BM_BandedLUSolve(benchmark::State& state) {
  const auto a = e1(static_cast<std::size_t>(state.range(0)));
  const BandedLU lu(a, cplx(-0.5, 0.0));
  std::vector<cplx> b(a.dim, 1.0);
  for (auto _ : state) {
    auto x = b;
    lu.solve_in_place(x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_BandedLUSolve)->Arg(40)->Arg(70);

void BM_DenseEigenvalues(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d;
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = cplx(d(rng), d(rng));
  for (auto _ : state) {
    auto ev = dense_eigenvalues(a);
    benchmark::DoNotOptimize(ev.data());
  }
}
BENCHMARK(BM_DenseEigenvalues)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
