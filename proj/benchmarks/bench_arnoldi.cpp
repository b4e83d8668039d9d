// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "ptscan/arnoldi.hpp"
#include "ptscan/assemble.hpp"
#include "ptscan/spectra.hpp"

namespace {

using namespace ptscan;

void BM_ShiftInvertEigs(benchmark::State& state) {
  const auto a = assemble_sparse(preset("E1"), uniform_truncation(2, static_cast<std::size_t>(state.range(0))), 0.3);
  EigsConfig cfg;
  cfg.k = static_cast<std::size_t>(state.range(1));
  cfg.mode = SpectralMode::shift_invert;
  cfg.which = Which::nearest_shift;
  cfg.sigma = 0.5;
  const BandedLU lu(a, cfg.sigma);
  const auto op = make_inverse_operator(lu);
  for (auto _ : state) {
    auto pairs = eigs(op, cfg);
    benchmark::DoNotOptimize(pairs.data());
  }
}
BENCHMARK(BM_ShiftInvertEigs)->Args({40, 20})->Args({60, 40})->Unit(benchmark::kMillisecond);

void BM_ComputeSpectrumE12(benchmark::State& state) {
  SolveOptions o;
  o.backend = SolverBackend::arnoldi;
  o.nev = 12;
  const auto t = uniform_truncation(1, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = compute_spectrum(preset("E12"), t, 1.0, o);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ComputeSpectrumE12)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
