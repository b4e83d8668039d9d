// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "ptscan/assemble.hpp"

namespace {

using namespace ptscan;

void BM_AssembleE1(benchmark::State& state) {
  const auto spec = preset("E1");
  const auto t = uniform_truncation(2, static_cast<std::size_t>(state.range(0)));
  AssembleOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    auto a = assemble_sparse(spec, t, 0.3, opts);
    benchmark::DoNotOptimize(a);
  }
  state.SetLabel("dim=" + std::to_string(t.dimension()));
}
BENCHMARK(BM_AssembleE1)->Args({40, 1})->Args({70, 1})->Args({70, 4})->Unit(benchmark::kMillisecond);

void BM_AssembleE3(benchmark::State& state) {
  const auto spec = preset("E3");
  const auto t = uniform_truncation(3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto a = assemble_sparse(spec, t, 0.3);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_AssembleE3)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace
