// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "ptscan/errors.hpp"
#include "ptscan/spectra.hpp"
#include "test_util.hpp"

namespace ptscan {
namespace {

using testing::match_error;
using testing::values;

TEST(Spectrum, UncoupledE1HasOscillatorDegeneracies) {
  const auto s = compute_spectrum(preset("E1"), uniform_truncation(2, 20), 0.0);
  EXPECT_EQ(s.backend, "diagonal");
  ASSERT_EQ(s.eigenvalues.size(), 400u);
  EXPECT_DOUBLE_EQ(s.eigenvalues[0].value.real(), 1.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[1].value.real(), 2.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[2].value.real(), 2.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[3].value.real(), 3.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[5].value.real(), 3.0);
}

TEST(Spectrum, UncoupledE3GroundState) {
  const auto s = compute_spectrum(preset("E3"), uniform_truncation(3, 8), 0.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues.front().value.real(), 1.5);
}

TEST(Spectrum, KrylovAndDenseBackendsAgreeInsideTheWindow) {
  const auto spec = preset("E1");
  const auto t = uniform_truncation(2, 26);
  SolveOptions dense;
  dense.backend = SolverBackend::dense;
  dense.window = 8.0;
  SolveOptions krylov = dense;
  krylov.backend = SolverBackend::arnoldi;
  const auto d = compute_spectrum(spec, t, 0.35, dense);
  const auto k = compute_spectrum(spec, t, 0.35, krylov);
  EXPECT_EQ(k.backend, "arnoldi-shift-invert");
  ASSERT_EQ(d.eigenvalues.size(), k.eigenvalues.size());
  EXPECT_LT(match_error(values(k), values(d)), 1e-9);
  for (const auto& e : k.eigenvalues) EXPECT_LE(e.value.real(), 8.0);
}

TEST(Spectrum, DirectIterationWhenTheBandIsTooLarge) {
  SolveOptions o;
  o.backend = SolverBackend::arnoldi;
  o.window = 5.0;
  o.band_bytes_cap = 0;
  const auto s = compute_spectrum(preset("E1"), uniform_truncation(2, 20), 0.2, o);
  EXPECT_EQ(s.backend, "arnoldi-direct");
  SolveOptions dense;
  dense.backend = SolverBackend::dense;
  dense.window = 5.0;
  EXPECT_LT(match_error(values(s), values(compute_spectrum(preset("E1"), uniform_truncation(2, 20), 0.2, dense))),
            1e-8);
}

TEST(Spectrum, SortedByRealThenImaginary) {
  const auto s = compute_spectrum(preset("E1"), uniform_truncation(2, 16), 0.5);
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) {
    const cplx a = s.eigenvalues[i - 1].value;
    const cplx b = s.eigenvalues[i].value;
    EXPECT_TRUE(a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag()));
  }
}

TEST(Spectrum, KrylovWithoutWindowOrCountIsRejected) {
  SolveOptions o;
  o.backend = SolverBackend::arnoldi;
  EXPECT_THROW(compute_spectrum(preset("E1"), uniform_truncation(2, 10), 0.1, o), DomainError);
}

Spectrum synthetic(std::vector<cplx> vals, std::size_t n) {
  Spectrum s;
  s.model = "X";
  s.g = 0.1;
  s.truncation = uniform_truncation(1, n);
  for (const cplx v : vals) s.eigenvalues.push_back({v, 1e-14});
  return s;
}

TEST(Ladder, KeepsChainsThatSettle) {
  const std::vector<Spectrum> rungs{
      synthetic({1.0, 2.0 + 1e-4, 5.0}, 10),
      synthetic({1.0, 2.0 + 1e-6, 5.2}, 12),
      synthetic({1.0, 2.0 + 1e-9, 5.05, 7.0}, 14),
  };
  const auto levels = ladder_filter(rungs);
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_EQ(levels[0].value, cplx(1.0));
  EXPECT_EQ(levels[0].rel_change, 0.0);
  EXPECT_NEAR(levels[1].value.real(), 2.0, 1e-8);
  EXPECT_NEAR(levels[1].rel_change, (1e-6 - 1e-9) / (3.0 + 1e-9), 1e-12);
  EXPECT_EQ(levels[1].ladder.size(), 3u);
}

TEST(Ladder, MatchCapBreaksChains) {
  const std::vector<Spectrum> rungs{synthetic({1.0}, 10), synthetic({1.5}, 12)};
  EXPECT_TRUE(ladder_filter(rungs).empty());
}

TEST(Ladder, NeedsTwoCompatibleRungs) {
  EXPECT_THROW(ladder_filter(std::vector<Spectrum>{synthetic({1.0}, 10)}), DomainError);
  auto other = synthetic({1.0}, 12);
  other.g = 0.2;
  EXPECT_THROW(ladder_filter(std::vector<Spectrum>{synthetic({1.0}, 10), other}), DomainError);
}

TEST(Ladder, SingleRungPassThrough) {
  const auto levels = unfiltered_levels(synthetic({1.0, 2.0}, 10));
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_EQ(levels[1].rel_change, 0.0);
}

std::vector<ConvergedLevel> as_levels(std::vector<cplx> vals) {
  std::vector<ConvergedLevel> out;
  for (const cplx v : vals) out.push_back({v, 0.0, 0.0, {}});
  return out;
}

TEST(Classify, PairsConjugatesAndFlagsStragglers) {
  const auto c = classify(as_levels({1.0, {2.0, 0.5}, {2.0, -0.5}, {3.0, 1e-9}, {4.0, 0.2}}));
  EXPECT_EQ(c.real.size(), 2u);
  ASSERT_EQ(c.pairs.size(), 1u);
  EXPECT_GT(c.pairs[0].first.value.imag(), 0.0);
  EXPECT_EQ(c.unpaired.size(), 1u);
  EXPECT_EQ(c.complex_count(), 3u);
  EXPECT_FALSE(c.warnings.empty());
}

TEST(Bisect, LocatesAStep) {
  const double x = bisect_transition([](double g) { return g > 0.3217; }, 0.0, 1.0, 1e-6);
  EXPECT_NEAR(x, 0.3217, 1e-6);
  const double y = bisect_transition([](double g) { return g < 0.6; }, 0.0, 1.0, 1e-6);
  EXPECT_NEAR(y, 0.6, 1e-6);
}

TEST(Bisect, EqualEndsAreABracketError) {
  EXPECT_THROW(bisect_transition([](double) { return true; }, 0.0, 1.0), BracketError);
}

TEST(Selection, ChecksOnlyTheSelectedLevels) {
  const auto s = synthetic({1.0, 2.0, {3.0, 0.1}, {3.0, -0.1}}, 10);
  EXPECT_FALSE(selection_is_complex(s, {0, 2}));
  EXPECT_TRUE(selection_is_complex(s, {1, 2}));
  EXPECT_THROW(selection_is_complex(s, {3, 2}), NumericError);
}

TEST(ExceptionalPoint, TwoLevelFourierModel) {
  SolveOptions o;
  o.nev = 8;
  const double g = exceptional_point(preset("E10"), {0, 2}, 3.0, 4.0, uniform_truncation(1, 40), o, 1e-4);
  EXPECT_NEAR(g, 3.4645, 0.005);
}

TEST(ExceptionalPoint, SignFlipSymmetry) {
  // E1 spectra at g and -g coincide, so a bracket on the negative side
  // mirrors the positive one.
  const auto s1 = compute_spectrum(preset("E1"), uniform_truncation(2, 12), 0.37);
  const auto s2 = compute_spectrum(preset("E1"), uniform_truncation(2, 12), -0.37);
  EXPECT_LT(match_error(values(s1), values(s2)), 1e-10);
}

}  // namespace
}  // namespace ptscan
