// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ptscan/assemble.hpp"
#include "ptscan/errors.hpp"
#include "ptscan/hamiltonian.hpp"

namespace ptscan {
namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = std::numbers::pi;

TEST(Truncation, ParsesEveryForm) {
  EXPECT_EQ(parse_truncation("50x50").cutoffs, (std::vector<std::size_t>{50, 50}));
  EXPECT_EQ(parse_truncation("50,60").cutoffs, (std::vector<std::size_t>{50, 60}));
  EXPECT_EQ(parse_truncation("64").cutoffs, (std::vector<std::size_t>{64}));
  const auto t = parse_truncation("50ex51");
  EXPECT_EQ(t.sector(0), Sector::even);
  EXPECT_EQ(t.sector(1), Sector::full);
  EXPECT_EQ(t.states(0), 25u);
  EXPECT_EQ(t.dimension(), 25u * 51u);
  EXPECT_EQ(t.label(), "50ex51");
  EXPECT_EQ(parse_truncation("9o").states(0), 4u);
  EXPECT_THROW(parse_truncation("abc"), DomainError);
  EXPECT_THROW(parse_truncation(""), DomainError);
}

TEST(Truncation, DimensionOverflowIsAResourceError) {
  Truncation t = uniform_truncation(4, std::size_t{1} << 20);
  EXPECT_THROW(t.dimension(), ResourceError);
}

TEST(SingleMode, PositionEntriesFollowLadderAlgebra) {
  const double lambda = 1.7;
  const auto x = single_mode_matrix(OperatorKind::position_power, 1, 10, lambda);
  for (std::size_t n = 0; n + 1 < 10; ++n) {
    EXPECT_NEAR(x.at(n, n + 1).real(), std::sqrt((n + 1.0) / (2.0 * lambda)), 1e-15);
    EXPECT_EQ(x.at(n, n + 1), x.at(n + 1, n));
    EXPECT_EQ(x.at(n, n), cplx(0.0));
  }
}

TEST(SingleMode, PowersAreTruncationExact) {
  // x^k at size N equals the top-left block of (x at size N + k)^k.
  const std::size_t n = 12;
  for (int k = 2; k <= 5; ++k) {
    const auto big = single_mode_matrix(OperatorKind::position_power, 1, n + k, 1.0).to_dense();
    DenseMatrix p = DenseMatrix::identity(n + k);
    for (int i = 0; i < k; ++i) p = p * big;
    const auto xk = single_mode_matrix(OperatorKind::position_power, k, n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(std::abs(xk.at(i, j) - p(i, j)), 0.0, 1e-11) << k;
    }
  }
}

TEST(SingleMode, MomentumSquaredCompletesTheOscillator) {
  // p^2 + lambda^2 x^2 = lambda (2n + 1) is diagonal.
  const double lambda = 0.8;
  const auto p2 = single_mode_matrix(OperatorKind::momentum_squared, 2, 15, lambda);
  const auto x2 = single_mode_matrix(OperatorKind::position_power, 2, 15, lambda);
  for (std::size_t i = 0; i < 15; ++i) {
    for (std::size_t j = 0; j < 15; ++j) {
      const cplx h = p2.at(i, j) + lambda * lambda * x2.at(i, j);
      const double want = i == j ? lambda * (2.0 * i + 1.0) : 0.0;
      EXPECT_NEAR(std::abs(h - want), 0.0, 1e-12) << i << "," << j;
    }
  }
}

TEST(SingleMode, PowerCapIsEnforced) {
  EXPECT_THROW(single_mode_matrix(OperatorKind::position_power, 9, 10, 1.0), UnsupportedError);
}

TEST(SingleMode, FrequencyScaling) { EXPECT_DOUBLE_EQ(mode_frequency(0.5, 0.5), 1.0); }

TEST(BoxBasis, DipoleElementsMatchQuadrature) {
  const double half = 1.3;
  const auto x = box_position_matrix(8, half);
  for (int j = 1; j <= 8; ++j) {
    for (int k = 1; k <= 8; ++k) {
      auto f = [&](double s) {
        const double phase = (s + half) / (2.0 * half);
        return std::sin(j * kPi * phase) * s * std::sin(k * kPi * phase) / half;
      };
      const double want = gauss_kronrod<double, 61>::integrate(f, -half, half, 12, 1e-13);
      EXPECT_NEAR(x.at(j - 1, k - 1).real(), want, 1e-11) << j << "," << k;
    }
  }
}

TEST(FourierBasis, CosineElementsMatchQuadrature) {
  const auto c = fourier_cosine_matrix(6);
  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 6; ++n) {
      auto f = [&](double t) { return std::sin(m * t) * std::cos(t) * std::sin(n * t) / kPi; };
      const double want = gauss_kronrod<double, 61>::integrate(f, 0.0, 2.0 * kPi, 12, 1e-13);
      EXPECT_NEAR(c.at(m - 1, n - 1).real(), want, 1e-12) << m << "," << n;
    }
  }
}

TEST(Assemble, UncoupledOscillatorIsDiagonal) {
  const auto a = assemble_sparse(preset("E1"), uniform_truncation(2, 6), 0.0);
  EXPECT_EQ(a.nnz(), 36u);
  // Total quantum number plus one.
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(a.at(6 * i + j, 6 * i + j).real(), i + j + 1.0, 1e-14);
  }
}

TEST(Assemble, ComplexSymmetricAndNotHermitian) {
  const auto a = assemble_sparse(preset("E1"), uniform_truncation(2, 12), 0.3);
  EXPECT_NO_THROW(a.validate());
  EXPECT_TRUE(a.is_symmetric());
  EXPECT_FALSE(a.is_hermitian());
}

TEST(Assemble, E1NonzeroCount) {
  // x^2 y keeps three x-offsets and two y-offsets off the diagonal.
  for (std::size_t n : {10, 20, 30}) {
    const auto a = assemble_sparse(preset("E1"), uniform_truncation(2, n), 0.2);
    EXPECT_EQ(a.nnz(), n * n + 2 * (3 * n - 4) * (n - 1)) << n;
  }
}

TEST(Assemble, ThreadCountDoesNotChangeTheMatrix) {
  const auto spec = preset("E3");
  const auto t = uniform_truncation(3, 9);
  AssembleOptions one;
  AssembleOptions many;
  many.threads = 3;
  const auto a = assemble_sparse(spec, t, 0.4, one);
  const auto b = assemble_sparse(spec, t, 0.4, many);
  EXPECT_EQ(a.row_ptr, b.row_ptr);
  EXPECT_EQ(a.col_idx, b.col_idx);
  EXPECT_EQ(a.values, b.values);
}

TEST(Assemble, ParitySectorsPartitionTheBasis) {
  const auto spec = preset("E1");
  const auto even = assemble_sparse(spec, parse_truncation("10ex10"), 0.3);
  const auto odd = assemble_sparse(spec, parse_truncation("10ox10"), 0.3);
  EXPECT_EQ(even.dim + odd.dim, 100u);
  // Odd sector of x: lowest state n_x = 1, n_y = 0 has energy 2.
  EXPECT_NEAR(odd.at(0, 0).real(), 2.0, 1e-14);
}

TEST(Assemble, SectorOnOddCouplingModeIsRejected) {
  EXPECT_THROW(assemble_sparse(preset("E1"), parse_truncation("10x10e"), 0.3), DomainError);
}

TEST(Assemble, TrigonometricBenchmarksHaveExpectedStructure) {
  const auto e10 = assemble_sparse(preset("E10"), uniform_truncation(1, 5), 2.0);
  EXPECT_NEAR(e10.at(2, 2).real(), 9.0, 1e-14);  // kappa n^2 with n = 3
  EXPECT_NEAR(std::abs(e10.at(1, 2)), 1.0, 1e-14);
  const auto e11 = assemble_sparse(preset("E11"), uniform_truncation(1, 4), 1.0);
  EXPECT_NEAR(e11.at(0, 0).real(), std::pow(kPi / 2.0, 2), 1e-13);
  EXPECT_EQ(e11.at(0, 2), cplx(0.0));
}

TEST(MatrixMarket, RoundTrip) {
  const auto a = assemble_sparse(preset("E1"), uniform_truncation(2, 7), 0.25);
  std::stringstream ss;
  write_matrix_market(ss, a);
  EXPECT_EQ(ss.str().rfind("%%MatrixMarket matrix coordinate complex general", 0), 0u);
  const auto b = read_matrix_market(ss);
  EXPECT_EQ(a.col_idx, b.col_idx);
  EXPECT_EQ(a.values, b.values);
}

}  // namespace
}  // namespace ptscan
