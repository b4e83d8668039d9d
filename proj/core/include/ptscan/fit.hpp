// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptscan/scan.hpp"

namespace ptscan {

struct FrontierPoint {
  double g = 0.0;
  double f = 0.0;
};

/// Smallest real part among the complex levels of each complex-bearing,
/// non-gap point, sorted by g. Points with f <= 0 are skipped.
std::vector<FrontierPoint> frontier(const ScanResult& result);

enum class FitForm {
  power,   ///< a (g - b)^c
  log,     ///< a (-log(g - b))^d
  nested,  ///< a (g - b)^c (-log(g - b))^d
};

std::string_view to_string(FitForm form);
FitForm fit_form_from_string(std::string_view s);
/// Parameter names in order, e.g. {"a", "b", "c"}.
std::vector<std::string> parameter_names(FitForm form);

/// Model value; NaN outside the domain.
double evaluate(FitForm form, std::span<const double> params, double g);

struct FitOptions {
  /// Multi-start values b0 = min g - offset.
  std::vector<double> b_offsets{1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  double lambda0 = 1e-3;
  std::size_t max_iterations = 1000;
  double step_tol = 1e-10;
  double cost_tol = 1e-12;
  /// Optional per-point weights (multiplying residuals); empty = unweighted.
  std::vector<double> weights;
  /// Lower end of the scanned g range; b below it is flagged extrapolated.
  double scan_min = 0.0;
};

struct FitStart {
  double b0 = 0.0;
  std::vector<double> initial;
  std::vector<double> final;
  double cost = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct FrontierFit {
  FitForm form = FitForm::power;
  std::vector<double> params;
  std::vector<double> sigmas;
  double residual_norm = 0.0;
  std::size_t n_points = 0;
  /// b sits on its domain bound (min g, or max g - 1 for log factors).
  bool degenerate = false;
  /// b lies outside [scan_min, min g].
  bool extrapolated = false;
  std::vector<FitStart> starts;
  std::size_t best_start = 0;
};

/// Multi-start Levenberg-Marquardt on the unweighted (or weighted) sum of
/// squared residuals. FitError when no start converges.
FrontierFit fit_frontier(std::span<const FrontierPoint> points, FitForm form, const FitOptions& opts = {});

std::string fit_json(const FrontierFit& fit, std::span<const FrontierPoint> points);

}  // namespace ptscan
