// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptscan/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "json.hpp"
#include "ptscan/errors.hpp"

namespace ptscan {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

bool uses_log(FitForm form) { return form != FitForm::power; }

// Solves m x = rhs by Gaussian elimination with partial pivoting.
std::optional<Vec> solve_small(Mat m, Vec rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m[i][k]) > std::abs(m[p][k])) p = i;
    }
    if (!(std::abs(m[p][k]) > 0.0) || !std::isfinite(m[p][k])) return std::nullopt;
    std::swap(m[p], m[k]);
    std::swap(rhs[p], rhs[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
      rhs[i] -= f * rhs[k];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m[i][j] * x[j];
    x[i] = s / m[i][i];
  }
  return x;
}

std::optional<Mat> invert_small(const Mat& m) {
  const std::size_t n = m.size();
  Mat inv(n, Vec(n));
  for (std::size_t c = 0; c < n; ++c) {
    Vec e(n, 0.0);
    e[c] = 1.0;
    const auto col = solve_small(m, e);
    if (!col) return std::nullopt;
    for (std::size_t r = 0; r < n; ++r) inv[r][c] = (*col)[r];
  }
  return inv;
}

struct Problem {
  FitForm form;
  std::span<const FrontierPoint> pts;
  Vec w;
  double g_min;
  double g_max;

  std::size_t nparams() const { return form == FitForm::nested ? 4 : 3; }

  bool in_domain(const Vec& p) const {
    if (!std::isfinite(p[1]) || !(p[1] < g_min)) return false;
    if (uses_log(form) && !(g_max - p[1] < 1.0)) return false;
    return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
  }

  // Weighted residuals and Jacobian rows.
  double residuals(const Vec& p, Vec& r, Mat* jac) const {
    const std::size_t n = pts.size();
    r.resize(n);
    if (jac != nullptr) jac->assign(n, Vec(nparams(), 0.0));
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = pts[i].g - p[1];
      const double lu = std::log(u);
      double f = 0.0;
      Vec d(nparams());
      switch (form) {
        case FitForm::power: {
          const double uc = std::pow(u, p[2]);
          f = p[0] * uc;
          d = {uc, -p[2] * f / u, f * lu};
          break;
        }
        case FitForm::log: {
          const double l = -lu;
          const double ld = std::pow(l, p[2]);
          f = p[0] * ld;
          d = {ld, p[2] * f / (u * l), f * std::log(l)};
          break;
        }
        case FitForm::nested: {
          const double l = -lu;
          const double base = std::pow(u, p[2]) * std::pow(l, p[3]);
          f = p[0] * base;
          d = {base, f * (-p[2] / u + p[3] / (u * l)), f * lu, f * std::log(l)};
          break;
        }
      }
      r[i] = w[i] * (f - pts[i].f);
      cost += r[i] * r[i];
      if (jac != nullptr) {
        for (std::size_t k = 0; k < nparams(); ++k) (*jac)[i][k] = w[i] * d[k];
      }
    }
    return cost;
  }
};

// Log-linear regression for a, and c and/or d, at fixed b.
std::optional<Vec> initial_guess(const Problem& pr, double b0) {
  const std::size_t n = pr.pts.size();
  std::vector<Vec> cols;
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pr.pts[i].f > 0.0)) return std::nullopt;
    y[i] = std::log(pr.pts[i].f);
  }
  Vec ones(n, 1.0), lnu(n), lnl(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = pr.pts[i].g - b0;
    lnu[i] = std::log(u);
    lnl[i] = uses_log(pr.form) ? std::log(-std::log(u)) : 0.0;
  }
  cols.push_back(ones);
  if (pr.form != FitForm::log) cols.push_back(lnu);
  if (pr.form != FitForm::power) cols.push_back(lnl);
  const std::size_t k = cols.size();
  Mat ata(k, Vec(k, 0.0));
  Vec aty(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      for (std::size_t i = 0; i < n; ++i) ata[a][b] += cols[a][i] * cols[b][i];
    }
    for (std::size_t i = 0; i < n; ++i) aty[a] += cols[a][i] * y[i];
  }
  auto coef = solve_small(ata, aty);
  if (!coef) return std::nullopt;
  const double a = std::exp((*coef)[0]);
  switch (pr.form) {
    case FitForm::power:
      return Vec{a, b0, (*coef)[1]};
    case FitForm::log:
      return Vec{a, b0, (*coef)[1]};
    case FitForm::nested:
      return Vec{a, b0, (*coef)[1], (*coef)[2]};
  }
  return std::nullopt;
}

FitStart levenberg_marquardt(const Problem& pr, Vec p, const FitOptions& opts) {
  FitStart st;
  st.b0 = p[1];
  st.initial = p;
  const std::size_t np = pr.nparams();
  Vec r;
  Mat jac;
  double cost = pr.residuals(p, r, &jac);
  double lambda = opts.lambda0;
  for (st.iterations = 0; st.iterations < opts.max_iterations; ++st.iterations) {
    if (cost == 0.0) {
      st.converged = true;
      break;
    }
    Mat a(np, Vec(np, 0.0));
    Vec grad(np, 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t j = 0; j < np; ++j) {
        grad[j] += jac[i][j] * r[i];
        for (std::size_t k = 0; k < np; ++k) a[j][k] += jac[i][j] * jac[i][k];
      }
    }
    bool accepted = false;
    bool done = false;
    while (!accepted) {
      Mat m = a;
      for (std::size_t j = 0; j < np; ++j) m[j][j] += lambda * std::max(a[j][j], 1e-300);
      Vec neg(np);
      for (std::size_t j = 0; j < np; ++j) neg[j] = -grad[j];
      const auto step = solve_small(m, neg);
      if (step) {
        Vec trial(np);
        for (std::size_t j = 0; j < np; ++j) trial[j] = p[j] + (*step)[j];
        if (pr.in_domain(trial)) {
          Vec rt;
          Mat jt;
          const double ct = pr.residuals(trial, rt, &jt);
          if (std::isfinite(ct) && ct < cost) {
            double snorm = 0.0;
            double pnorm = 0.0;
            for (std::size_t j = 0; j < np; ++j) {
              snorm += (*step)[j] * (*step)[j];
              pnorm += p[j] * p[j];
            }
            done = std::sqrt(snorm) <= opts.step_tol * (std::sqrt(pnorm) + opts.step_tol) ||
                   (cost - ct) <= opts.cost_tol * cost;
            p = std::move(trial);
            r = std::move(rt);
            jac = std::move(jt);
            cost = ct;
            lambda = std::max(lambda / 10.0, 1e-15);
            accepted = true;
            continue;
          }
        }
      }
      lambda *= 10.0;
      if (lambda > 1e16) {
        // No descent direction left at machine precision: a stationary point.
        done = true;
        break;
      }
    }
    if (done) {
      st.converged = true;
      ++st.iterations;
      break;
    }
  }
  st.final = p;
  st.cost = cost;
  return st;
}

}  // namespace

std::string_view to_string(FitForm form) {
  switch (form) {
    case FitForm::power:
      return "power";
    case FitForm::log:
      return "log";
    case FitForm::nested:
      return "nested";
  }
  return "?";
}

FitForm fit_form_from_string(std::string_view s) {
  if (s == "power") return FitForm::power;
  if (s == "log") return FitForm::log;
  if (s == "nested") return FitForm::nested;
  throw DomainError("unknown fit form '" + std::string(s) + "'");
}

std::vector<std::string> parameter_names(FitForm form) {
  switch (form) {
    case FitForm::power:
      return {"a", "b", "c"};
    case FitForm::log:
      return {"a", "b", "d"};
    case FitForm::nested:
      return {"a", "b", "c", "d"};
  }
  return {};
}

double evaluate(FitForm form, std::span<const double> p, double g) {
  const double u = g - p[1];
  if (!(u > 0.0)) return kNaN;
  switch (form) {
    case FitForm::power:
      return p[0] * std::pow(u, p[2]);
    case FitForm::log:
      return u < 1.0 ? p[0] * std::pow(-std::log(u), p[2]) : kNaN;
    case FitForm::nested:
      return u < 1.0 ? p[0] * std::pow(u, p[2]) * std::pow(-std::log(u), p[3]) : kNaN;
  }
  return kNaN;
}

std::vector<FrontierPoint> frontier(const ScanResult& result) {
  std::vector<FrontierPoint> out;
  for (const auto& p : result.points) {
    if (p.gap) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : p.levels) {
      if (l.is_complex(result.imag_threshold)) best = std::min(best, l.value.real());
    }
    if (std::isfinite(best) && best > 0.0) out.push_back({p.g, best});
  }
  std::sort(out.begin(), out.end(), [](const FrontierPoint& a, const FrontierPoint& b) { return a.g < b.g; });
  return out;
}

FrontierFit fit_frontier(std::span<const FrontierPoint> points, FitForm form, const FitOptions& opts) {
  const std::size_t n = points.size();
  const std::size_t np = form == FitForm::nested ? 4 : 3;
  if (n < 5 || n <= np) throw DomainError("fit_frontier: need at least 5 points (and more than parameters)");
  Problem pr{form, points, {}, 0.0, 0.0};
  pr.g_min = points[0].g;
  pr.g_max = points[0].g;
  for (const auto& p : points) {
    pr.g_min = std::min(pr.g_min, p.g);
    pr.g_max = std::max(pr.g_max, p.g);
    if (!std::isfinite(p.g) || !std::isfinite(p.f)) throw DomainError("fit_frontier: non-finite point");
  }
  if (!(pr.g_max > pr.g_min)) throw DomainError("fit_frontier: g values have no spread");
  if (uses_log(form) && pr.g_max - pr.g_min >= 1.0) {
    throw DomainError("fit_frontier: log forms need a g spread below 1");
  }
  if (!opts.weights.empty() && opts.weights.size() != n) throw DomainError("fit_frontier: weight count mismatch");
  pr.w = opts.weights.empty() ? Vec(n, 1.0) : opts.weights;

  FrontierFit fit;
  fit.form = form;
  fit.n_points = n;
  std::optional<std::size_t> best;
  for (const double off : opts.b_offsets) {
    const double b0 = pr.g_min - off;
    if (uses_log(form) && !(pr.g_max - b0 < 1.0)) continue;
    auto guess = initial_guess(pr, b0);
    if (!guess) continue;
    FitStart st = levenberg_marquardt(pr, *guess, opts);
    fit.starts.push_back(st);
    if (!st.converged) continue;
    const auto& cur = fit.starts.back();
    if (!best) {
      best = fit.starts.size() - 1;
    } else {
      const auto& b = fit.starts[*best];
      if (cur.cost < b.cost || (cur.cost == b.cost && cur.final[1] < b.final[1])) best = fit.starts.size() - 1;
    }
  }
  if (!best) {
    std::string diag = "fit_frontier: no start converged (" + std::to_string(fit.starts.size()) + " tried";
    for (const auto& s : fit.starts) diag += "; b0=" + std::to_string(s.b0) + " cost=" + std::to_string(s.cost);
    throw FitError(diag + ")");
  }
  fit.best_start = *best;
  fit.params = fit.starts[*best].final;
  fit.residual_norm = std::sqrt(fit.starts[*best].cost);

  Vec r;
  Mat jac;
  const double cost = pr.residuals(fit.params, r, &jac);
  Mat jtj(np, Vec(np, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      for (std::size_t k = 0; k < np; ++k) jtj[j][k] += jac[i][j] * jac[i][k];
    }
  }
  const double s2 = cost / static_cast<double>(n - np);
  fit.sigmas.assign(np, kNaN);
  if (const auto cov = invert_small(jtj)) {
    for (std::size_t j = 0; j < np; ++j) fit.sigmas[j] = std::sqrt(std::max(0.0, s2 * (*cov)[j][j]));
  }

  const double b = fit.params[1];
  const double span = pr.g_max - pr.g_min;
  const double bound_tol = 1e-9 * std::max(1.0, span);
  fit.degenerate = pr.g_min - b <= bound_tol || (uses_log(form) && 1.0 - (pr.g_max - b) <= bound_tol);
  fit.extrapolated = !(b >= opts.scan_min && b <= pr.g_min);
  return fit;
}

std::string fit_json(const FrontierFit& fit, std::span<const FrontierPoint> points) {
  using nlohmann::json;
  const auto names = parameter_names(fit.form);
  json j;
  j["form"] = std::string(to_string(fit.form));
  j["params"] = json::object();
  j["sigmas"] = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) {
    j["params"][names[i]] = fit.params[i];
    j["sigmas"][names[i]] = std::isfinite(fit.sigmas[i]) ? json(fit.sigmas[i]) : json(nullptr);
  }
  j["residual_norm"] = fit.residual_norm;
  j["n_points"] = fit.n_points;
  j["degenerate"] = fit.degenerate;
  j["extrapolated"] = fit.extrapolated;
  j["best_start"] = fit.best_start;
  j["starts"] = json::array();
  for (const auto& s : fit.starts) {
    j["starts"].push_back({{"b0", s.b0},
                           {"initial", s.initial},
                           {"final", s.final},
                           {"cost", s.cost},
                           {"iterations", s.iterations},
                           {"converged", s.converged}});
  }
  j["residuals"] = json::array();
  j["points"] = json::array();
  for (const auto& p : points) {
    j["points"].push_back({p.g, p.f});
    j["residuals"].push_back(p.f - evaluate(fit.form, fit.params, p.g));
  }
  return j.dump(2);
}

}  // namespace ptscan
