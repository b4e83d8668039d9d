// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptscan/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "ptscan/errors.hpp"

namespace ptscan {

std::string_view to_string(SolverBackend b) {
  switch (b) {
    case SolverBackend::automatic:
      return "auto";
    case SolverBackend::dense:
      return "dense";
    case SolverBackend::arnoldi:
      return "arnoldi";
  }
  return "?";
}

SolverBackend backend_from_string(std::string_view s) {
  if (s == "auto" || s == "automatic") return SolverBackend::automatic;
  if (s == "dense") return SolverBackend::dense;
  if (s == "arnoldi") return SolverBackend::arnoldi;
  throw DomainError("unknown backend '" + std::string(s) + "'");
}
namespace {

bool by_real(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<Eigenvalue> canonical(const std::vector<Eigenvalue>& in) {
  std::vector<Eigenvalue> out = in;
  std::stable_sort(out.begin(), out.end(),
                   [](const Eigenvalue& a, const Eigenvalue& b) { return by_real(a.value, b.value); });
  return out;
}

// match[i] = index in b of the partner of a[i], or npos.
std::vector<std::size_t> greedy_match(const std::vector<Eigenvalue>& a, const std::vector<Eigenvalue>& b,
                                      double cap) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = std::abs(a[i].value - b[j].value);
      if (d <= cap) cand.emplace_back(d, i, j);
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<std::size_t> match(a.size(), npos);
  std::vector<char> taken(b.size(), 0);
  for (const auto& [d, i, j] : cand) {
    if (match[i] != npos || taken[j]) continue;
    match[i] = j;
    taken[j] = 1;
  }
  return match;
}

}  // namespace

std::vector<ConvergedLevel> ladder_filter(std::span<const Spectrum> rungs, const LadderOptions& opts) {
  if (rungs.size() < 2) throw DomainError("ladder_filter: need at least two truncations");
  for (const auto& r : rungs) {
    if (r.model != rungs[0].model || r.g != rungs[0].g) {
      throw DomainError("ladder_filter: rungs differ in model or g");
    }
  }
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::vector<std::vector<Eigenvalue>> sorted;
  for (const auto& r : rungs) sorted.push_back(canonical(r.eigenvalues));

  // chain[i] follows level i of the first rung.
  std::vector<std::size_t> chain(sorted[0].size());
  std::iota(chain.begin(), chain.end(), std::size_t{0});
  std::vector<std::size_t> prev(chain.size(), npos);
  for (std::size_t r = 1; r < sorted.size(); ++r) {
    const auto match = greedy_match(sorted[r - 1], sorted[r], opts.match_cap);
    for (std::size_t c = 0; c < chain.size(); ++c) {
      if (chain[c] == npos) continue;
      prev[c] = chain[c];
      chain[c] = match[chain[c]];
    }
  }

  std::vector<Truncation> ladder;
  for (const auto& r : rungs) ladder.push_back(r.truncation);
  std::vector<ConvergedLevel> out;
  const auto& last = sorted.back();
  const auto& before = sorted[sorted.size() - 2];
  for (std::size_t c = 0; c < chain.size(); ++c) {
    if (chain[c] == npos) continue;
    const cplx now = last[chain[c]].value;
    const double rel = std::abs(now - before[prev[c]].value) / (1.0 + std::abs(now));
    if (!(rel < opts.threshold)) continue;
    out.push_back(ConvergedLevel{now, rel, last[chain[c]].residual, ladder});
  }
  std::sort(out.begin(), out.end(),
            [](const ConvergedLevel& a, const ConvergedLevel& b) { return by_real(a.value, b.value); });
  return out;
}

std::vector<ConvergedLevel> unfiltered_levels(const Spectrum& s) {
  std::vector<ConvergedLevel> out;
  for (const auto& e : canonical(s.eigenvalues)) out.push_back(ConvergedLevel{e.value, 0.0, e.residual, {s.truncation}});
  return out;
}

Classification classify(std::span<const ConvergedLevel> levels, double imag_threshold, double pair_tol) {
  Classification c;
  std::vector<std::size_t> upper;
  std::vector<std::size_t> lower;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double im = levels[i].value.imag();
    if (std::abs(im) <= imag_threshold) {
      c.real.push_back(levels[i]);
    } else if (im > 0.0) {
      upper.push_back(i);
    } else {
      lower.push_back(i);
    }
  }
  std::vector<char> used(levels.size(), 0);
  for (std::size_t u : upper) {
    const cplx target = std::conj(levels[u].value);
    std::size_t best = levels.size();
    double best_d = 0.0;
    for (std::size_t l : lower) {
      if (used[l]) continue;
      const double d = std::abs(levels[l].value - target);
      if (best == levels.size() || d < best_d) {
        best = l;
        best_d = d;
      }
    }
    if (best != levels.size() && best_d <= pair_tol * std::max(1.0, std::abs(target))) {
      used[best] = 1;
      used[u] = 1;
      c.pairs.emplace_back(levels[u], levels[best]);
    }
  }
  for (std::size_t i : upper) {
    if (!used[i]) c.unpaired.push_back(levels[i]);
  }
  for (std::size_t i : lower) {
    if (!used[i]) c.unpaired.push_back(levels[i]);
  }
  for (const auto& l : c.unpaired) {
    c.warnings.push_back("complex level (" + std::to_string(l.value.real()) + ", " +
                         std::to_string(l.value.imag()) + ") has no conjugate partner");
  }
  return c;
}

double bisect_transition(const std::function<bool(double)>& broken, double lo, double hi, double width) {
  if (!(lo < hi)) throw DomainError("bisect_transition: need lo < hi");
  if (!(width > 0.0)) throw DomainError("bisect_transition: width must be positive");
  const bool at_lo = broken(lo);
  const bool at_hi = broken(hi);
  if (at_lo == at_hi) {
    throw BracketError("bisect_transition: both ends of [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "] classify as " + (at_lo ? "broken" : "unbroken"));
  }
  while (hi - lo >= width) {
    const double mid = 0.5 * (lo + hi);
    if (broken(mid) == at_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool selection_is_complex(const Spectrum& s, const LevelSelector& sel, double imag_threshold) {
  std::vector<cplx> v;
  for (const auto& e : s.eigenvalues) v.push_back(e.value);
  std::sort(v.begin(), v.end(), by_real);
  if (v.size() < sel.first + sel.count) {
    throw NumericError("level selection [" + std::to_string(sel.first) + ", " +
                       std::to_string(sel.first + sel.count) + ") exceeds the " + std::to_string(v.size()) +
                       " computed levels");
  }
  for (std::size_t i = sel.first; i < sel.first + sel.count; ++i) {
    if (std::abs(v[i].imag()) > imag_threshold) return true;
  }
  return false;
}

double exceptional_point(const HamiltonianSpec& spec, const LevelSelector& sel, double lo, double hi,
                         const Truncation& trunc, const SolveOptions& opts, double width,
                         double imag_threshold) {
  SolveOptions o = opts;
  if (o.nev == 0 && !std::isfinite(o.window)) o.nev = sel.first + sel.count + 8;
  return bisect_transition(
      [&](double g) { return selection_is_complex(compute_spectrum(spec, trunc, g, o), sel, imag_threshold); },
      lo, hi, width);
}

}  // namespace ptscan
