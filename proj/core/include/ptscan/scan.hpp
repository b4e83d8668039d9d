// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ptscan/spectra.hpp"

namespace ptscan {

struct ScanConfig {
  std::string model;
  HamiltonianSpec spec;
  double g_min = 0.0;
  double g_max = 0.0;
  double g_step = 0.005;
  std::vector<Truncation> ladder;
  double window = 16.0;
  double convergence_threshold = 1e-6;
  double imag_threshold = 1e-6;
  double match_cap = 0.1;
  SolveOptions solve;
  unsigned workers = 1;
  /// CSV path; "" keeps everything in memory. Checkpoints go to
  /// `<output>.ckpt/`, the manifest to `<output>.manifest.json`.
  std::string output;
  bool resume = false;
  /// Resume even when stored checkpoints were made with another config
  /// (mismatching points are recomputed).
  bool force = false;
  /// Testing hook: stop after this many newly computed points, leaving the
  /// checkpoints behind as if the process had been killed. 0 disables.
  std::size_t stop_after = 0;
};

/// Throws DomainError for an inconsistent config.
void validate(const ScanConfig& cfg);

/// Grid values g_min + i g_step up to g_max, rounded to 1e-12.
std::vector<double> scan_grid(const ScanConfig& cfg);

/// Canonical JSON of every field that affects the numbers.
std::string config_json(const ScanConfig& cfg);
/// FNV-1a 64 of config_json, as 16 hex digits.
std::string config_hash(const ScanConfig& cfg);

struct ScanPoint {
  double g = 0.0;
  std::vector<ConvergedLevel> levels;
  bool gap = false;
  std::string error;
  bool partial = false;
  double seconds = 0.0;
  std::string backend;

  bool has_complex(double imag_threshold = 1e-6) const;
};

struct ScanResult {
  std::string model;
  std::vector<ScanPoint> points;  // strictly increasing g
  double window = 0.0;
  double g_step = 0.0;
  double imag_threshold = 1e-6;
  std::string config_hash;
  std::string version;
  bool ladder_certified = false;
  /// False when stop_after interrupted the run.
  bool complete = true;
  std::size_t computed = 0;
  std::size_t resumed = 0;
};

/// Runs the sweep. Output is independent of worker count and of how the
/// run was split by interruptions and resumes.
ScanResult run_scan(const ScanConfig& cfg);

struct CriticalEstimate {
  double g_onset = 0.0;
  double uncertainty = 0.0;
  /// No complex point in range: g_onset is the largest scanned g.
  bool lower_bound_only = false;
  /// The first grid point is already complex: g_onset is that g.
  bool upper_bound_only = false;
  double window = 0.0;
};

/// Midpoint between the largest all-real g below the first complex-bearing
/// g and that g; uncertainty is half the gap plus one grid step.
CriticalEstimate critical_estimate(const ScanResult& result);

/// model,g,cutoffs,level_index,re,im,rel_change,residual,is_complex with
/// 17 significant digits.
void write_scan_csv(std::ostream& os, const ScanResult& result);
std::string scan_manifest_json(const ScanResult& result, const ScanConfig& cfg);

/// Reads a scan CSV; the sibling manifest, when present, restores grid
/// points without levels and gap records.
ScanResult load_scan(const std::string& csv_path);
ScanResult read_scan_csv(std::istream& is);

/// Library version (git describe of the build).
std::string version_string();

}  // namespace ptscan
