// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptscan/scan.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "ptscan/errors.hpp"
#include "scan_internal.hpp"

#ifndef PTSCAN_VERSION
#define PTSCAN_VERSION "unknown"
#endif

namespace ptscan {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() { return PTSCAN_VERSION; }

void validate(const ScanConfig& cfg) {
  if (!(cfg.g_step > 0.0)) throw DomainError("scan: g_step must be positive");
  if (!(cfg.g_max >= cfg.g_min)) throw DomainError("scan: g_max must not be below g_min");
  if (cfg.ladder.empty()) throw DomainError("scan: ladder is empty");
  std::size_t prev = 0;
  for (const auto& t : cfg.ladder) {
    if (t.mode_count() != cfg.spec.mode_count()) {
      throw DomainError("scan: truncation " + t.label() + " does not match the model's mode count");
    }
    const std::size_t d = t.dimension();
    if (d <= prev) throw DomainError("scan: ladder must be strictly increasing in dimension");
    prev = d;
  }
  if (!(cfg.window > 0.0) && !std::isinf(cfg.window)) throw DomainError("scan: window must be positive");
  if (cfg.workers == 0) throw DomainError("scan: need at least one worker");
  check_well_formed(cfg.spec);
}

std::vector<double> scan_grid(const ScanConfig& cfg) {
  const auto count = static_cast<std::size_t>(std::floor((cfg.g_max - cfg.g_min) / cfg.g_step + 1e-9)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = std::round((cfg.g_min + static_cast<double>(i) * cfg.g_step) * 1e12) / 1e12;
  }
  return g;
}

std::string config_json(const ScanConfig& cfg) {
  json j;
  j["model"] = cfg.model;
  j["spec"] = json::parse(to_json(cfg.spec, -1));
  j["g_min"] = cfg.g_min;
  j["g_max"] = cfg.g_max;
  j["g_step"] = cfg.g_step;
  j["ladder"] = json::array();
  for (const auto& t : cfg.ladder) j["ladder"].push_back(t.label());
  j["window"] = cfg.window;
  j["convergence_threshold"] = cfg.convergence_threshold;
  j["imag_threshold"] = cfg.imag_threshold;
  j["match_cap"] = cfg.match_cap;
  const auto& s = cfg.solve;
  j["solve"] = {{"nev", s.nev},
                {"backend", std::string(to_string(s.backend))},
                {"dense_threshold", s.dense_threshold},
                {"band_bytes_cap", s.band_bytes_cap},
                {"tol", s.tol},
                {"max_restarts", s.max_restarts},
                {"seed", s.seed}};
  return j.dump();
}

std::string config_hash(const ScanConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : config_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool ScanPoint::has_complex(double imag_threshold) const {
  return std::any_of(levels.begin(), levels.end(),
                     [imag_threshold](const ConvergedLevel& l) { return l.is_complex(imag_threshold); });
}

namespace {

ScanPoint compute_point(const ScanConfig& cfg, double g) {
  const auto t0 = std::chrono::steady_clock::now();
  ScanPoint p;
  p.g = g;
  try {
    SolveOptions opts = cfg.solve;
    opts.window = cfg.window;
    std::vector<Spectrum> rungs;
    for (const auto& t : cfg.ladder) {
      rungs.push_back(compute_spectrum(cfg.spec, t, g, opts));
      p.partial = p.partial || rungs.back().partial;
      p.backend = rungs.back().backend;
    }
    p.levels = rungs.size() >= 2
                   ? ladder_filter(rungs, LadderOptions{cfg.convergence_threshold, cfg.match_cap})
                   : unfiltered_levels(rungs.front());
  } catch (const Error& e) {
    p.levels.clear();
    p.gap = true;
    p.error = e.what();
  }
  p.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return p;
}

fs::path checkpoint_path(const fs::path& dir, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "point_%06zu.json", index);
  return dir / name;
}

}  // namespace

ScanResult run_scan(const ScanConfig& cfg) {
  validate(cfg);
  const std::vector<double> grid = scan_grid(cfg);
  const std::string hash = config_hash(cfg);
  const bool persist = !cfg.output.empty();
  const fs::path ckpt_dir = cfg.output + ".ckpt";

  ScanResult result;
  result.model = cfg.model;
  result.window = cfg.window;
  result.g_step = cfg.g_step;
  result.imag_threshold = cfg.imag_threshold;
  result.config_hash = hash;
  result.version = version_string();
  result.ladder_certified = cfg.ladder.size() >= 2;

  std::vector<std::optional<ScanPoint>> slots(grid.size());
  if (persist) {
    if (cfg.resume && fs::exists(ckpt_dir)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(ckpt_dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        std::ifstream in(f);
        json j;
        try {
          j = json::parse(in);
        } catch (const json::exception&) {
          continue;  // unreadable leftovers are recomputed
        }
        if (j.value("hash", std::string()) != hash) {
          if (!cfg.force) {
            throw DomainError("scan: checkpoint " + f.string() +
                              " was written with a different configuration; use --force to overwrite");
          }
          continue;
        }
        const auto index = j.at("index").get<std::size_t>();
        if (index >= slots.size()) continue;
        slots[index] = detail::point_from_json(j, cfg.ladder);
        ++result.resumed;
      }
    } else if (!cfg.resume) {
      fs::remove_all(ckpt_dir);
    }
    fs::create_directories(ckpt_dir);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> computed{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      while (!stop.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= grid.size()) break;
        if (slots[i].has_value()) continue;
        ScanPoint p = compute_point(cfg, grid[i]);
        if (persist) {
          json j = detail::point_to_json(p);
          j["hash"] = hash;
          j["index"] = i;
          detail::write_atomically(checkpoint_path(ckpt_dir, i), j.dump());
        }
        slots[i] = std::move(p);
        const std::size_t done = computed.fetch_add(1) + 1;
        if (cfg.stop_after != 0 && done >= cfg.stop_after) stop.store(true);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      stop.store(true);
    }
  };
  const unsigned nworkers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(grid.size())));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.computed = computed.load();
  for (auto& s : slots) {
    if (s.has_value()) {
      result.points.push_back(std::move(*s));
    } else {
      result.complete = false;
    }
  }
  if (persist && result.complete) {
    std::ostringstream csv;
    write_scan_csv(csv, result);
    detail::write_atomically(cfg.output, csv.str());
    detail::write_atomically(cfg.output + ".manifest.json", scan_manifest_json(result, cfg));
  }
  return result;
}

CriticalEstimate critical_estimate(const ScanResult& result) {
  CriticalEstimate est;
  est.window = result.window;
  std::vector<const ScanPoint*> pts;
  for (const auto& p : result.points) {
    if (!p.gap) pts.push_back(&p);
  }
  if (pts.empty()) throw DomainError("critical_estimate: scan has no usable points");
  std::size_t first = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i]->has_complex(result.imag_threshold)) {
      first = i;
      break;
    }
  }
  if (first == pts.size()) {
    est.g_onset = pts.back()->g;
    est.lower_bound_only = true;
    return est;
  }
  if (first == 0) {
    est.g_onset = pts[0]->g;
    est.upper_bound_only = true;
    return est;
  }
  const double g_real = pts[first - 1]->g;
  const double g_complex = pts[first]->g;
  est.g_onset = 0.5 * (g_real + g_complex);
  est.uncertainty = 0.5 * (g_complex - g_real) + result.g_step;
  return est;
}

}  // namespace ptscan
