// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ptscan/errors.hpp"
#include "ptscan/scan.hpp"
#include "scan_internal.hpp"

namespace ptscan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace detail {

json point_to_json(const ScanPoint& p) {
  json j;
  j["g"] = p.g;
  j["gap"] = p.gap;
  j["error"] = p.error;
  j["partial"] = p.partial;
  j["backend"] = p.backend;
  j["seconds"] = p.seconds;
  j["levels"] = json::array();
  for (const auto& l : p.levels) {
    j["levels"].push_back({l.value.real(), l.value.imag(), l.rel_change, l.residual});
  }
  return j;
}

ScanPoint point_from_json(const json& j, const std::vector<Truncation>& ladder) {
  ScanPoint p;
  p.g = j.at("g").get<double>();
  p.gap = j.value("gap", false);
  p.error = j.value("error", std::string());
  p.partial = j.value("partial", false);
  p.backend = j.value("backend", std::string());
  p.seconds = j.value("seconds", 0.0);
  for (const auto& l : j.at("levels")) {
    ConvergedLevel lvl;
    lvl.value = {l.at(0).get<double>(), l.at(1).get<double>()};
    lvl.rel_change = l.at(2).get<double>();
    lvl.residual = l.at(3).get<double>();
    lvl.ladder = ladder;
    p.levels.push_back(std::move(lvl));
  }
  return p;
}

void write_atomically(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw ResourceError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

using detail::format_double;

void write_scan_csv(std::ostream& os, const ScanResult& result) {
  os << "model,g,cutoffs,level_index,re,im,rel_change,residual,is_complex\n";
  for (const auto& p : result.points) {
    if (p.gap) continue;
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
      const auto& l = p.levels[i];
      const std::string cutoffs = l.ladder.empty() ? std::string() : l.ladder.back().label();
      os << result.model << ',' << format_double(p.g) << ',' << cutoffs << ',' << i << ','
         << format_double(l.value.real()) << ',' << format_double(l.value.imag()) << ','
         << format_double(l.rel_change) << ',' << format_double(l.residual) << ','
         << (l.is_complex(result.imag_threshold) ? 1 : 0) << '\n';
    }
  }
}

std::string scan_manifest_json(const ScanResult& result, const ScanConfig& cfg) {
  json j;
  j["tool"] = "ptscan";
  j["version"] = result.version;
  j["config"] = json::parse(config_json(cfg));
  j["config_hash"] = result.config_hash;
  j["seed"] = cfg.solve.seed;
  j["workers"] = cfg.workers;
  j["matching"] = "greedy-nearest cap=" + format_double(cfg.match_cap);
  j["ladder_certified"] = result.ladder_certified;
  json sectors = json::array();
  for (const auto& t : cfg.ladder) {
    json s = json::array();
    for (std::size_t i = 0; i < t.mode_count(); ++i) s.push_back(std::string(to_string(t.sector(i))));
    sectors.push_back(s);
  }
  j["sectors"] = sectors;
  j["window"] = result.window;
  j["imag_threshold"] = result.imag_threshold;
  j["g_step"] = result.g_step;
  j["points"] = json::array();
  j["gaps"] = json::array();
  for (const auto& p : result.points) {
    std::size_t ncomplex = 0;
    for (const auto& l : p.levels) ncomplex += l.is_complex(result.imag_threshold) ? 1 : 0;
    j["points"].push_back({{"g", p.g},
                           {"seconds", p.seconds},
                           {"backend", p.backend},
                           {"levels", p.levels.size()},
                           {"complex", ncomplex},
                           {"partial", p.partial},
                           {"gap", p.gap}});
    if (p.gap) j["gaps"].push_back({{"g", p.g}, {"error", p.error}});
  }
  try {
    const auto est = critical_estimate(result);
    j["critical_estimate"] = {{"g_onset", est.g_onset},
                              {"uncertainty", est.uncertainty},
                              {"lower_bound_only", est.lower_bound_only},
                              {"upper_bound_only", est.upper_bound_only},
                              {"window", est.window}};
  } catch (const Error&) {
    j["critical_estimate"] = nullptr;
  }
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["created"] = stamp;
  return j.dump(2);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("scan CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

ScanResult read_scan_csv(std::istream& is) {
  static const std::vector<std::string> kColumns = {"model", "g",          "cutoffs",  "level_index", "re",
                                                    "im",    "rel_change", "residual", "is_complex"};
  std::string line;
  if (!std::getline(is, line)) throw DomainError("scan CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto& c : kColumns) {
    if (!col.count(c)) throw NotFoundError("scan CSV lacks column '" + c + "'");
  }
  ScanResult r;
  r.window = std::numeric_limits<double>::infinity();
  std::map<double, ScanPoint> points;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      throw DomainError("scan CSV line " + std::to_string(lineno) + ": wrong field count");
    }
    r.model = f[col["model"]];
    const double g = parse_double(f[col["g"]], lineno);
    auto& p = points[g];
    p.g = g;
    ConvergedLevel l;
    l.value = {parse_double(f[col["re"]], lineno), parse_double(f[col["im"]], lineno)};
    l.rel_change = parse_double(f[col["rel_change"]], lineno);
    l.residual = parse_double(f[col["residual"]], lineno);
    if (!f[col["cutoffs"]].empty()) l.ladder.push_back(parse_truncation(f[col["cutoffs"]]));
    p.levels.push_back(std::move(l));
  }
  for (auto& [g, p] : points) r.points.push_back(std::move(p));
  double step = 0.0;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    const double d = r.points[i].g - r.points[i - 1].g;
    if (step == 0.0 || d < step) step = d;
  }
  r.g_step = step;
  return r;
}

ScanResult load_scan(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw NotFoundError("cannot open scan CSV '" + csv_path + "'");
  ScanResult r = read_scan_csv(in);
  const std::string manifest_path = csv_path + ".manifest.json";
  std::ifstream mf(manifest_path);
  if (!mf) return r;
  json m;
  try {
    m = json::parse(mf);
  } catch (const json::exception& e) {
    throw DomainError("malformed manifest '" + manifest_path + "': " + e.what());
  }
  r.window = m.value("window", r.window);
  r.g_step = m.value("g_step", r.g_step);
  r.imag_threshold = m.value("imag_threshold", r.imag_threshold);
  r.config_hash = m.value("config_hash", std::string());
  r.version = m.value("version", std::string());
  r.ladder_certified = m.value("ladder_certified", false);
  if (r.model.empty() && m.contains("config")) r.model = m["config"].value("model", std::string());
  std::map<double, ScanPoint> points;
  for (auto& p : r.points) points[p.g] = std::move(p);
  for (const auto& jp : m.value("points", json::array())) {
    const double g = jp.at("g").get<double>();
    auto& p = points[g];
    p.g = g;
    p.gap = jp.value("gap", false);
    p.seconds = jp.value("seconds", 0.0);
    p.backend = jp.value("backend", std::string());
    p.partial = jp.value("partial", false);
  }
  for (const auto& jg : m.value("gaps", json::array())) {
    auto& p = points[jg.at("g").get<double>()];
    p.error = jg.value("error", std::string());
  }
  r.points.clear();
  for (auto& [g, p] : points) r.points.push_back(std::move(p));
  return r;
}

}  // namespace ptscan
