// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ptscan/errors.hpp"
#include "ptscan/scan.hpp"

namespace ptscan {
namespace {

namespace fs = std::filesystem;

class ScanTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ptscan_scan_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static ScanConfig small_config() {
    ScanConfig cfg;
    cfg.model = "E1";
    cfg.spec = preset("E1");
    cfg.g_min = 0.30;
    cfg.g_max = 0.40;
    cfg.g_step = 0.02;
    cfg.ladder = {uniform_truncation(2, 12), uniform_truncation(2, 14), uniform_truncation(2, 16)};
    cfg.window = 9.0;
    return cfg;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(ScanTest, GridIsRoundedAndInclusive) {
  auto cfg = small_config();
  cfg.g_min = 0.0;
  cfg.g_max = 0.4;
  cfg.g_step = 0.005;
  const auto g = scan_grid(cfg);
  ASSERT_EQ(g.size(), 81u);
  EXPECT_EQ(g[3], 0.015);
  EXPECT_EQ(g.back(), 0.4);
}

TEST_F(ScanTest, ValidateRejectsInconsistentConfigs) {
  auto cfg = small_config();
  cfg.g_step = 0.0;
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = small_config();
  cfg.ladder = {uniform_truncation(2, 14), uniform_truncation(2, 12)};
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = small_config();
  cfg.ladder = {uniform_truncation(3, 12)};
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = small_config();
  cfg.workers = 0;
  EXPECT_THROW(validate(cfg), DomainError);
}

TEST_F(ScanTest, HashTracksNumericFieldsOnly) {
  auto a = small_config();
  auto b = small_config();
  b.workers = 4;
  b.output = "elsewhere.csv";
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.window = 10.0;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST_F(ScanTest, OutputIndependentOfWorkerCount) {
  auto cfg = small_config();
  cfg.output = (dir_ / "a.csv").string();
  const auto r1 = run_scan(cfg);
  cfg.workers = 3;
  cfg.output = (dir_ / "b.csv").string();
  const auto r3 = run_scan(cfg);
  EXPECT_EQ(r1.points.size(), 6u);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a.csv.manifest.json"));
}

TEST_F(ScanTest, ResumeAfterInterruptionIsByteIdentical) {
  auto cfg = small_config();
  cfg.output = (dir_ / "full.csv").string();
  run_scan(cfg);
  cfg.output = (dir_ / "part.csv").string();
  cfg.stop_after = 2;
  const auto first = run_scan(cfg);
  EXPECT_FALSE(first.complete);
  EXPECT_FALSE(fs::exists(dir_ / "part.csv"));
  cfg.stop_after = 0;
  cfg.resume = true;
  cfg.workers = 2;
  const auto second = run_scan(cfg);
  EXPECT_TRUE(second.complete);
  EXPECT_EQ(second.resumed, 2u);
  EXPECT_EQ(second.computed, 4u);
  EXPECT_EQ(slurp(dir_ / "full.csv"), slurp(dir_ / "part.csv"));
}

TEST_F(ScanTest, ResumeRefusesForeignCheckpoints) {
  auto cfg = small_config();
  cfg.output = (dir_ / "s.csv").string();
  cfg.stop_after = 1;
  run_scan(cfg);
  cfg.stop_after = 0;
  cfg.resume = true;
  cfg.window = 8.0;
  EXPECT_THROW(run_scan(cfg), DomainError);
  cfg.force = true;
  const auto r = run_scan(cfg);
  EXPECT_EQ(r.resumed, 0u);
  EXPECT_TRUE(r.complete);
}

TEST_F(ScanTest, FailingPointsBecomeGaps) {
  auto cfg = small_config();
  cfg.spec.modes[0].basis = BasisKind::sine_box;  // x^2 has no sine-box matrix
  cfg.g_max = 0.32;
  cfg.output = (dir_ / "gap.csv").string();
  const auto r = run_scan(cfg);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_TRUE(r.points[0].gap);
  EXPECT_FALSE(r.points[0].error.empty());
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "gap.csv.manifest.json"));
  EXPECT_EQ(manifest["gaps"].size(), 2u);
  const auto back = load_scan(cfg.output);
  ASSERT_EQ(back.points.size(), 2u);
  EXPECT_TRUE(back.points[1].gap);
}

TEST_F(ScanTest, CsvRoundTrip) {
  auto cfg = small_config();
  cfg.output = (dir_ / "rt.csv").string();
  const auto r = run_scan(cfg);
  const auto back = load_scan(cfg.output);
  ASSERT_EQ(back.points.size(), r.points.size());
  EXPECT_EQ(back.model, "E1");
  EXPECT_EQ(back.window, 9.0);
  EXPECT_EQ(back.config_hash, r.config_hash);
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    ASSERT_EQ(back.points[i].levels.size(), r.points[i].levels.size());
    for (std::size_t k = 0; k < r.points[i].levels.size(); ++k) {
      EXPECT_EQ(back.points[i].levels[k].value, r.points[i].levels[k].value);
    }
  }
}

TEST_F(ScanTest, CsvMissingColumnIsNotFound) {
  std::istringstream in("model,g,re,im\nE1,0.1,1,0\n");
  EXPECT_THROW(read_scan_csv(in), NotFoundError);
}

ScanResult synthetic_result(std::size_t onset, std::size_t n) {
  ScanResult r;
  r.g_step = 0.01;
  r.window = 16.0;
  for (std::size_t i = 0; i < n; ++i) {
    ScanPoint p;
    p.g = 0.01 * static_cast<double>(i);
    p.levels.push_back({1.0, 0.0, 0.0, {}});
    if (i >= onset) {
      p.levels.push_back({cplx(7.3, 0.2), 0.0, 0.0, {}});
      p.levels.push_back({cplx(7.3, -0.2), 0.0, 0.0, {}});
    }
    r.points.push_back(p);
  }
  return r;
}

TEST_F(ScanTest, CriticalEstimateIsTheGridMidpoint) {
  const auto est = critical_estimate(synthetic_result(5, 10));
  EXPECT_DOUBLE_EQ(est.g_onset, 0.045);
  EXPECT_DOUBLE_EQ(est.uncertainty, 0.015);
  EXPECT_FALSE(est.lower_bound_only);
  EXPECT_TRUE(critical_estimate(synthetic_result(0, 10)).upper_bound_only);
  EXPECT_TRUE(critical_estimate(synthetic_result(10, 10)).lower_bound_only);
}

TEST_F(ScanTest, OnsetDoesNotRiseWithTheWindow) {
  auto cfg = small_config();
  cfg.g_min = 0.30;
  cfg.g_max = 0.50;
  cfg.g_step = 0.04;
  cfg.window = 8.0;
  const auto narrow = critical_estimate(run_scan(cfg));
  cfg.window = 12.0;
  const auto wide = critical_estimate(run_scan(cfg));
  EXPECT_LE(wide.g_onset, narrow.g_onset);
}

}  // namespace
}  // namespace ptscan
