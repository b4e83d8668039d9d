// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

// Serialization helpers shared by scan.cpp and scan_io.cpp (private).

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "ptscan/scan.hpp"

namespace ptscan::detail {

nlohmann::json point_to_json(const ScanPoint& p);
ScanPoint point_from_json(const nlohmann::json& j, const std::vector<Truncation>& ladder);

/// Writes `text` to `path` through a temporary file and a rename.
void write_atomically(const std::filesystem::path& path, const std::string& text);

std::string format_double(double v);

}  // namespace ptscan::detail
