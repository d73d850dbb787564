#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbf/core.hpp"

namespace dbf::cli {

/// Reads an `index,value` CSV (header required). Errors carry the path and
/// the 1-based line number.
TimeSeries read_series_csv(const std::filesystem::path& path);

std::string series_csv(std::span<const double> values, long origin_index = 1);

/// Writes to a sibling temp file and renames it into place, so a failed
/// command never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Stable serialization: sorted keys, two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Shortest round-trip decimal for a double.
std::string format_double(double value);

}  // namespace dbf::cli
