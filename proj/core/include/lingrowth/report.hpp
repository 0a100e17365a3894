#pragma once

#include "lingrowth/experiments.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace lingrowth {

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Every number rounded to 12 significant digits; object keys are sorted.
nlohmann::json canonicalize(const nlohmann::json& j);

/// Canonical JSON text (2-space indent, trailing newline).
std::string dump_canonical(const nlohmann::json& j);

/// Writes `path` (JSON) and a companion CSV of the records next to it
/// (same stem, .csv). Throws std::runtime_error naming the path on I/O failure.
void write_report(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport read_report(const std::filesystem::path& path);

/// Records table of the report as CSV.
std::string records_csv(const ExperimentReport& report);

} // namespace lingrowth
