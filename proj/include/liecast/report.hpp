#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "liecast/lie_core.hpp"

namespace liecast {

inline constexpr const char* kReportSchema = "liecast-report/1";

struct Verdict {
  std::string name;
  bool pass = false;
  std::string note;
  std::vector<std::pair<std::string, double>> metrics;
};

// One scenario run, fully materialized before anything touches the disk so a
// failed run can never leave partial artifacts behind.
struct RunResults {
  std::string command;
  bool pass = true;  // AND over verdicts; an empty verdict list passes
  std::string report_json;
  std::vector<std::pair<std::string, std::string>> csv_files;  // name, content
};

// Serializes the versioned report document with sorted keys. extra_json must
// be empty or a serialized JSON object; its members are merged at top level
// (reserved keys cannot be overridden).
std::string render_report_json(
    const std::string& command, const std::string& family, int n,
    const std::string& variant, std::uint64_t seed,
    const std::vector<Verdict>& verdicts,
    const std::vector<std::pair<std::string, std::string>>& artifacts,
    const std::string& extra_json = "");

// Deterministic number formatting shared by every CSV writer.
std::string csv_number(double v);

// Writes report.json plus the CSV artifacts into out_dir (created if needed).
// Returns the written paths; throws Error when the directory is unwritable.
std::vector<std::string> emit_report(const RunResults& r,
                                     const std::string& out_dir);

}  // namespace liecast
