// SPDX-License-Identifier: Apache-2.0
//
// report_io.hpp
// JSON scenario files and report/timeline serialisation.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucsim/sim_harness.hpp"

namespace ucsim {

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keys starting with '_' are treated as comments. Unknown keys are errors.
/// Throws ConfigInvalid with the JSON path of the bad field.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const Scenario& sc);

nlohmann::json report_to_json(const Report& r);
/// Throws ConfigInvalid on a structurally invalid document.
Report report_from_json(const nlohmann::json& j);

/// One row per node, then a link-summary row.
void write_report_csv(std::ostream& os, const Report& r);
/// One JSON object per line: time_s, time_ps, node, phase, action, detail, frame.
void write_timeline_jsonl(std::ostream& os, const std::vector<TimelineRecord>& timeline);

enum class ReportFormat { Json, Csv };

/// Writes the report to `path` in the given format; for JSON the timeline is
/// also written next to it as timeline.jsonl. Throws IoFailure.
void emit_report(const Report& r, ReportFormat format, const std::filesystem::path& path);

/// Stable text of report_to_json (2-space indent, trailing newline).
std::string report_json_text(const Report& r);

}  // namespace ucsim
