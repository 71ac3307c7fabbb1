#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vortexsim/field.hpp"

namespace vortexsim {

using json = nlohmann::json;

// "NXxNY" or "NXxNY@PITCH_M"
struct GridOverride {
    int nx = 0;
    int ny = 0;
    std::optional<double> pitch;
};

GridOverride parse_grid_override(const std::string& text);

struct RunOptions {
    std::string out_dir = ".";
    std::optional<GridOverride> grid_override;
    std::optional<std::string> report_path;  // default <out_dir>/<scenario>_report.json
    bool write_files = true;
};

enum ExitCode : int { kExitPass = 0, kExitExpectation = 1, kExitUsage = 2, kExitSampling = 3 };

struct ScenarioOutcome {
    json report;
    int exit_code = kExitPass;
    std::string report_file;  // empty when nothing was written
};

// parse + validate; throws ParseError naming the offending field or line
json parse_scenario_text(const std::string& text, const std::string& origin);

// runs a validated scenario document; errors map onto exit codes instead of escaping
ScenarioOutcome run_scenario(const json& doc, const RunOptions& opts);
ScenarioOutcome run_scenario_file(const std::string& path, const RunOptions& opts);

const std::vector<std::pair<std::string, std::string>>& canned_scenarios();
std::vector<std::string> figure_names();
// throws ParseError listing the available panels for unknown names
const std::string& canned_scenario(const std::string& name);

ScenarioOutcome run_figure(const std::string& name, const RunOptions& opts);

// analysis report for a stored field
ScenarioOutcome measure_field_file(const std::string& path, const RunOptions& opts);

// report with its metadata block removed
json without_meta(const json& report);

}  // namespace vortexsim
