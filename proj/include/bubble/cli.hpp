#pragma once

// Command-line front end: config files, panel CSVs, report/manifest JSON.
//
// Config: one `key = value` per line, `#` starts a comment. Keys: mass, x_i,
// x_f, sigma_i, sigma_f, p_i, p_f, t_i, t_f, grid_l, grid_n, delta_t,
// panel_times (comma-separated). Omitted keys keep the defaults of
// ScenarioConfig.

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bubble/scenarios.hpp"

namespace bubble::cli {

inline constexpr const char* kToolVersion = "1.0.0";

ScenarioConfig parse_config_text(std::string_view text);
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Comma-separated list of reals; `what` names the source in error messages.
std::vector<double> parse_real_list(std::string_view text, std::string_view what);

/// 17 significant digits, shortest form that parsing restores exactly.
std::string format_real(double value);

/// Header `x,re,im`, one row per grid point; single-field panels write im = 0.
std::string panel_csv(const DensityProfile& profile);

nlohmann::ordered_json config_json(const ScenarioConfig& config);
nlohmann::ordered_json report_json(const ScenarioReport& report);
nlohmann::ordered_json zitter_report_json(const ZitterReport& report);
nlohmann::ordered_json check_report_json(const CheckReport& report);

struct ManifestEntry {
  std::string path;
  std::string kind;  // panel, report, series
  std::string scenario;
  std::string label;
  std::string row;   // CI or SI for panels
  double time{0};
};

struct RunManifest {
  nlohmann::ordered_json config;
  std::vector<ManifestEntry> files;
  std::string version{kToolVersion};
  std::string scenario;
};

nlohmann::ordered_json manifest_json(const RunManifest& manifest);

/// Entries of an existing manifest in `dir` from other scenarios whose files
/// still exist, so CI and SI runs into one directory share a manifest.
std::vector<ManifestEntry> carried_entries(const std::filesystem::path& dir, const std::string& scenario);

/// Exit codes: 0 success, 1 usage/config/IO error, 2 numerical invariant failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bubble::cli
