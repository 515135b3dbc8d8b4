#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "bubble/cli.hpp"

namespace bubble::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, std::string_view key) {
  const std::string_view v = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": cannot parse '" + std::string(v) + "' as a real number");
  }
  return out;
}

Eigen::Index parse_integer(std::string_view text, std::string_view key) {
  const std::string_view v = trim(text);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": cannot parse '" + std::string(v) + "' as an integer");
  }
  return static_cast<Eigen::Index>(out);
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_real(piece, what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

ScenarioConfig parse_config_text(std::string_view text) {
  ScenarioConfig config;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "mass") {
      config.mass = parse_real(value, key);
    } else if (key == "x_i") {
      config.source.center = parse_real(value, key);
    } else if (key == "x_f") {
      config.detector.center = parse_real(value, key);
    } else if (key == "sigma_i") {
      config.source.width = parse_real(value, key);
    } else if (key == "sigma_f") {
      config.detector.width = parse_real(value, key);
    } else if (key == "p_i") {
      config.source.momentum = parse_real(value, key);
    } else if (key == "p_f") {
      config.detector.momentum = parse_real(value, key);
    } else if (key == "t_i") {
      config.source.anchor_time = parse_real(value, key);
    } else if (key == "t_f") {
      config.detector.anchor_time = parse_real(value, key);
    } else if (key == "grid_l") {
      config.grid_length = parse_real(value, key);
    } else if (key == "grid_n") {
      config.grid_points = parse_integer(value, key);
    } else if (key == "delta_t") {
      config.delta_t = parse_real(value, key);
    } else if (key == "panel_times") {
      config.panel_times = parse_real_list(value, key);
    } else {
      throw ConfigError(key + ": unknown key (line " + std::to_string(line_no) + ")");
    }
  }
  config.validate();
  return config;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace bubble::cli
