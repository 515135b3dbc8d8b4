#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <charconv>

#include "bubble/cli.hpp"

namespace bubble::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string times;
};

std::string shortest(double v) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
  return ec == std::errc() ? std::string(buffer, ptr) : format_real(v);
}

std::string format_brief(const char* fmt, double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, fmt, v);
  return buffer;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

void write_json(const fs::path& path, const ordered_json& doc) { write_file(path, doc.dump(2) + "\n"); }

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

ScenarioConfig load_config(const Options& o) {
  ScenarioConfig config = o.config_path.empty() ? parse_config_text("") : parse_config(o.config_path);
  if (!o.times.empty()) config.panel_times = parse_real_list(o.times, "--times");
  config.output_dir = o.out_dir;
  config.validate();
  return config;
}

void write_manifest(const fs::path& dir, const std::string& scenario, const ordered_json& config,
                    std::vector<ManifestEntry> own) {
  RunManifest manifest;
  manifest.config = config;
  manifest.scenario = scenario;
  manifest.files = carried_entries(dir, scenario);
  for (auto& e : own) manifest.files.push_back(std::move(e));
  write_json(dir / "manifest.json", manifest_json(manifest));
}

int run_bubble(ScenarioKind kind, const Options& o, std::ostream& out, std::ostream& err) {
  const ScenarioConfig config = load_config(o);
  const fs::path dir(o.out_dir);
  ScenarioReport report = kind == ScenarioKind::BubbleCI ? run_bubble_ci(config) : run_bubble_si(config);
  prepare_dir(dir);

  const bool ci = kind == ScenarioKind::BubbleCI;
  const std::string scenario = to_string(kind);
  std::vector<ManifestEntry> entries;
  for (auto& panel : report.panels) {
    panel.file = std::string(ci ? "panel_ci_t" : "panel_si_t") + shortest(panel.time) + ".csv";
    write_file(dir / panel.file, panel_csv(panel.profile));
    entries.push_back({panel.file, "panel", scenario, panel.label, ci ? "CI" : "SI", panel.time});
  }
  write_json(dir / "report.json", report_json(report));
  entries.push_back({"report.json", "report", scenario, "", "", 0.0});
  write_manifest(dir, scenario, config_json(config), std::move(entries));

  const auto& tr = report.transition;
  const char* a_name = ci ? "A" : "A_s";
  const char* p_name = ci ? "P" : "P_s";
  out << scenario << ": " << a_name << '=' << format_brief("%.6f", tr.amplitude.real())
      << format_brief("%+.6f", tr.amplitude.imag()) << "i " << p_name << '=' << format_brief("%.6f", tr.probability)
      << " drift=" << format_brief("%.3g", tr.max_drift) << " oracle_gap=" << format_brief("%.3g", tr.oracle_gap)
      << '\n';

  if (!(tr.oracle_gap <= kOracleTolerance) || !(tr.max_drift <= kIdentityTolerance) ||
      !(report.conservation.max_local_residual <= kResidualTolerance)) {
    err << "bubble: amplitude invariants violated (oracle_gap=" << tr.oracle_gap << ", drift=" << tr.max_drift
        << ", residual=" << report.conservation.max_local_residual << ")\n";
    return 2;
  }
  return 0;
}

int run_zitter(const Options& o, std::ostream& out) {
  const ScenarioConfig scenario_config = load_config(o);
  ZitterConfig config;
  config.mass = scenario_config.mass;
  config.grid_length = scenario_config.grid_length;
  config.grid_points = scenario_config.grid_points;
  const ZitterReport report = run_zitterbewegung(config);
  const fs::path dir(o.out_dir);
  prepare_dir(dir);

  std::string series = "t,ci,si_re,si_im,retarded\n";
  for (Eigen::Index n = 0; n < report.times.size(); ++n) {
    series += format_real(report.times[n]) + ',' + format_real(report.ci_series[n]) + ',' +
              format_real(report.si_re_series[n]) + ',' + format_real(report.si_im_series[n]) + ',' +
              format_real(report.retarded_series[n]) + '\n';
  }
  write_file(dir / "zitter_series.csv", series);
  write_json(dir / "report.json", zitter_report_json(report));
  const std::string scenario = to_string(ScenarioKind::Zitterbewegung);
  write_manifest(dir, scenario, config_json(scenario_config),
                 {{"zitter_series.csv", "series", scenario, "", "", 0.0}, {"report.json", "report", scenario, "", "", 0.0}});

  out << scenario << ": ci_freq=" << format_brief("%.6f", report.ci_peak.omega)
      << " si_band_ratio=" << format_brief("%.3g", std::max(report.si_re_band_ratio, report.si_im_band_ratio))
      << " ratio=" << format_brief("%.3g", report.peak_power_ratio()) << '\n';
  return 0;
}

int run_check(const Options& o, std::ostream& out, std::ostream& err) {
  const ScenarioConfig config = load_config(o);
  const CheckReport report = run_check_suite(config);
  const fs::path dir(o.out_dir);
  prepare_dir(dir);
  write_json(dir / "report.json", check_report_json(report));
  const std::string scenario = to_string(ScenarioKind::Check);
  write_manifest(dir, scenario, config_json(config), {{"report.json", "report", scenario, "", "", 0.0}});

  std::size_t passed = 0;
  for (const auto& item : report.items) {
    if (item.passed) {
      ++passed;
    } else {
      err << "check failed: " << item.name << " = " << item.value << " > " << item.tolerance << '\n';
    }
  }
  out << scenario << ": " << passed << '/' << report.items.size() << " passed\n";
  return report.all_passed() ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retarded/advanced Klein-Gordon wavepacket experiments", "bubble"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory")->required();
    sub->add_option("--times", o.times, "comma-separated panel times");
  };
  add_common(app.add_subcommand("bubble-ci", "single-field run with collapse at t_f"));
  add_common(app.add_subcommand("bubble-si", "retarded x advanced amplitude density run"));
  add_common(app.add_subcommand("zitter", "interference-frequency contrast"));
  add_common(app.add_subcommand("check", "conservation, oracle and time-reversal suites"));

  std::vector<const char*> argv;
  argv.push_back("bubble");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    if (o.command == "bubble-ci") return run_bubble(ScenarioKind::BubbleCI, o, out, err);
    if (o.command == "bubble-si") return run_bubble(ScenarioKind::BubbleSI, o, out, err);
    if (o.command == "zitter") return run_zitter(o, out);
    return run_check(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace bubble::cli
