#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "bubble/cli.hpp"

namespace bubble::cli {

namespace {

using nlohmann::ordered_json;

ordered_json real_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json panels_json(const std::vector<PanelRecord>& panels) {
  ordered_json out = ordered_json::array();
  for (const auto& p : panels) {
    ordered_json entry;
    entry["t"] = p.time;
    entry["file"] = p.file;
    entry["label"] = p.label;
    entry["centroid"] = p.moments.mean;
    entry["std"] = p.moments.std;
    entry["collapsed"] = p.collapsed;
    entry["symmetry_defect"] = p.symmetry_defect;
    out.push_back(std::move(entry));
  }
  return out;
}

ordered_json conservation_json(const ConservationReport& c) {
  ordered_json out;
  ordered_json samples = ordered_json::array();
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    samples.push_back({{"t", c.times[i]}, {"re", c.integrals[i].real()}, {"im", c.integrals[i].imag()}});
  }
  out["integrals"] = std::move(samples);
  out["max_global_drift"] = c.max_global_drift;
  out["max_local_residual"] = c.max_local_residual;
  return out;
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_real: buffer too small");
  return std::string(buffer, ptr);
}

std::string panel_csv(const DensityProfile& profile) {
  std::string out = "x,re,im\n";
  out.reserve(static_cast<std::size_t>(profile.rho.size()) * 56 + 8);
  const bool single_field = profile.kind == ProfileKind::CI;
  for (Eigen::Index n = 0; n < profile.rho.size(); ++n) {
    out += format_real(profile.grid.x(n));
    out += ',';
    out += format_real(profile.rho[n].real());
    out += ',';
    out += single_field ? std::string("0") : format_real(profile.rho[n].imag());
    out += '\n';
  }
  return out;
}

ordered_json config_json(const ScenarioConfig& c) {
  ordered_json out;
  out["mass"] = c.mass;
  out["x_i"] = c.source.center;
  out["x_f"] = c.detector.center;
  out["sigma_i"] = c.source.width;
  out["sigma_f"] = c.detector.width;
  out["p_i"] = c.source.momentum;
  out["p_f"] = c.detector.momentum;
  out["t_i"] = c.t_i();
  out["t_f"] = c.t_f();
  out["grid_l"] = c.grid_length;
  out["grid_n"] = c.grid_points;
  out["delta_t"] = c.delta_t;
  out["panel_times"] = c.effective_panel_times();
  return out;
}

ordered_json report_json(const ScenarioReport& r) {
  ordered_json out;
  out["scenario"] = to_string(r.kind);
  out["a_re"] = r.transition.amplitude.real();
  out["a_im"] = r.transition.amplitude.imag();
  out["p"] = r.transition.probability;
  out["drift"] = r.transition.max_drift;
  out["oracle_gap"] = r.transition.oracle_gap;
  out["oracle_re"] = r.transition.oracle_amplitude.real();
  out["oracle_im"] = r.transition.oracle_amplitude.imag();
  out["symmetry_defect_re"] = r.symmetry_defect_re;
  out["symmetry_defect_im"] = r.symmetry_defect_im;
  if (r.kind == ScenarioKind::BubbleSI) {
    out["continuity"] = r.continuity;
    out["continuity_bound"] = r.continuity_bound;
  }
  out["conservation"] = conservation_json(r.conservation);
  out["panels"] = panels_json(r.panels);
  return out;
}

ordered_json zitter_report_json(const ZitterReport& r) {
  ordered_json out;
  out["scenario"] = to_string(ScenarioKind::Zitterbewegung);
  out["zitter_ci_freq"] = r.ci_peak.omega;
  out["zitter_ratio"] = real_or_null(r.peak_power_ratio());
  out["ci_peak_power"] = r.ci_peak.power;
  out["si_re_band_ratio"] = r.si_re_band_ratio;
  out["si_im_band_ratio"] = r.si_im_band_ratio;
  out["retarded_band_ratio"] = r.retarded_band_ratio;
  out["band_lo"] = r.band_lo;
  out["band_hi"] = r.band_hi;
  out["samples"] = r.times.size();
  out["panels"] = ordered_json::array();
  return out;
}

ordered_json check_report_json(const CheckReport& r) {
  ordered_json out;
  out["scenario"] = to_string(ScenarioKind::Check);
  out["passed"] = r.all_passed();
  ordered_json items = ordered_json::array();
  for (const auto& item : r.items) {
    items.push_back({{"name", item.name},
                     {"value", real_or_null(item.value)},
                     {"tolerance", item.tolerance},
                     {"passed", item.passed}});
  }
  out["checks"] = std::move(items);
  out["panels"] = ordered_json::array();
  return out;
}

ordered_json manifest_json(const RunManifest& m) {
  ordered_json out;
  out["tool"] = "bubble";
  out["version"] = m.version;
  out["scenario"] = m.scenario;
  out["config"] = m.config;
  ordered_json files = ordered_json::array();
  for (const auto& f : m.files) {
    ordered_json entry;
    entry["path"] = f.path;
    entry["kind"] = f.kind;
    entry["scenario"] = f.scenario;
    if (f.kind == "panel") {
      entry["label"] = f.label;
      entry["row"] = f.row;
      entry["t"] = f.time;
    }
    files.push_back(std::move(entry));
  }
  out["files"] = std::move(files);
  return out;
}

std::vector<ManifestEntry> carried_entries(const std::filesystem::path& dir, const std::string& scenario) {
  std::vector<ManifestEntry> out;
  const auto path = dir / "manifest.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  const ordered_json previous = ordered_json::parse(in, nullptr, false);
  if (previous.is_discarded() || !previous.contains("files") || !previous["files"].is_array()) return out;
  for (const auto& f : previous["files"]) {
    if (!f.is_object()) continue;
    const std::string kind = f.value("kind", "");
    const std::string owner = f.value("scenario", "");
    const std::string file = f.value("path", "");
    if (kind != "panel" || owner == scenario || file.empty()) continue;
    if (!std::filesystem::exists(dir / file)) continue;
    out.push_back({file, kind, owner, f.value("label", ""), f.value("row", ""), f.value("t", 0.0)});
  }
  return out;
}

}  // namespace bubble::cli
