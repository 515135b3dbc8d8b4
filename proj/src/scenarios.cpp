#include "bubble/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace bubble {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> equispaced(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

void require_contained(const Field& field, const char* what, double t) {
  const double tail = tail_fraction(field);
  if (tail >= kTailTolerance) {
    throw NumericalError(std::string(what) + " reaches the grid boundary at t=" + std::to_string(t) +
                         " (tail fraction " + std::to_string(tail) + ")");
  }
}

void require_finite(double v, const char* key) {
  if (!std::isfinite(v)) throw ConfigError(std::string(key) + ": value must be finite");
}

std::string panel_label(char first, std::size_t index, const char* row) {
  if (index < 4) return std::string(1, static_cast<char>(first + index));
  return std::string(row) + std::to_string(index);
}

PanelRecord make_panel(std::string label, double t, bool collapsed, DensityProfile profile, double center) {
  const Moments<double> moments = centroid_and_std(profile, ProfilePart::Real);
  const double defect = symmetry_defect(profile, ProfilePart::Real, center);
  return PanelRecord{std::move(label), t, collapsed, std::move(profile), moments, defect, {}};
}

ConservationReport ci_conservation(const Wavepacket& psi, const ScenarioConfig& config, double* norm_error) {
  const auto times = equispaced(config.t_i(), config.t_f(), 9);
  std::vector<std::complex<double>> integrals;
  double worst_norm = 0.0;
  for (const double t : times) {
    const auto value = integrate_profile(ci_density_current(evolve_to(psi, t)));
    worst_norm = std::max(worst_norm, std::abs(value - 1.0));
    integrals.push_back(value);
  }
  double residual = 0.0;
  for (const double t : {config.t_i(), config.t_m(), config.t_f()}) {
    residual = std::max(residual, local_conservation_residual(psi, t));
  }
  if (norm_error) *norm_error = worst_norm;
  return make_conservation_report(times, std::move(integrals), residual);
}

ConservationReport si_conservation(const Wavepacket& psi, const Wavepacket& adv, const ScenarioConfig& config) {
  const auto times = equispaced(config.t_i(), config.t_f(), 9);
  std::vector<std::complex<double>> integrals;
  for (const double t : times) {
    integrals.push_back(integrate_profile(si_density_current(evolve_to(psi, t), evolve_to(adv, t))));
  }
  double residual = 0.0;
  for (const double t : {config.t_i(), config.t_m(), config.t_f()}) {
    residual = std::max(residual, local_conservation_residual(psi, adv, t));
  }
  return make_conservation_report(times, std::move(integrals), residual);
}

}  // namespace

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::BubbleCI:
      return "bubble-ci";
    case ScenarioKind::BubbleSI:
      return "bubble-si";
    case ScenarioKind::Zitterbewegung:
      return "zitter";
    case ScenarioKind::Check:
      return "check";
  }
  return "unknown";
}

std::vector<double> ScenarioConfig::effective_panel_times() const {
  if (!panel_times.empty()) return panel_times;
  return {t_i(), t_m(), t_f() - delta_t, t_f()};
}

void ScenarioConfig::validate() const {
  require_finite(mass, "mass");
  if (!(mass > 0)) throw ConfigError("mass: must be positive");
  require_finite(source.center, "x_i");
  require_finite(detector.center, "x_f");
  require_finite(source.width, "sigma_i");
  if (!(source.width > 0)) throw ConfigError("sigma_i: must be positive");
  require_finite(detector.width, "sigma_f");
  if (!(detector.width > 0)) throw ConfigError("sigma_f: must be positive");
  require_finite(source.momentum, "p_i");
  require_finite(detector.momentum, "p_f");
  require_finite(source.anchor_time, "t_i");
  require_finite(detector.anchor_time, "t_f");
  if (!(t_f() > t_i())) throw ConfigError("t_f: must be later than t_i");
  require_finite(grid_length, "grid_l");
  if (!(grid_length > 0)) throw ConfigError("grid_l: must be positive");
  if (grid_points < 16 || (grid_points & (grid_points - 1)) != 0) {
    throw ConfigError("grid_n: must be a power of two >= 16");
  }
  require_finite(delta_t, "delta_t");
  if (!(delta_t > 0) || !(delta_t < 0.5 * (t_f() - t_i()))) {
    throw ConfigError("delta_t: must lie in (0, (t_f - t_i)/2)");
  }
  for (const double t : panel_times) {
    if (!std::isfinite(t) || t < t_i() || t > t_f()) throw ConfigError("panel_times: every time must lie in [t_i, t_f]");
  }
  if (source.target_norm != +1) throw ConfigError("source condition must be normalized to +1");
  if (detector.target_norm != -1) throw ConfigError("detector condition must be normalized to -1");
}

Wavepacket detector_retarded_packet(const GaussianSpec& detector, const Grid1D& grid, double mass) {
  GaussianSpec retarded = detector;
  if (detector.target_norm == -1) {
    retarded.momentum = -detector.momentum;
    retarded.target_norm = +1;
  }
  return build_retarded_gaussian(retarded, grid, mass);
}

Snapshot apply_collapse(const Snapshot& pre_measurement, const GaussianSpec& detector) {
  return evolve_to(detector_retarded_packet(detector, pre_measurement.grid, pre_measurement.mass),
                   pre_measurement.time);
}

ScenarioReport run_bubble_ci(const ScenarioConfig& config) {
  const auto start = Clock::now();
  config.validate();
  const Grid1D grid = config.grid();
  const double m = config.mass;
  const Wavepacket psi = build_retarded_gaussian(config.source, grid, m);
  const Wavepacket chi = detector_retarded_packet(config.detector, grid, m);

  ScenarioReport report;
  report.kind = ScenarioKind::BubbleCI;

  const auto times = config.effective_panel_times();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const bool collapsed = t >= config.t_f();
    const Snapshot s = collapsed ? apply_collapse(evolve_to(psi, t), config.detector) : evolve_to(psi, t);
    require_contained(s.psi, "retarded packet", t);
    report.panels.push_back(
        make_panel(panel_label('a', i, "ci"), t, collapsed, ci_density_current(s), config.x_mid()));
  }

  const Snapshot before = evolve_to(psi, config.t_f());
  const Snapshot after = apply_collapse(before, config.detector);
  auto& tr = report.transition;
  tr.amplitude = ci_transition_amplitude(before, after);
  tr.probability = transition_probability(tr.amplitude);
  tr.samples = {{config.t_f(), tr.amplitude}};
  tr.max_drift = 0.0;
  tr.oracle_amplitude = momentum_space_overlap(chi, psi);
  tr.oracle_gap = std::abs(tr.amplitude - tr.oracle_amplitude);

  report.conservation = ci_conservation(psi, config, nullptr);

  const DensityProfile mid = ci_density_current(evolve_to(psi, config.t_m()));
  report.symmetry_defect_re = symmetry_defect(mid, ProfilePart::Real, config.x_mid());
  report.symmetry_defect_im = symmetry_defect(mid, ProfilePart::Imag, config.x_mid());
  report.wall_seconds = seconds_since(start);
  return report;
}

ScenarioReport run_bubble_si(const ScenarioConfig& config) {
  const auto start = Clock::now();
  config.validate();
  const Grid1D grid = config.grid();
  const double m = config.mass;
  const Wavepacket psi = build_retarded_gaussian(config.source, grid, m);
  const Wavepacket adv = build_advanced_gaussian(config.detector, grid, m);

  ScenarioReport report;
  report.kind = ScenarioKind::BubbleSI;

  auto profile_at = [&](double t) {
    const Snapshot r = evolve_to(psi, t);
    const Snapshot a = evolve_to(adv, t);
    require_contained(r.psi, "retarded packet", t);
    require_contained(a.psi, "advanced packet", t);
    return si_density_current(r, a);
  };

  const auto times = config.effective_panel_times();
  for (std::size_t i = 0; i < times.size(); ++i) {
    report.panels.push_back(make_panel(panel_label('e', i, "si"), times[i], false, profile_at(times[i]),
                                       config.x_mid()));
  }

  report.transition = si_transition_amplitude(psi, adv, equispaced(config.t_i(), config.t_f(), 9));
  report.conservation = si_conservation(psi, adv, config);

  const DensityProfile mid = profile_at(config.t_m());
  report.symmetry_defect_re = symmetry_defect(mid, ProfilePart::Real, config.x_mid());
  report.symmetry_defect_im = symmetry_defect(mid, ProfilePart::Imag, config.x_mid());

  const DensityProfile at_measurement = profile_at(config.t_f());
  const DensityProfile just_before = profile_at(config.t_f() - config.delta_t);
  const double scale = at_measurement.rho.cwiseAbs().maxCoeff();
  report.continuity = (at_measurement.rho - just_before.rho).cwiseAbs().maxCoeff() / scale;
  report.continuity_bound = dispersion_omega(grid.k_max(), m) * config.delta_t;
  report.wall_seconds = seconds_since(start);
  return report;
}

ConservationSuite run_conservation_suite(const ScenarioConfig& config) {
  config.validate();
  const Grid1D grid = config.grid();
  const Wavepacket psi = build_retarded_gaussian(config.source, grid, config.mass);
  const Wavepacket adv = build_advanced_gaussian(config.detector, grid, config.mass);
  ConservationSuite suite;
  suite.ci = ci_conservation(psi, config, &suite.ci_norm_error);
  suite.si = si_conservation(psi, adv, config);
  return suite;
}

std::pair<double, double> time_reversal_check(const ScenarioConfig& config) {
  config.validate();
  return time_reversal_check(config.source, config.detector, config.grid(), config.mass);
}

double ZitterReport::peak_power_ratio() const {
  const double worst = std::max(si_re_band_ratio, si_im_band_ratio);
  return worst > 0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

ZitterReport run_zitterbewegung(const ZitterConfig& config) {
  const auto start = Clock::now();
  if (!(config.mass > 0)) throw ConfigError("zitter mass must be positive");
  if (!(config.width > 0) || !(config.advanced_width_ratio > 0)) throw ConfigError("zitter widths must be positive");
  const double period = std::numbers::pi / config.mass;  // of the 2m line
  if (config.duration < 20.0 * period * (1.0 - 1e-12)) {
    throw ConfigError("zitter duration must cover at least 20 periods of 2m");
  }
  if (static_cast<double>(config.samples) * period / config.duration < 16.0) {
    throw ConfigError("zitter sampling must resolve at least 16 samples per period of 2m");
  }

  const Grid1D grid = make_grid(config.grid_length, config.grid_points);
  const double m = config.mass;
  const Wavepacket psi = build_retarded_gaussian(GaussianSpec{config.probe, config.width, 0.0, 0.0, +1}, grid, m);
  const Wavepacket adv = build_advanced_gaussian(
      GaussianSpec{config.probe, config.width * config.advanced_width_ratio, 0.0, 0.0, -1}, grid, m);

  // Point evaluation at the probe: f(x) = (1/L) sum_j a_j exp(i k_j x).
  const RealArrayT<double> omega = dispersion_omega(grid, m);
  auto probe_coefficients = [&](const Wavepacket& p) {
    Field c(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
      c[j] = p.spectrum()[j] * std::polar(1.0, grid.k(j) * config.probe) / grid.length();
    }
    return c;
  };
  const Field c_ret = probe_coefficients(psi);
  const Field c_adv = probe_coefficients(adv);

  ZitterReport report;
  const Eigen::Index count = config.samples;
  report.times.resize(count);
  report.ci_series.resize(count);
  report.si_re_series.resize(count);
  report.si_im_series.resize(count);
  report.retarded_series.resize(count);
  const std::complex<double> half_i_over_m(0, 0.5 / m);
  for (Eigen::Index n = 0; n < count; ++n) {
    const double t = config.duration * static_cast<double>(n) / static_cast<double>(count);
    std::complex<double> r(0), dr(0), a(0), da(0);
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
      const std::complex<double> fwd = c_ret[j] * std::polar(1.0, -omega[j] * t);
      const std::complex<double> bwd = c_adv[j] * std::polar(1.0, omega[j] * t);
      r += fwd;
      dr += fwd * std::complex<double>(0, -omega[j]);
      a += bwd;
      da += bwd * std::complex<double>(0, omega[j]);
    }
    const std::complex<double> theta = (r + a) / std::numbers::sqrt2;
    const std::complex<double> dtheta = (dr + da) / std::numbers::sqrt2;
    const std::complex<double> rho_s = half_i_over_m * (a * dr - r * da);
    report.times[n] = t;
    report.ci_series[n] = -std::imag(std::conj(theta) * dtheta) / m;
    report.si_re_series[n] = rho_s.real();
    report.si_im_series[n] = rho_s.imag();
    report.retarded_series[n] = -std::imag(std::conj(r) * dr) / m;
  }

  // Interference line searched above m.
  const PowerSpectrum ci_spec = power_spectrum(report.times, report.ci_series);
  const PowerSpectrum si_re_spec = power_spectrum(report.times, report.si_re_series);
  const PowerSpectrum si_im_spec = power_spectrum(report.times, report.si_im_series);
  const PowerSpectrum ret_spec = power_spectrum(report.times, report.retarded_series);
  report.ci_peak = dominant_frequency(ci_spec, m);
  report.si_re_peak = dominant_frequency(si_re_spec, m);
  const double centre = report.ci_peak.flat ? 2.0 * m : report.ci_peak.omega;
  report.band_lo = 0.9 * centre;
  report.band_hi = 1.1 * centre;
  const double ci_power = report.ci_peak.power;
  if (!(ci_power > 0)) throw NumericalError("zitter: mixed-state series has no spectral peak");
  report.si_re_band_ratio = band_peak_power(si_re_spec, report.band_lo, report.band_hi) / ci_power;
  report.si_im_band_ratio = band_peak_power(si_im_spec, report.band_lo, report.band_hi) / ci_power;
  report.retarded_band_ratio = band_peak_power(ret_spec, report.band_lo, report.band_hi) / ci_power;
  report.wall_seconds = seconds_since(start);
  return report;
}

ScenarioConfig random_gaussian_config(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    // 53-bit uniform in [0, 1).
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  ScenarioConfig config;
  config.source = GaussianSpec{uniform(-150, -50), uniform(2.0, 5.0), uniform(0.5, 2.0), 0.0, +1};
  config.detector = GaussianSpec{uniform(50, 150), uniform(2.0, 5.0), uniform(-2.0, -0.5), uniform(150, 300), -1};
  return config;
}

bool CheckReport::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.passed; });
}

CheckReport run_check_suite(const ScenarioConfig& config) {
  config.validate();
  CheckReport report;
  auto add = [&report](std::string name, double value, double tol) {
    report.items.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
  };

  const ConservationSuite suite = run_conservation_suite(config);
  add("ci_norm_error", suite.ci_norm_error, kIdentityTolerance);
  add("ci_global_drift", suite.ci.max_global_drift, kIdentityTolerance);
  add("ci_local_residual", suite.ci.max_local_residual, kResidualTolerance);
  add("si_global_drift", suite.si.max_global_drift, kIdentityTolerance);
  add("si_local_residual", suite.si.max_local_residual, kResidualTolerance);

  const Grid1D grid = config.grid();
  const Wavepacket psi = build_retarded_gaussian(config.source, grid, config.mass);
  const Wavepacket adv = build_advanced_gaussian(config.detector, grid, config.mass);
  const TransitionResult si = si_transition_amplitude(psi, adv, equispaced(config.t_i(), config.t_f(), 5));
  add("oracle_gap", si.oracle_gap, kOracleTolerance);
  add("probability_consistency", std::abs(si.probability - std::norm(si.amplitude)) / si.probability, 1e-12);

  const Snapshot before = evolve_to(psi, config.t_f());
  const std::complex<double> a_ci = ci_transition_amplitude(before, apply_collapse(before, config.detector));
  add("ci_si_agreement", std::abs(a_ci - si.amplitude), kIdentityTolerance);

  const auto [forward, exchanged] = time_reversal_check(config);
  add("time_reversal", std::abs(forward - exchanged), kIdentityTolerance);

  double worst_oracle = 0.0, worst_reversal = 0.0, worst_excess = 0.0;
  for (int seed = 1; seed <= kSeededSuiteSize; ++seed) {
    const ScenarioConfig rc = random_gaussian_config(static_cast<std::uint64_t>(seed));
    const Grid1D rgrid = rc.grid();
    const Wavepacket r = build_retarded_gaussian(rc.source, rgrid, rc.mass);
    const Wavepacket a = build_advanced_gaussian(rc.detector, rgrid, rc.mass);
    const TransitionResult tr = si_transition_amplitude(r, a, {rc.t_i()});
    worst_oracle = std::max(worst_oracle, tr.oracle_gap);
    worst_excess = std::max(worst_excess, std::abs(tr.amplitude) - 1.0);
    const auto [pf, pb] = time_reversal_check(rc.source, rc.detector, rgrid, rc.mass);
    worst_reversal = std::max(worst_reversal, std::abs(pf - pb));
  }
  add("seeded_oracle_gap", worst_oracle, kOracleTolerance);
  add("seeded_time_reversal", worst_reversal, kIdentityTolerance);
  add("seeded_amplitude_bound", worst_excess, kIdentityTolerance);
  return report;
}

}  // namespace bubble
