#pragma once

// End-to-end runs of the bubble experiment (single-field and
// retarded x advanced pipelines), the interference-frequency contrast and the
// conservation / oracle / time-reversal checks.

#include <cstdint>
#include <string>
#include <vector>

#include "bubble/amplitudes.hpp"
#include "bubble/frequency.hpp"
#include "bubble/observables.hpp"
#include "bubble/spectral.hpp"
#include "bubble/wavepacket.hpp"

namespace bubble {

struct ScenarioConfig {
  double mass{1.0};
  GaussianSpec source{-100.0, 2.8284271247461903, 1.5, 0.0, +1};
  GaussianSpec detector{100.0, 2.8284271247461903, -1.5, 240.0, -1};
  /// Empty means {t_i, t_m, t_f - delta_t, t_f}.
  std::vector<double> panel_times;
  double grid_length{1024.0};
  Eigen::Index grid_points{8192};
  double delta_t{1e-3};
  std::string output_dir;

  double t_i() const { return source.anchor_time; }
  double t_f() const { return detector.anchor_time; }
  double t_m() const { return 0.5 * (t_i() + t_f()); }
  double x_mid() const { return 0.5 * (source.center + detector.center); }
  Grid1D grid() const { return make_grid(grid_length, grid_points); }
  std::vector<double> effective_panel_times() const;

  /// Throws ConfigError naming the offending config key.
  void validate() const;
};

enum class ScenarioKind { BubbleCI, BubbleSI, Zitterbewegung, Check };

const char* to_string(ScenarioKind kind);

struct PanelRecord {
  std::string label;  // a-d single-field row, e-h amplitude-density row
  double time{0};
  bool collapsed{false};
  DensityProfile profile;
  Moments<double> moments{0, 0};  // of Re rho
  double symmetry_defect{0};      // Re rho about the source-detector midpoint
  std::string file;               // filled in when written
};

struct ScenarioReport {
  ScenarioKind kind{ScenarioKind::BubbleSI};
  TransitionResult transition;
  ConservationReport conservation;
  std::vector<PanelRecord> panels;
  /// Midpoint symmetry at t_m: Re and Im of rho (rho_s for the SI run).
  double symmetry_defect_re{0};
  double symmetry_defect_im{0};
  /// max |rho_s(t_f) - rho_s(t_f - dt)| / max |rho_s(t_f)| and its bound w_max dt.
  double continuity{0};
  double continuity_bound{0};
  double wall_seconds{0};
};

/// Retarded packet built from the detector condition. Accepts the detector in
/// advanced form (target norm -1, carrying the advanced momentum) or directly
/// in retarded form.
Wavepacket detector_retarded_packet(const GaussianSpec& detector, const Grid1D& grid, double mass);

/// Replaces the pre-measurement state by the detector packet at the same time.
Snapshot apply_collapse(const Snapshot& pre_measurement, const GaussianSpec& detector);

ScenarioReport run_bubble_ci(const ScenarioConfig& config);
ScenarioReport run_bubble_si(const ScenarioConfig& config);

struct ConservationSuite {
  ConservationReport ci;
  ConservationReport si;
  /// Worst |integral - 1| over the CI samples.
  double ci_norm_error{0};
};

/// Global integrals at 9 equispaced times in [t_i, t_f] and local residuals
/// at t_i, t_m, t_f for both densities.
ConservationSuite run_conservation_suite(const ScenarioConfig& config);

std::pair<double, double> time_reversal_check(const ScenarioConfig& config);

struct ZitterConfig {
  double mass{1.0};
  double width{2.8284271247461903};
  /// Width of the advanced component relative to the retarded one.
  double advanced_width_ratio{2.0};
  double probe{0.0};
  double duration{64.0};
  Eigen::Index samples{1024};
  double grid_length{1024.0};
  Eigen::Index grid_points{8192};
};

struct ZitterReport {
  RealArrayT<double> times;
  RealArrayT<double> ci_series;       // rho of (Psi + Phi*)/sqrt(2) at the probe
  RealArrayT<double> si_re_series;    // Re rho_s of (Psi, Phi*) at the probe
  RealArrayT<double> si_im_series;
  RealArrayT<double> retarded_series; // rho of Psi alone
  FrequencyPeak ci_peak;
  FrequencyPeak si_re_peak;
  double band_lo{0};
  double band_hi{0};
  double si_re_band_ratio{0};
  double si_im_band_ratio{0};
  double retarded_band_ratio{0};
  double wall_seconds{0};

  /// CI peak power over the worst SI band power.
  double peak_power_ratio() const;
};

ZitterReport run_zitterbewegung(const ZitterConfig& config);

/// Seeded random source/detector pair on the default grid.
ScenarioConfig random_gaussian_config(std::uint64_t seed);

struct CheckItem {
  std::string name;
  double value{0};
  double tolerance{0};
  bool passed{false};
};

struct CheckReport {
  std::vector<CheckItem> items;
  bool all_passed() const;
};

inline constexpr int kSeededSuiteSize = 20;
inline constexpr double kIdentityTolerance = 1e-9;
inline constexpr double kOracleTolerance = 1e-8;
inline constexpr double kResidualTolerance = 1e-8;

/// Conservation, oracle equivalence and time-reversal over the given config
/// and the seeded random suite.
CheckReport run_check_suite(const ScenarioConfig& config);

}  // namespace bubble
