#pragma once

// Peak extraction from uniformly sampled real time series.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "bubble/spectral.hpp"

namespace bubble {

template <typename Scalar>
struct BasicPowerSpectrum {
  RealArrayT<Scalar> omega;  // angular frequency of bins 0..M/2
  RealArrayT<Scalar> power;
  Scalar signal_scale{0};    // M * max |detrended sample|, for the flatness test
};

template <typename Scalar>
struct BasicFrequencyPeak {
  Scalar omega{0};
  Scalar power{0};
  bool flat{false};
};

using PowerSpectrum = BasicPowerSpectrum<double>;
using FrequencyPeak = BasicFrequencyPeak<double>;

/// Least-squares linear detrend, 4-term Blackman-Harris window, |DFT|^2.
template <typename Scalar>
BasicPowerSpectrum<Scalar> power_spectrum(const RealArrayT<Scalar>& times, const RealArrayT<Scalar>& values) {
  const Eigen::Index m = times.size();
  if (values.size() != m) throw ConfigError("power_spectrum: times and values differ in length");
  if (m < 64) throw ConfigError("power_spectrum: at least 64 samples required");
  const Scalar step = (times[m - 1] - times[0]) / static_cast<Scalar>(m - 1);
  if (!(step > Scalar(0))) throw ConfigError("power_spectrum: times must increase");
  for (Eigen::Index n = 1; n < m; ++n) {
    if (std::abs((times[n] - times[n - 1]) - step) > Scalar(1e-9) * step) {
      throw ConfigError("power_spectrum: sampling is not uniform");
    }
  }

  const Scalar t_mean = times.mean();
  const Scalar v_mean = values.mean();
  const RealArrayT<Scalar> dt = times - t_mean;
  const Scalar slope = (dt * (values - v_mean)).sum() / dt.square().sum();
  const RealArrayT<Scalar> detrended = values - v_mean - slope * dt;

  constexpr Scalar a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
  FieldT<Scalar> windowed(m);
  for (Eigen::Index n = 0; n < m; ++n) {
    const Scalar z = Scalar(2) * std::numbers::pi_v<Scalar> * static_cast<Scalar>(n) / static_cast<Scalar>(m);
    const Scalar w = a0 - a1 * std::cos(z) + a2 * std::cos(2 * z) - a3 * std::cos(3 * z);
    windowed[n] = std::complex<Scalar>(detrended[n] * w, 0);
  }
  FieldT<Scalar> transformed(m);
  detail::fft_engine<Scalar>().fwd(transformed, windowed);

  BasicPowerSpectrum<Scalar> out;
  const Eigen::Index bins = m / 2 + 1;
  out.omega.resize(bins);
  out.power.resize(bins);
  const Scalar d_omega = Scalar(2) * std::numbers::pi_v<Scalar> / (static_cast<Scalar>(m) * step);
  for (Eigen::Index j = 0; j < bins; ++j) {
    out.omega[j] = d_omega * static_cast<Scalar>(j);
    out.power[j] = std::norm(transformed[j]);
  }
  out.signal_scale = static_cast<Scalar>(m) * std::max(values.abs().maxCoeff(), std::abs(v_mean));
  return out;
}

/// Largest bin at omega >= min_omega (DC excluded), refined by a parabola
/// through the log-power of the peak and its two neighbours. A spectrum whose
/// peak amplitude sits below 1e-10 of the signal scale is reported as flat
/// with omega = 0.
template <typename Scalar>
BasicFrequencyPeak<Scalar> dominant_frequency(const BasicPowerSpectrum<Scalar>& spectrum, Scalar min_omega = Scalar(0)) {
  const Eigen::Index bins = spectrum.power.size();
  Eigen::Index best = -1;
  for (Eigen::Index j = 1; j < bins; ++j) {
    if (spectrum.omega[j] < min_omega) continue;
    if (best < 0 || spectrum.power[j] > spectrum.power[best]) best = j;
  }
  if (best < 0) return {Scalar(0), Scalar(0), true};
  const Scalar peak_power = spectrum.power[best];
  if (std::sqrt(peak_power) <= Scalar(1e-10) * spectrum.signal_scale) return {Scalar(0), peak_power, true};

  Scalar offset(0);
  if (best > 0 && best + 1 < bins && spectrum.power[best - 1] > 0 && spectrum.power[best + 1] > 0) {
    const Scalar lm = std::log(spectrum.power[best - 1]);
    const Scalar l0 = std::log(peak_power);
    const Scalar lp = std::log(spectrum.power[best + 1]);
    const Scalar curvature = lm - Scalar(2) * l0 + lp;
    if (curvature < 0) offset = Scalar(0.5) * (lm - lp) / curvature;
  }
  const Scalar d_omega = spectrum.omega[1] - spectrum.omega[0];
  return {spectrum.omega[best] + offset * d_omega, peak_power, false};
}

template <typename Scalar>
BasicFrequencyPeak<Scalar> dominant_frequency(const RealArrayT<Scalar>& times, const RealArrayT<Scalar>& values,
                                              Scalar min_omega = Scalar(0)) {
  return dominant_frequency(power_spectrum(times, values), min_omega);
}

/// Largest bin power with omega in [lo, hi].
template <typename Scalar>
Scalar band_peak_power(const BasicPowerSpectrum<Scalar>& spectrum, Scalar lo, Scalar hi) {
  Scalar best(0);
  for (Eigen::Index j = 0; j < spectrum.power.size(); ++j) {
    if (spectrum.omega[j] >= lo && spectrum.omega[j] <= hi) best = std::max(best, spectrum.power[j]);
  }
  return best;
}

}  // namespace bubble
