#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "bubble/observables.hpp"
#include "bubble/wavepacket.hpp"

namespace bubble {

template <typename Scalar>
struct BasicTransitionResult {
  std::complex<Scalar> amplitude{0};
  Scalar probability{0};
  std::vector<std::pair<Scalar, std::complex<Scalar>>> samples;
  Scalar max_drift{0};
  std::complex<Scalar> oracle_amplitude{0};
  Scalar oracle_gap{0};
};

using TransitionResult = BasicTransitionResult<double>;

template <typename Scalar>
Scalar transition_probability(std::complex<Scalar> amplitude) {
  return std::norm(amplitude);
}

/// (i/2m) * integral [after* d(before)/dt - before d(after*)/dt] dx, both
/// fields taken at the measurement time.
template <typename Scalar>
std::complex<Scalar> ci_transition_amplitude(const BasicSnapshot<Scalar>& before, const BasicSnapshot<Scalar>& after) {
  if (before.time != after.time) throw ConfigError("ci_transition_amplitude: snapshots are at different times");
  if (!(before.grid == after.grid)) throw ConfigError("ci_transition_amplitude: snapshots live on different grids");
  if (before.mass != after.mass) throw ConfigError("ci_transition_amplitude: snapshots have different masses");
  std::complex<Scalar> total(0);
  for (Eigen::Index n = 0; n < before.psi.size(); ++n) {
    total += std::conj(after.psi[n]) * before.dpsi_dt[n] - before.psi[n] * std::conj(after.dpsi_dt[n]);
  }
  return std::complex<Scalar>(0, Scalar(0.5) / before.mass) * total * before.grid.dx();
}

/// KG inner product of two retarded packets evaluated on the momentum lattice:
///   sum_j (dk/2pi) (w/m) conj(b_j) a_j exp(i w (t_ket - t_bra)).
/// Time-independent by construction.
template <typename Scalar>
std::complex<Scalar> momentum_space_overlap(const BasicWavepacket<Scalar>& bra, const BasicWavepacket<Scalar>& ket) {
  if (bra.branch() != EnergyBranch::Retarded || ket.branch() != EnergyBranch::Retarded) {
    throw ConfigError("momentum_space_overlap expects two retarded packets");
  }
  if (!(bra.grid() == ket.grid())) throw ConfigError("momentum_space_overlap: packets live on different grids");
  if (bra.mass() != ket.mass()) throw ConfigError("momentum_space_overlap: packets have different masses");
  const auto& grid = ket.grid();
  const RealArrayT<Scalar> omega = dispersion_omega(grid, ket.mass());
  const Scalar lag = ket.anchor_time() - bra.anchor_time();
  std::complex<Scalar> total(0);
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    total += (omega[j] / ket.mass()) * std::conj(bra.spectrum()[j]) * ket.spectrum()[j] *
             std::polar(Scalar(1), omega[j] * lag);
  }
  return total / grid.length();
}

/// Independent momentum-space evaluation of the retarded x advanced amplitude.
template <typename Scalar>
std::complex<Scalar> momentum_space_oracle(const BasicWavepacket<Scalar>& retarded,
                                           const BasicWavepacket<Scalar>& advanced) {
  if (retarded.branch() != EnergyBranch::Retarded) throw ConfigError("oracle: first packet must be retarded");
  return momentum_space_overlap(auxiliary_retarded(advanced), retarded);
}

template <typename Scalar>
Scalar max_pairwise_gap(const std::vector<std::pair<Scalar, std::complex<Scalar>>>& samples) {
  Scalar drift(0);
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      drift = std::max(drift, std::abs(samples[a].second - samples[b].second));
    }
  }
  return drift;
}

/// Integral of rho_s at every sample time; the amplitude is the first sample.
template <typename Scalar>
BasicTransitionResult<Scalar> si_transition_amplitude(const BasicWavepacket<Scalar>& retarded,
                                                      const BasicWavepacket<Scalar>& advanced,
                                                      const std::vector<Scalar>& sample_times) {
  if (retarded.branch() != EnergyBranch::Retarded) throw ConfigError("si_transition_amplitude: retarded packet expected");
  if (advanced.branch() != EnergyBranch::Advanced) throw ConfigError("si_transition_amplitude: advanced packet expected");
  if (sample_times.empty()) throw ConfigError("si_transition_amplitude: at least one sample time required");
  BasicTransitionResult<Scalar> result;
  result.samples.reserve(sample_times.size());
  for (const Scalar t : sample_times) {
    const auto profile = si_density_current(evolve_to(retarded, t), evolve_to(advanced, t));
    result.samples.emplace_back(t, integrate_profile(profile));
  }
  result.amplitude = result.samples.front().second;
  result.probability = transition_probability(result.amplitude);
  result.max_drift = max_pairwise_gap(result.samples);
  result.oracle_amplitude = momentum_space_oracle(retarded, advanced);
  result.oracle_gap = std::abs(result.amplitude - result.oracle_amplitude);
  return result;
}

/// The exchanged experiment: the source becomes the time-reverse of the
/// detector condition and vice versa, with the same anchor times.
template <typename Scalar>
std::pair<BasicGaussianSpec<Scalar>, BasicGaussianSpec<Scalar>> exchanged_specs(
    const BasicGaussianSpec<Scalar>& source, const BasicGaussianSpec<Scalar>& detector) {
  // source' = conj(chi at t_f): centred at x_f, carrying the advanced momentum p_f.
  BasicGaussianSpec<Scalar> new_source{detector.center, detector.width, detector.momentum, source.anchor_time, +1};
  // chi' = conj(psi_i): centred at x_i with momentum -p_i, so its advanced
  // conjugate carries +p_i.
  BasicGaussianSpec<Scalar> new_detector{source.center, source.width, source.momentum, detector.anchor_time, -1};
  return {new_source, new_detector};
}

/// (P_s forward, P_s exchanged), evaluated with the position-space integral
/// at the source time.
template <typename Scalar>
std::pair<Scalar, Scalar> time_reversal_check(const BasicGaussianSpec<Scalar>& source,
                                              const BasicGaussianSpec<Scalar>& detector,
                                              const BasicGrid<Scalar>& grid, Scalar mass) {
  const auto forward = si_transition_amplitude(build_retarded_gaussian(source, grid, mass),
                                               build_advanced_gaussian(detector, grid, mass),
                                               std::vector<Scalar>{source.anchor_time});
  const auto [src2, det2] = exchanged_specs(source, detector);
  const auto backward = si_transition_amplitude(build_retarded_gaussian(src2, grid, mass),
                                                build_advanced_gaussian(det2, grid, mass),
                                                std::vector<Scalar>{src2.anchor_time});
  return {forward.probability, backward.probability};
}

}  // namespace bubble
