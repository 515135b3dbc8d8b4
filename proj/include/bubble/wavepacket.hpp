#pragma once

// Gaussian retarded/advanced Klein-Gordon packets with exact spectral
// evolution.
//
// A packet stores its momentum coefficients at the anchor time t0. A retarded
// packet evolves as a(k) exp(-i w (t - t0)), an advanced packet as
// c(k) exp(+i w (t - t0)). An advanced packet is always the complex conjugate
// of some retarded packet chi: c(k) = conj(b(-k)) where b is chi's spectrum.

#include <cmath>
#include <complex>
#include <string>

#include "bubble/spectral.hpp"

namespace bubble {

/// Branch marker of a position-space snapshot. Mixed only arises from
/// superposition; packets are always single-branch.
enum class FieldBranch { Retarded, Advanced, Mixed };

inline FieldBranch to_field_branch(EnergyBranch b) {
  return b == EnergyBranch::Retarded ? FieldBranch::Retarded : FieldBranch::Advanced;
}

/// Gaussian initial/final condition. The envelope is
///   exp(-(x - center)^2 / width^2) * exp(i momentum x),
/// so the (non-relativistic) density std is width / 2 and the spectral std of
/// |a|^2 is 1 / width. For an advanced packet `momentum` is the momentum
/// carried by the advanced field itself, i.e. the conjugated auxiliary
/// retarded packet carries -momentum.
template <typename Scalar>
struct BasicGaussianSpec {
  Scalar center{0};
  Scalar width{1};
  Scalar momentum{0};
  Scalar anchor_time{0};
  int target_norm{+1};
};

using GaussianSpec = BasicGaussianSpec<double>;

template <typename Scalar>
class BasicWavepacket {
 public:
  BasicWavepacket(BasicGrid<Scalar> grid, BasicSpectrum<Scalar> spectrum, EnergyBranch branch, Scalar mass,
                  Scalar anchor_time)
      : grid_(grid), spectrum_(std::move(spectrum)), branch_(branch), mass_(mass), anchor_time_(anchor_time) {
    if (spectrum_.size() != grid_.size()) throw ConfigError("wavepacket spectrum length does not match grid");
    if (!(mass_ > Scalar(0))) throw ConfigError("mass must be positive");
  }

  const BasicGrid<Scalar>& grid() const { return grid_; }
  const BasicSpectrum<Scalar>& spectrum() const { return spectrum_; }
  EnergyBranch branch() const { return branch_; }
  Scalar mass() const { return mass_; }
  Scalar anchor_time() const { return anchor_time_; }

  /// -1 for retarded (exp(-i w t)), +1 for advanced (exp(+i w t)).
  Scalar phase_sign() const { return branch_ == EnergyBranch::Retarded ? Scalar(-1) : Scalar(1); }

 private:
  BasicGrid<Scalar> grid_;
  BasicSpectrum<Scalar> spectrum_;
  EnergyBranch branch_;
  Scalar mass_;
  Scalar anchor_time_;
};

using Wavepacket = BasicWavepacket<double>;

/// Field values and exact time derivative at one instant.
template <typename Scalar>
struct BasicSnapshot {
  BasicGrid<Scalar> grid;
  Scalar time{0};
  Scalar mass{1};
  FieldBranch branch{FieldBranch::Retarded};
  FieldT<Scalar> psi;
  FieldT<Scalar> dpsi_dt;
};

using Snapshot = BasicSnapshot<double>;

template <typename Scalar>
BasicSnapshot<Scalar> evolve_to(const BasicWavepacket<Scalar>& packet, Scalar t) {
  const auto& grid = packet.grid();
  const RealArrayT<Scalar> omega = dispersion_omega(grid, packet.mass());
  const Scalar elapsed = t - packet.anchor_time();
  const Scalar sign = packet.phase_sign();
  BasicSpectrum<Scalar> at_t{FieldT<Scalar>(grid.size())};
  BasicSpectrum<Scalar> rate{FieldT<Scalar>(grid.size())};
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    at_t[j] = packet.spectrum()[j] * std::polar(Scalar(1), sign * omega[j] * elapsed);
    rate[j] = at_t[j] * std::complex<Scalar>(0, sign * omega[j]);
  }
  return {grid, t, packet.mass(), to_field_branch(packet.branch()), to_position(at_t, grid), to_position(rate, grid)};
}

/// Integral of (i/2m)(psi* dpsi/dt - psi dpsi*/dt): +1 for a normalized
/// retarded packet, -1 for a normalized advanced one.
template <typename Scalar>
Scalar kg_norm(const BasicSnapshot<Scalar>& s) {
  Scalar total(0);
  for (Eigen::Index n = 0; n < s.psi.size(); ++n) {
    // (i/2m)(z - conj z) with z = psi* dpsi = -(1/m) Im z
    total += -std::imag(std::conj(s.psi[n]) * s.dpsi_dt[n]);
  }
  return total * s.grid.dx() / s.mass;
}

/// Weighted sum w1 s1 + w2 s2 of field and time derivative.
template <typename Scalar>
BasicSnapshot<Scalar> superpose(const BasicSnapshot<Scalar>& s1, const BasicSnapshot<Scalar>& s2,
                                std::complex<Scalar> w1, std::complex<Scalar> w2) {
  if (!(s1.grid == s2.grid)) throw ConfigError("superpose: snapshots live on different grids");
  if (s1.time != s2.time) throw ConfigError("superpose: snapshots are at different times");
  if (s1.mass != s2.mass) throw ConfigError("superpose: snapshots have different masses");
  FieldBranch branch = FieldBranch::Mixed;
  if (s1.branch == s2.branch) {
    branch = s1.branch;
  } else if (w2 == std::complex<Scalar>(0)) {
    branch = s1.branch;
  } else if (w1 == std::complex<Scalar>(0)) {
    branch = s2.branch;
  }
  return {s1.grid, s1.time, s1.mass, branch, (w1 * s1.psi + w2 * s2.psi).eval(),
          (w1 * s1.dpsi_dt + w2 * s2.dpsi_dt).eval()};
}

template <typename Scalar>
BasicSnapshot<Scalar> zero_snapshot_like(const BasicSnapshot<Scalar>& s) {
  return {s.grid, s.time, s.mass, s.branch, FieldT<Scalar>::Zero(s.psi.size()), FieldT<Scalar>::Zero(s.psi.size())};
}

/// Complex conjugate packet: flips the branch, c(k) = conj(a(-k)).
/// Exact involution.
template <typename Scalar>
BasicWavepacket<Scalar> conjugate_packet(const BasicWavepacket<Scalar>& packet) {
  const auto& grid = packet.grid();
  BasicSpectrum<Scalar> out{FieldT<Scalar>(grid.size())};
  for (Eigen::Index j = 0; j < grid.size(); ++j) out[j] = std::conj(packet.spectrum()[grid.reflected(j)]);
  const EnergyBranch flipped =
      packet.branch() == EnergyBranch::Retarded ? EnergyBranch::Advanced : EnergyBranch::Retarded;
  return BasicWavepacket<Scalar>(grid, std::move(out), flipped, packet.mass(), packet.anchor_time());
}

/// Reinterprets a single-branch snapshot as a packet anchored at its time.
template <typename Scalar>
BasicWavepacket<Scalar> packet_from_snapshot(const BasicSnapshot<Scalar>& s) {
  if (s.branch == FieldBranch::Mixed) throw ConfigError("packet_from_snapshot: mixed snapshot has no single branch");
  const EnergyBranch b = s.branch == FieldBranch::Retarded ? EnergyBranch::Retarded : EnergyBranch::Advanced;
  return BasicWavepacket<Scalar>(s.grid, to_momentum(s.psi, s.grid), b, s.mass, s.time);
}

/// Mean momentum of the spectrum, sum k |a|^2 / sum |a|^2.
template <typename Scalar>
Scalar mean_momentum(const BasicWavepacket<Scalar>& packet) {
  const auto& grid = packet.grid();
  Scalar num(0), den(0);
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    const Scalar weight = std::norm(packet.spectrum()[j]);
    num += grid.k(j) * weight;
    den += weight;
  }
  return num / den;
}

/// Largest |a| at the two extreme momentum lattice points relative to max |a|.
template <typename Scalar>
Scalar spectral_edge_fraction(const BasicSpectrum<Scalar>& spectrum) {
  const Eigen::Index n = spectrum.size();
  const Scalar peak = spectrum.coeffs.cwiseAbs().maxCoeff();
  if (peak == Scalar(0)) return Scalar(0);
  return std::max(std::abs(spectrum[n / 2]), std::abs(spectrum[n / 2 + 1])) / peak;
}

namespace detail {

template <typename Scalar>
void validate_gaussian(const BasicGaussianSpec<Scalar>& spec, const BasicGrid<Scalar>& grid, int expected_norm) {
  if (!(spec.width > Scalar(0))) throw ConfigError("gaussian width must be positive");
  if (spec.target_norm != expected_norm) {
    throw ConfigError("gaussian target norm must be " + std::to_string(expected_norm));
  }
  const Scalar sigma_k = Scalar(1) / spec.width;
  if (std::abs(spec.momentum) + Scalar(8) * sigma_k > grid.k_max()) {
    throw NumericalError("spectral containment violated: |p| + 8 sigma_k = " +
                         std::to_string(static_cast<double>(std::abs(spec.momentum) + Scalar(8) * sigma_k)) +
                         " exceeds k_max = " + std::to_string(static_cast<double>(grid.k_max())));
  }
}

template <typename Scalar>
FieldT<Scalar> gaussian_field(const BasicGaussianSpec<Scalar>& spec, const BasicGrid<Scalar>& grid) {
  FieldT<Scalar> f(grid.size());
  const Scalar w2 = spec.width * spec.width;
  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    const Scalar x = grid.x(n);
    const Scalar u = x - spec.center;
    f[n] = std::exp(-u * u / w2) * std::polar(Scalar(1), spec.momentum * x);
  }
  return f;
}

template <typename Scalar>
void check_packet_containment(const BasicWavepacket<Scalar>& packet, const FieldT<Scalar>& anchor_field) {
  if (spectral_edge_fraction(packet.spectrum()) >= Scalar(kTailTolerance)) {
    throw NumericalError("spectral containment violated: edge modes carry non-negligible weight");
  }
  if (tail_fraction(anchor_field) >= Scalar(kTailTolerance)) {
    throw NumericalError("packet tails reach the outer 5% of the grid");
  }
}

template <typename Scalar>
BasicWavepacket<Scalar> rescaled(const BasicWavepacket<Scalar>& packet, Scalar factor) {
  return BasicWavepacket<Scalar>(packet.grid(), BasicSpectrum<Scalar>{packet.spectrum().coeffs * factor},
                                 packet.branch(), packet.mass(), packet.anchor_time());
}

}  // namespace detail

/// Retarded Gaussian anchored at spec.anchor_time, scaled to kg_norm = +1.
template <typename Scalar>
BasicWavepacket<Scalar> build_retarded_gaussian(const BasicGaussianSpec<Scalar>& spec, const BasicGrid<Scalar>& grid,
                                                Scalar mass) {
  detail::validate_gaussian(spec, grid, +1);
  const FieldT<Scalar> field = detail::gaussian_field(spec, grid);
  BasicWavepacket<Scalar> raw(grid, to_momentum(field, grid), EnergyBranch::Retarded, mass, spec.anchor_time);
  detail::check_packet_containment(raw, field);
  const Scalar norm = kg_norm(evolve_to(raw, spec.anchor_time));
  return detail::rescaled(raw, Scalar(1) / std::sqrt(norm));
}

/// Advanced Gaussian: the conjugate of a retarded Gaussian centred at
/// spec.center with momentum -spec.momentum, anchored at spec.anchor_time and
/// scaled to kg_norm = -1.
template <typename Scalar>
BasicWavepacket<Scalar> build_advanced_gaussian(const BasicGaussianSpec<Scalar>& spec, const BasicGrid<Scalar>& grid,
                                                Scalar mass) {
  detail::validate_gaussian(spec, grid, -1);
  BasicGaussianSpec<Scalar> aux = spec;
  aux.momentum = -spec.momentum;
  aux.target_norm = +1;
  const BasicWavepacket<Scalar> advanced = conjugate_packet(build_retarded_gaussian(aux, grid, mass));
  const Scalar norm = kg_norm(evolve_to(advanced, spec.anchor_time));
  if (!(norm < Scalar(0))) throw NumericalError("advanced packet norm is not negative");
  return detail::rescaled(advanced, Scalar(1) / std::sqrt(-norm));
}

/// The retarded packet chi whose conjugate is the given advanced packet.
template <typename Scalar>
BasicWavepacket<Scalar> auxiliary_retarded(const BasicWavepacket<Scalar>& advanced) {
  if (advanced.branch() != EnergyBranch::Advanced) throw ConfigError("auxiliary_retarded: packet is not advanced");
  return conjugate_packet(advanced);
}

}  // namespace bubble
