#pragma once

// Klein-Gordon densities and currents:
//   single field (CI):  rho = (i/2m)(T* dT/dt - T dT*/dt),  j = (1/2mi)(T* dT/dx - T dT*/dx)
//   retarded x advanced: rho_s = (i/2m)(F dP/dt - P dF/dt), j_s = (1/2mi)(F dP/dx - P dF/dx)
// where P is the retarded field and F the advanced field (the conjugate of
// the final-condition solution), used as-is without further conjugation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <vector>

#include "bubble/spectral.hpp"
#include "bubble/wavepacket.hpp"

namespace bubble {

enum class ProfileKind { CI, SI };
enum class ProfilePart { Real, Imag, Abs };

template <typename Scalar>
struct BasicDensityProfile {
  BasicGrid<Scalar> grid;
  Scalar time{0};
  ProfileKind kind{ProfileKind::CI};
  FieldT<Scalar> rho;
  FieldT<Scalar> current;
};

using DensityProfile = BasicDensityProfile<double>;

template <typename Scalar>
struct BasicConservationReport {
  std::vector<Scalar> times;
  std::vector<std::complex<Scalar>> integrals;
  Scalar max_global_drift{0};
  Scalar max_local_residual{0};
};

using ConservationReport = BasicConservationReport<double>;

template <typename Scalar>
struct Moments {
  Scalar mean;
  Scalar std;
};

namespace detail {

// (i/2m)(a b' - c d')
template <typename Scalar>
FieldT<Scalar> time_bilinear(const FieldT<Scalar>& a, const FieldT<Scalar>& b_rate, const FieldT<Scalar>& c,
                             const FieldT<Scalar>& d_rate, Scalar mass) {
  const std::complex<Scalar> factor(0, Scalar(0.5) / mass);
  return (factor * (a.cwiseProduct(b_rate) - c.cwiseProduct(d_rate))).eval();
}

// (1/2mi)(a b' - c d') = (-i/2m)(...)
template <typename Scalar>
FieldT<Scalar> space_bilinear(const FieldT<Scalar>& a, const FieldT<Scalar>& b_grad, const FieldT<Scalar>& c,
                              const FieldT<Scalar>& d_grad, Scalar mass) {
  const std::complex<Scalar> factor(0, -Scalar(0.5) / mass);
  return (factor * (a.cwiseProduct(b_grad) - c.cwiseProduct(d_grad))).eval();
}

template <typename Scalar>
RealArrayT<Scalar> select_part(const FieldT<Scalar>& values, ProfilePart part) {
  switch (part) {
    case ProfilePart::Real:
      return values.real().array();
    case ProfilePart::Imag:
      return values.imag().array();
    case ProfilePart::Abs:
      break;
  }
  return values.cwiseAbs().array();
}

// Second time derivative. Single-branch fields apply their own generator
// (-+ i w) to the stored time derivative; mixed fields use the wave equation
// d2T/dt2 = (d2/dx2 - m^2) T.
template <typename Scalar>
FieldT<Scalar> second_time_derivative(const BasicSnapshot<Scalar>& s) {
  if (s.branch == FieldBranch::Mixed) {
    return (spectral_second_derivative_x(s.psi, s.grid) - s.mass * s.mass * s.psi).eval();
  }
  const Scalar sign = s.branch == FieldBranch::Retarded ? Scalar(-1) : Scalar(1);
  const RealArrayT<Scalar> omega = dispersion_omega(s.grid, s.mass);
  auto spectrum = to_momentum(s.dpsi_dt, s.grid);
  for (Eigen::Index j = 0; j < s.grid.size(); ++j) spectrum[j] *= std::complex<Scalar>(0, sign * omega[j]);
  return to_position(spectrum, s.grid);
}

template <typename Scalar>
Scalar residual_ratio(const FieldT<Scalar>& drho_dt, const FieldT<Scalar>& current, const BasicGrid<Scalar>& grid) {
  const FieldT<Scalar> div = spectral_derivative_x(current, grid);
  const Scalar scale = div.cwiseAbs().maxCoeff();
  const Scalar worst = (drho_dt + div).cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) return worst;
  return worst / scale;
}

}  // namespace detail

template <typename Scalar>
BasicDensityProfile<Scalar> ci_density_current(const BasicSnapshot<Scalar>& s) {
  const FieldT<Scalar> conj_psi = s.psi.conjugate();
  const FieldT<Scalar> grad = spectral_derivative_x(s.psi, s.grid);
  return {s.grid, s.time, ProfileKind::CI,
          detail::time_bilinear(conj_psi, s.dpsi_dt, s.psi, s.dpsi_dt.conjugate().eval(), s.mass),
          detail::space_bilinear(conj_psi, grad, s.psi, grad.conjugate().eval(), s.mass)};
}

template <typename Scalar>
void require_si_pair(const BasicSnapshot<Scalar>& retarded, const BasicSnapshot<Scalar>& advanced) {
  if (retarded.branch != FieldBranch::Retarded) throw ConfigError("first snapshot must be retarded");
  if (advanced.branch != FieldBranch::Advanced) throw ConfigError("second snapshot must be advanced");
  if (retarded.time != advanced.time) throw ConfigError("retarded and advanced snapshots are at different times");
  if (!(retarded.grid == advanced.grid)) throw ConfigError("retarded and advanced snapshots live on different grids");
  if (retarded.mass != advanced.mass) throw ConfigError("retarded and advanced snapshots have different masses");
}

template <typename Scalar>
BasicDensityProfile<Scalar> si_density_current(const BasicSnapshot<Scalar>& retarded,
                                               const BasicSnapshot<Scalar>& advanced) {
  require_si_pair(retarded, advanced);
  const auto& grid = retarded.grid;
  const FieldT<Scalar> grad_ret = spectral_derivative_x(retarded.psi, grid);
  const FieldT<Scalar> grad_adv = spectral_derivative_x(advanced.psi, grid);
  return {grid, retarded.time, ProfileKind::SI,
          detail::time_bilinear(advanced.psi, retarded.dpsi_dt, retarded.psi, advanced.dpsi_dt, retarded.mass),
          detail::space_bilinear(advanced.psi, grad_ret, retarded.psi, grad_adv, retarded.mass)};
}

/// Conjugated amplitude density and current (the antiparticle experiment).
template <typename Scalar>
BasicDensityProfile<Scalar> antiparticle_conjugate(const BasicDensityProfile<Scalar>& p) {
  if (p.kind != ProfileKind::SI) throw ConfigError("antiparticle_conjugate requires an SI profile");
  return {p.grid, p.time, p.kind, p.rho.conjugate().eval(), p.current.conjugate().eval()};
}

template <typename Scalar>
std::complex<Scalar> integrate_profile(const BasicDensityProfile<Scalar>& p) {
  return integrate(p.rho, p.grid);
}

/// max |drho/dt + dj/dx| / max |dj/dx| for a single field.
template <typename Scalar>
Scalar local_conservation_residual(const BasicSnapshot<Scalar>& s) {
  const BasicDensityProfile<Scalar> profile = ci_density_current(s);
  const FieldT<Scalar> accel = detail::second_time_derivative(s);
  const FieldT<Scalar> drho = detail::time_bilinear(s.psi.conjugate().eval(), accel, s.psi,
                                                    accel.conjugate().eval(), s.mass);
  return detail::residual_ratio(drho, profile.current, s.grid);
}

/// Same residual for the retarded x advanced amplitude density.
template <typename Scalar>
Scalar local_conservation_residual(const BasicSnapshot<Scalar>& retarded, const BasicSnapshot<Scalar>& advanced) {
  const BasicDensityProfile<Scalar> profile = si_density_current(retarded, advanced);
  const FieldT<Scalar> accel_ret = detail::second_time_derivative(retarded);
  const FieldT<Scalar> accel_adv = detail::second_time_derivative(advanced);
  const FieldT<Scalar> drho =
      detail::time_bilinear(advanced.psi, accel_ret, retarded.psi, accel_adv, retarded.mass);
  return detail::residual_ratio(drho, profile.current, retarded.grid);
}

template <typename Scalar>
Scalar local_conservation_residual(const BasicWavepacket<Scalar>& packet, Scalar t) {
  return local_conservation_residual(evolve_to(packet, t));
}

template <typename Scalar>
Scalar local_conservation_residual(const BasicWavepacket<Scalar>& retarded, const BasicWavepacket<Scalar>& advanced,
                                   Scalar t) {
  return local_conservation_residual(evolve_to(retarded, t), evolve_to(advanced, t));
}

/// Mean and std of the selected part of rho used as a signed weight.
template <typename Scalar>
Moments<Scalar> centroid_and_std(const BasicDensityProfile<Scalar>& p, ProfilePart part) {
  const RealArrayT<Scalar> w = detail::select_part(p.rho, part);
  const auto& grid = p.grid;
  Scalar total(0), scale(0), first(0);
  for (Eigen::Index n = 0; n < w.size(); ++n) {
    total += w[n];
    scale += std::abs(w[n]);
    first += grid.x(n) * w[n];
  }
  if (scale == Scalar(0) || std::abs(total) <= Scalar(1e-12) * scale) {
    throw NumericalError("centroid_and_std: selected part integrates to zero");
  }
  const Scalar mean = first / total;
  Scalar second(0);
  for (Eigen::Index n = 0; n < w.size(); ++n) {
    const Scalar d = grid.x(n) - mean;
    second += d * d * w[n];
  }
  return {mean, std::sqrt(std::max(Scalar(0), second / total))};
}

/// max_u |f(c+u) - f(c-u)| / max |f|, linear interpolation between grid points
/// and periodic wrap-around.
template <typename Scalar>
Scalar symmetry_defect(const BasicDensityProfile<Scalar>& p, ProfilePart part, Scalar center) {
  const RealArrayT<Scalar> f = detail::select_part(p.rho, part);
  const Scalar peak = f.abs().maxCoeff();
  if (peak == Scalar(0)) return Scalar(0);
  const auto& grid = p.grid;
  const Eigen::Index n_points = grid.size();
  Scalar worst(0);
  for (Eigen::Index n = 0; n < n_points; ++n) {
    const Scalar mirror = Scalar(2) * center - grid.x(n);
    const Scalar s = (mirror - grid.x(0)) / grid.dx();
    const Scalar base = std::floor(s);
    const Scalar frac = s - base;
    Eigen::Index i0 = static_cast<Eigen::Index>(base) % n_points;
    if (i0 < 0) i0 += n_points;
    const Eigen::Index i1 = (i0 + 1) % n_points;
    const Scalar value = frac == Scalar(0) ? f[i0] : (Scalar(1) - frac) * f[i0] + frac * f[i1];
    worst = std::max(worst, std::abs(f[n] - value));
  }
  return worst / peak;
}

/// Global integrals at `times` plus the worst residual found elsewhere.
template <typename Scalar>
BasicConservationReport<Scalar> make_conservation_report(std::vector<Scalar> times,
                                                         std::vector<std::complex<Scalar>> integrals,
                                                         Scalar max_local_residual) {
  Scalar drift(0);
  for (std::size_t a = 0; a < integrals.size(); ++a) {
    for (std::size_t b = a + 1; b < integrals.size(); ++b) drift = std::max(drift, std::abs(integrals[a] - integrals[b]));
  }
  return {std::move(times), std::move(integrals), drift, max_local_residual};
}

}  // namespace bubble
