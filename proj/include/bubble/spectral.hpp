#pragma once

// Periodic 1D lattice, position <-> momentum transforms, Klein-Gordon
// dispersion and spectral differentiation. Natural units: c = hbar = 1.
//
// Transform convention (the only place it is defined):
//
//   a[j] = dx * sum_n f[n] exp(-i k_j x_n)            (to_momentum)
//   f[n] = (1/L) * sum_j a[j] exp(+i k_j x_n)        (to_position)
//
// so that sum_n |f|^2 dx == sum_j |a|^2 dk/(2 pi) with dk = 2 pi / L.
// Momentum index j follows FFT storage order: mode numbers 0..N/2 then
// -N/2+1..-1, i.e. k covers (-pi/dx, pi/dx] with the Nyquist point stored at
// j = N/2 as +pi/dx.

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "bubble/errors.hpp"

namespace bubble {

template <typename Scalar>
using FieldT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealArrayT = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

enum class EnergyBranch { Retarded, Advanced };

inline const char* to_string(EnergyBranch b) {
  return b == EnergyBranch::Retarded ? "retarded" : "advanced";
}

/// Uniform periodic lattice x_n = -L/2 + n dx with its momentum lattice.
/// A value type: two grids are the same grid iff L and N compare equal.
template <typename Scalar>
class BasicGrid {
 public:
  BasicGrid(Scalar length, Eigen::Index points) : length_(length), points_(points) {
    if (!(length > Scalar(0)) || !std::isfinite(static_cast<double>(length))) {
      throw ConfigError("grid length must be positive, got " + std::to_string(static_cast<double>(length)));
    }
    if (points < 16 || (points & (points - 1)) != 0) {
      throw ConfigError("grid points must be a power of two >= 16, got " + std::to_string(points));
    }
  }

  Scalar length() const { return length_; }
  Eigen::Index size() const { return points_; }
  Scalar dx() const { return length_ / static_cast<Scalar>(points_); }
  Scalar dk() const { return Scalar(2) * std::numbers::pi_v<Scalar> / length_; }
  Scalar k_max() const { return std::numbers::pi_v<Scalar> / dx(); }

  Scalar x(Eigen::Index n) const { return -length_ / Scalar(2) + static_cast<Scalar>(n) * dx(); }

  /// Signed mode number of storage index j.
  Eigen::Index mode(Eigen::Index j) const { return j <= points_ / 2 ? j : j - points_; }
  Scalar k(Eigen::Index j) const { return dk() * static_cast<Scalar>(mode(j)); }

  /// Storage index holding -k_j (the Nyquist point maps to itself).
  Eigen::Index reflected(Eigen::Index j) const { return (points_ - j) % points_; }

  RealArrayT<Scalar> positions() const {
    RealArrayT<Scalar> out(points_);
    for (Eigen::Index n = 0; n < points_; ++n) out[n] = x(n);
    return out;
  }

  RealArrayT<Scalar> momenta() const {
    RealArrayT<Scalar> out(points_);
    for (Eigen::Index j = 0; j < points_; ++j) out[j] = k(j);
    return out;
  }

  friend bool operator==(const BasicGrid& a, const BasicGrid& b) {
    return a.length_ == b.length_ && a.points_ == b.points_;
  }

 private:
  Scalar length_;
  Eigen::Index points_;
};

using Grid1D = BasicGrid<double>;

template <typename Scalar = double>
BasicGrid<Scalar> make_grid(Scalar length, Eigen::Index points) {
  return BasicGrid<Scalar>(length, points);
}

/// Momentum-space coefficients a[j] on a grid's momentum lattice.
template <typename Scalar>
struct BasicSpectrum {
  FieldT<Scalar> coeffs;

  Eigen::Index size() const { return coeffs.size(); }
  std::complex<Scalar>& operator[](Eigen::Index j) { return coeffs[j]; }
  const std::complex<Scalar>& operator[](Eigen::Index j) const { return coeffs[j]; }
};

using Spectrum = BasicSpectrum<double>;
using Field = FieldT<double>;

/// omega(k) = sqrt(k^2 + m^2), the positive Klein-Gordon frequency.
template <typename Scalar>
Scalar dispersion_omega(Scalar k, Scalar mass) {
  if (!(mass > Scalar(0))) throw ConfigError("mass must be positive");
  return std::sqrt(k * k + mass * mass);
}

template <typename Scalar>
RealArrayT<Scalar> dispersion_omega(const BasicGrid<Scalar>& grid, Scalar mass) {
  if (!(mass > Scalar(0))) throw ConfigError("mass must be positive");
  const RealArrayT<Scalar> k = grid.momenta();
  return (k.square() + mass * mass).sqrt();
}

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine;
  return engine;
}

// exp(-i k_j x_0) with x_0 = -L/2 equals (-1)^mode(j) exactly.
template <typename Scalar>
Scalar origin_sign(const BasicGrid<Scalar>& grid, Eigen::Index j) {
  return (grid.mode(j) % 2 == 0) ? Scalar(1) : Scalar(-1);
}

template <typename Derived, typename Scalar>
void require_length(const Eigen::MatrixBase<Derived>& v, const BasicGrid<Scalar>& grid, const char* what) {
  if (v.size() != grid.size()) {
    throw ConfigError(std::string(what) + ": length " + std::to_string(v.size()) + " does not match grid size " +
                      std::to_string(grid.size()));
  }
}

}  // namespace detail

template <typename Scalar>
BasicSpectrum<Scalar> to_momentum(const FieldT<Scalar>& field, const BasicGrid<Scalar>& grid) {
  detail::require_length(field, grid, "to_momentum");
  FieldT<Scalar> out(grid.size());
  detail::fft_engine<Scalar>().fwd(out, field);
  const Scalar dx = grid.dx();
  for (Eigen::Index j = 0; j < grid.size(); ++j) out[j] *= dx * detail::origin_sign(grid, j);
  return {std::move(out)};
}

template <typename Scalar>
FieldT<Scalar> to_position(const BasicSpectrum<Scalar>& spectrum, const BasicGrid<Scalar>& grid) {
  detail::require_length(spectrum.coeffs, grid, "to_position");
  FieldT<Scalar> signed_coeffs(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) signed_coeffs[j] = spectrum[j] * detail::origin_sign(grid, j);
  FieldT<Scalar> out(grid.size());
  // The engine's inverse carries the 1/N factor; 1/L = (1/N)(1/dx).
  detail::fft_engine<Scalar>().inv(out, signed_coeffs);
  out /= grid.dx();
  return out;
}

/// Multiplies each mode by i k.
template <typename Scalar>
BasicSpectrum<Scalar> spectral_derivative(const BasicSpectrum<Scalar>& spectrum, const BasicGrid<Scalar>& grid) {
  detail::require_length(spectrum.coeffs, grid, "spectral_derivative");
  BasicSpectrum<Scalar> out{spectrum.coeffs};
  for (Eigen::Index j = 0; j < grid.size(); ++j) out[j] *= std::complex<Scalar>(0, grid.k(j));
  return out;
}

template <typename Scalar>
FieldT<Scalar> spectral_derivative_x(const FieldT<Scalar>& field, const BasicGrid<Scalar>& grid) {
  return to_position(spectral_derivative(to_momentum(field, grid), grid), grid);
}

template <typename Scalar>
FieldT<Scalar> spectral_second_derivative_x(const FieldT<Scalar>& field, const BasicGrid<Scalar>& grid) {
  auto spectrum = to_momentum(field, grid);
  for (Eigen::Index j = 0; j < grid.size(); ++j) spectrum[j] *= -grid.k(j) * grid.k(j);
  return to_position(spectrum, grid);
}

/// Rectangle-rule integral sum_n f[n] dx, summed in index order.
template <typename Derived, typename Scalar>
typename Derived::Scalar integrate(const Eigen::MatrixBase<Derived>& values, const BasicGrid<Scalar>& grid) {
  detail::require_length(values, grid, "integrate");
  typename Derived::Scalar total(0);
  for (Eigen::Index n = 0; n < values.size(); ++n) total += values[n];
  return total * grid.dx();
}

/// Largest |f| in the outer 5% of the grid (both ends) divided by max |f|.
template <typename Scalar>
Scalar tail_fraction(const FieldT<Scalar>& field) {
  const Eigen::Index n = field.size();
  const Eigen::Index edge = std::max<Eigen::Index>(1, n / 20);
  const Scalar peak = field.cwiseAbs().maxCoeff();
  if (peak == Scalar(0)) return Scalar(0);
  const Scalar tail = std::max(field.head(edge).cwiseAbs().maxCoeff(), field.tail(edge).cwiseAbs().maxCoeff());
  return tail / peak;
}

inline constexpr double kTailTolerance = 1e-10;

}  // namespace bubble
