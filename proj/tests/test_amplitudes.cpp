#include <doctest.h>

#include <cmath>

#include "bubble/amplitudes.hpp"

using namespace bubble;
using cd = std::complex<double>;

namespace {

const Grid1D kGrid = make_grid(1024.0, 8192);
constexpr double kSigma = 2.8284271247461903;
const GaussianSpec kSource{-100.0, kSigma, 1.5, 0.0, +1};
const GaussianSpec kDetector{100.0, kSigma, -1.5, 240.0, -1};

// Regression values for the default construction.
constexpr double kFrozenRe = 0.43394933943145;
constexpr double kFrozenIm = 0.07840936711564;

Wavepacket detector_as_retarded() {
  GaussianSpec spec = kDetector;
  spec.momentum = -kDetector.momentum;
  spec.target_norm = +1;
  return build_retarded_gaussian(spec, kGrid, 1.0);
}

}  // namespace

TEST_CASE("transition probability") {
  CHECK(transition_probability(cd(0.43, 0.08)) == doctest::Approx(0.1913));
  CHECK(transition_probability(cd(0, 0)) == 0.0);
  for (const double phase : {0.0, 0.3, 2.0, -1.7}) CHECK(transition_probability(std::polar(1.0, phase)) == doctest::Approx(1.0));
}

TEST_CASE("CI amplitude of the bubble experiment") {
  const Wavepacket psi = build_retarded_gaussian(kSource, kGrid, 1.0);
  const Snapshot before = evolve_to(psi, 240.0);
  const Snapshot after = evolve_to(detector_as_retarded(), 240.0);
  const cd a = ci_transition_amplitude(before, after);
  CHECK(std::abs(a.real() - 0.43) <= 0.02);
  CHECK(std::abs(a.imag() - 0.08) <= 0.02);
  CHECK(std::abs(a - cd(kFrozenRe, kFrozenIm)) < 1e-12);
  CHECK(std::abs(transition_probability(a) - 0.19) <= 0.01);

  CHECK(std::abs(ci_transition_amplitude(before, before) - 1.0) < 1e-9);
  CHECK_THROWS_AS(ci_transition_amplitude(before, evolve_to(psi, 1.0)), ConfigError);
}

TEST_CASE("distant detector gives a vanishing CI amplitude") {
  const Wavepacket psi = build_retarded_gaussian(kSource, kGrid, 1.0);
  const Wavepacket far = build_retarded_gaussian(GaussianSpec{100.0, kSigma, 1.5, 100.0, +1}, kGrid, 1.0);
  const cd a = ci_transition_amplitude(evolve_to(psi, 100.0), evolve_to(far, 100.0));
  CHECK(std::abs(a) <= 1e-8);
}

TEST_CASE("SI amplitude of the bubble experiment") {
  const Wavepacket psi = build_retarded_gaussian(kSource, kGrid, 1.0);
  const Wavepacket adv = build_advanced_gaussian(kDetector, kGrid, 1.0);
  const TransitionResult r = si_transition_amplitude(psi, adv, {0.0, 60.0, 120.0, 180.0, 240.0});
  CHECK(std::abs(r.amplitude.real() - 0.43) <= 0.02);
  CHECK(std::abs(r.amplitude.imag() - 0.08) <= 0.02);
  CHECK(std::abs(r.probability - 0.19) <= 0.01);
  CHECK(r.max_drift <= 1e-9);
  CHECK(r.samples.size() == 5);
  CHECK(r.oracle_gap <= 1e-8);
  CHECK(std::abs(r.amplitude - cd(kFrozenRe, kFrozenIm)) < 1e-12);
  CHECK(std::abs(r.probability - std::norm(r.amplitude)) <= 1e-12 * r.probability);

  const cd ci = ci_transition_amplitude(evolve_to(psi, 240.0), evolve_to(detector_as_retarded(), 240.0));
  CHECK(std::abs(ci - r.amplitude) <= 1e-9);
}

TEST_CASE("self transition") {
  const Wavepacket psi = build_retarded_gaussian(kSource, kGrid, 1.0);
  const Wavepacket adv = conjugate_packet(psi);
  const TransitionResult r = si_transition_amplitude(psi, adv, {0.0, 50.0, 100.0});
  CHECK(std::abs(r.amplitude - 1.0) < 1e-12);
  CHECK(r.max_drift <= 1e-12);
  CHECK(std::abs(momentum_space_oracle(psi, adv) - 1.0) < 1e-12);
  CHECK(std::abs(momentum_space_overlap(psi, psi) - 1.0) < 1e-12);
}

TEST_CASE("oracle of disjoint momentum supports") {
  const Wavepacket right = build_retarded_gaussian(GaussianSpec{0.0, 4.0, 10.0, 0.0, +1}, kGrid, 1.0);
  // An advanced field with momentum -10 is the conjugate of a +10 packet; one
  // with momentum +10 conjugates a -10 packet and has no spectral overlap.
  const Wavepacket matching = build_advanced_gaussian(GaussianSpec{0.0, 4.0, -10.0, 0.0, -1}, kGrid, 1.0);
  const Wavepacket opposite = build_advanced_gaussian(GaussianSpec{0.0, 4.0, 10.0, 0.0, -1}, kGrid, 1.0);
  CHECK(std::abs(momentum_space_oracle(right, opposite)) < 1e-12);
  CHECK(std::abs(momentum_space_oracle(right, matching)) > 0.5);
}

TEST_CASE("oracle preconditions") {
  const Wavepacket psi = build_retarded_gaussian(kSource, kGrid, 1.0);
  const Wavepacket adv = build_advanced_gaussian(kDetector, kGrid, 1.0);
  CHECK_THROWS_AS(momentum_space_oracle(adv, adv), ConfigError);
  CHECK_THROWS_AS(momentum_space_overlap(psi, adv), ConfigError);
  CHECK_THROWS_AS(si_transition_amplitude(psi, adv, {}), ConfigError);
  CHECK_THROWS_AS(si_transition_amplitude(adv, adv, {0.0}), ConfigError);
}

TEST_CASE("time reversal") {
  const auto [forward, exchanged] = time_reversal_check(kSource, kDetector, kGrid, 1.0);
  CHECK(std::abs(forward - 0.19) <= 0.01);
  CHECK(std::abs(forward - exchanged) <= 1e-9);

  const auto [src2, det2] = exchanged_specs(kSource, kDetector);
  CHECK(src2.center == kDetector.center);
  CHECK(src2.momentum == kDetector.momentum);
  CHECK(src2.anchor_time == kSource.anchor_time);
  CHECK(det2.center == kSource.center);
  CHECK(det2.anchor_time == kDetector.anchor_time);
  CHECK(det2.target_norm == -1);

  const GaussianSpec self_detector{kSource.center, kSource.width, -kSource.momentum, kSource.anchor_time, -1};
  const auto [p1, p2] = time_reversal_check(kSource, self_detector, kGrid, 1.0);
  CHECK(p1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p2 == doctest::Approx(1.0).epsilon(1e-12));
}
