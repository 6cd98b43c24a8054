/*
 * Copyright 2026 The qclone Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "qclone/errors.hpp"
#include "qclone/fock.hpp"
#include "qclone/matrix.hpp"

namespace qclone {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Reduce an angle to [0, pi). Half-wave plates act with period pi.
inline double reduce_angle(double rad) {
  double r = std::fmod(rad, kPi);
  if (r < 0) r += kPi;
  return r >= kPi ? 0.0 : r;
}

/**
 * Wave-plate settings of the cloning gate, radians.
 *
 * phi and theta set the H and V splitting ratios of the polarization
 * dependent beam splitter; omega sets the ancilla polarization
 * cos(2 omega)|H> + sin(2 omega)|V>. Raw values are stored unreduced so the
 * optimizer sees a continuous parameter space.
 */
struct GateParams {
  double phi = 0.0;
  double theta = 0.0;
  double omega = 0.0;

  static GateParams from_degrees(double phi_deg, double theta_deg, double omega_deg) {
    return {deg_to_rad(phi_deg), deg_to_rad(theta_deg), deg_to_rad(omega_deg)};
  }

  // Equal modulo the wave-plate period.
  bool equivalent(const GateParams& o, double tol = 1e-12) const {
    auto same = [tol](double a, double b) {
      const double d = std::abs(reduce_angle(a) - reduce_angle(b));
      return d <= tol || kPi - d <= tol;
    };
    return same(phi, o.phi) && same(theta, o.theta) && same(omega, o.omega);
  }
};

/// Single-photon polarization state alpha|H> + beta|V>.
struct PolarizationQubit {
  Complex h{1.0, 0.0};
  Complex v{0.0, 0.0};

  // (|H> + e^{i eta}|V>)/sqrt2
  static PolarizationQubit equatorial(double eta) {
    return {Complex{std::numbers::sqrt2 / 2, 0.0},
            std::polar(std::numbers::sqrt2 / 2, eta)};
  }

  // (|H> - e^{i eta}|V>)/sqrt2
  static PolarizationQubit equatorial_orthogonal(double eta) {
    return {Complex{std::numbers::sqrt2 / 2, 0.0},
            -std::polar(std::numbers::sqrt2 / 2, eta)};
  }

  static PolarizationQubit ancilla(double omega) {
    return {Complex{std::cos(2 * omega), 0.0}, Complex{std::sin(2 * omega), 0.0}};
  }

  double norm_squared() const { return std::norm(h) + std::norm(v); }

  // <this|other>
  Complex overlap(const PolarizationQubit& other) const {
    return std::conj(h) * other.h + std::conj(v) * other.v;
  }
};

/// Two photons over the four modes H1, V1, H2, V2 (ten basis configurations).
using TwoPhotonState = FockState;

inline constexpr std::size_t kGateModes = 4;

/**
 * Scattering matrix of the gate in the annihilation-operator form
 * (a_H1, a_V1, a_H2, a_V2) -> U (a_H1, a_V1, a_H2, a_V2):
 *
 *   [  cos2phi     0       sin2phi     0      ]
 *   [    0      cos2theta    0      sin2theta ]
 *   [ -sin2phi     0       cos2phi     0      ]
 *   [    0     -sin2theta    0      cos2theta ]
 */
inline ComplexMatrix build_scattering_matrix(double phi, double theta) {
  const double cp = std::cos(2 * phi), sp = std::sin(2 * phi);
  const double ct = std::cos(2 * theta), st = std::sin(2 * theta);
  return ComplexMatrix{{cp, 0.0, sp, 0.0},
                       {0.0, ct, 0.0, st},
                       {-sp, 0.0, cp, 0.0},
                       {0.0, -st, 0.0, ct}};
}

inline ComplexMatrix build_scattering_matrix(const GateParams& p) {
  return build_scattering_matrix(p.phi, p.theta);
}

/// Intensity transmittances (t_H, t_V) of spatial mode 1 into itself.
inline std::pair<double, double> splitting_ratios(double phi, double theta) {
  const double ch = std::cos(2 * phi), cv = std::cos(2 * theta);
  return {ch * ch, cv * cv};
}

/**
 * Product input of the cloner: ancilla photon in spatial mode 1 with
 * polarization set by omega, signal photon (|H> + e^{i eta}|V>)/sqrt2 in
 * spatial mode 2.
 */
inline TwoPhotonState prepare_input(double eta, double omega) {
  TwoPhotonState state(kGateModes, 2);
  const auto anc = PolarizationQubit::ancilla(omega);
  const auto sig = PolarizationQubit::equatorial(eta);
  state[FockConfig::from_modes(kGateModes, {kH1, kH2})] = anc.h * sig.h;
  state[FockConfig::from_modes(kGateModes, {kH1, kV2})] = anc.h * sig.v;
  state[FockConfig::from_modes(kGateModes, {kV1, kH2})] = anc.v * sig.h;
  state[FockConfig::from_modes(kGateModes, {kV1, kV2})] = anc.v * sig.v;
  return state;
}

inline constexpr double kEvolveUnitaryTolerance = 1e-10;

/**
 * Propagate a fixed-photon-number state through the interferometer.
 *
 * `u` is the annihilation-operator scattering matrix as returned by
 * build_scattering_matrix(). Input creation operators map as
 * a_i^dag -> sum_j conj(u_ij) b_j^dag, so the single-photon amplitude matrix
 * fed to the permanents is u^dagger.
 */
inline FockState evolve(const FockState& state, const ComplexMatrix& u) {
  if (!u.is_square() || u.rows() != state.num_modes())
    throw DimensionError("scattering matrix does not match state modes");
  if (u.unitarity_defect() > kEvolveUnitaryTolerance)
    throw PreconditionError("evolve requires a unitary scattering matrix");

  const ComplexMatrix amp = u.adjoint();
  FockState out(state.num_modes(), state.photons());
  const auto& basis = state.basis();
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const Complex in = state.amplitude(s);
    if (in == Complex{}) continue;
    for (std::size_t t = 0; t < basis.size(); ++t)
      out.amplitude(t) += transition_amplitude(amp, basis[s], basis[t]) * in;
  }
  return out;
}

}  // namespace qclone
