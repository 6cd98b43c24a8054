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

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "qclone/errors.hpp"
#include "qclone/fock.hpp"
#include "qclone/optics.hpp"

namespace qclone {

// 1/2 (1 + 1/sqrt2): optimal symmetric 1->2 phase-covariant cloning fidelity.
inline constexpr double kOptimalCloningFidelity = 0.5 * (1.0 + std::numbers::sqrt2 / 2);

// Coincidence probabilities below this are treated as a failed post-selection.
inline constexpr double kMinCoincidenceProbability = 1e-14;

/// Fidelities of clone 1 (output spatial mode 1) and clone 2 (spatial mode 2).
struct FidelityPair {
  double f1 = 0.0;
  double f2 = 0.0;
};

/**
 * Coincidence tallies for the four projection settings. The first index
 * refers to clone 1; p = projection on the signal state, o = on its
 * orthogonal complement.
 */
struct CoincidenceCounts {
  std::int64_t pp = 0;
  std::int64_t po = 0;
  std::int64_t op = 0;
  std::int64_t oo = 0;

  std::int64_t sigma() const noexcept { return pp + po + op + oo; }

  friend bool operator==(const CoincidenceCounts&, const CoincidenceCounts&) = default;
};

/// Absolute (not post-selection normalized) projection probabilities.
struct ProjectionProbabilities {
  double pp = 0.0;
  double po = 0.0;
  double op = 0.0;
  double oo = 0.0;

  // Probability of one photon in each output spatial mode.
  double coincidence() const noexcept { return pp + po + op + oo; }
};

// amplitudes[x][y]: clone-1 polarization x, clone-2 polarization y (0 = H, 1 = V).
using CoincidenceAmplitudes = std::array<std::array<Complex, 2>, 2>;

using Qubit2x2 = std::array<std::array<Complex, 2>, 2>;

/// Reduced polarization density matrices of the two clones after post-selection.
struct CloneDensityMatrices {
  Qubit2x2 clone1{};
  Qubit2x2 clone2{};
};

/**
 * Unnormalized two-qubit polarization state left after keeping only the
 * events with exactly one photon in each output spatial mode.
 */
inline CoincidenceAmplitudes coincidence_amplitudes(const GateParams& params, double eta) {
  const TwoPhotonState out =
      evolve(prepare_input(eta, params.omega), build_scattering_matrix(params));
  constexpr std::array<ModeLabel, 2> mode1{kH1, kV1};
  constexpr std::array<ModeLabel, 2> mode2{kH2, kV2};
  CoincidenceAmplitudes c{};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      c[x][y] = out[FockConfig::from_modes(kGateModes, {mode1[x], mode2[y]})];
  return c;
}

namespace detail {

inline double project(const CoincidenceAmplitudes& c, const PolarizationQubit& a,
                      const PolarizationQubit& b) {
  const std::array<Complex, 2> pa{std::conj(a.h), std::conj(a.v)};
  const std::array<Complex, 2> pb{std::conj(b.h), std::conj(b.v)};
  Complex s{};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) s += pa[x] * pb[y] * c[x][y];
  return std::norm(s);
}

}  // namespace detail

/**
 * Probabilities of the four projection settings for signal phase eta.
 * Their sum is the coincidence probability; bunched events are discarded
 * and not renormalized here.
 */
inline ProjectionProbabilities coincidence_probabilities(const GateParams& params,
                                                         double eta) {
  const auto c = coincidence_amplitudes(params, eta);
  const auto par = PolarizationQubit::equatorial(eta);
  const auto perp = PolarizationQubit::equatorial_orthogonal(eta);
  return {detail::project(c, par, par), detail::project(c, par, perp),
          detail::project(c, perp, par), detail::project(c, perp, perp)};
}

/// Clone fidelities from the projection statistics, F1 = (pp+po)/sum, F2 = (pp+op)/sum.
inline FidelityPair exact_fidelities(const GateParams& params, double eta) {
  const auto p = coincidence_probabilities(params, eta);
  const double total = p.coincidence();
  if (!(total > kMinCoincidenceProbability))
    throw DegeneratePostSelectionError("coincidence probability is zero");
  return {(p.pp + p.po) / total, (p.pp + p.op) / total};
}

inline CloneDensityMatrices clone_density_matrices(const GateParams& params, double eta) {
  auto c = coincidence_amplitudes(params, eta);
  double norm = 0.0;
  for (const auto& row : c)
    for (const auto& a : row) norm += std::norm(a);
  if (!(norm > kMinCoincidenceProbability))
    throw DegeneratePostSelectionError("coincidence probability is zero");
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& row : c)
    for (auto& a : row) a *= scale;

  CloneDensityMatrices rho;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        rho.clone1[i][j] += c[i][k] * std::conj(c[j][k]);  // trace out clone 2
        rho.clone2[i][j] += c[k][i] * std::conj(c[k][j]);  // trace out clone 1
      }
  return rho;
}

/// Same fidelities via partial traces: F_j = <psi_s| rho_j |psi_s>.
inline FidelityPair fidelities_via_density_matrix(const GateParams& params, double eta) {
  const auto rho = clone_density_matrices(params, eta);
  const auto psi = PolarizationQubit::equatorial(eta);
  const std::array<Complex, 2> v{psi.h, psi.v};
  auto expect = [&v](const Qubit2x2& m) {
    Complex s{};
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) s += std::conj(v[i]) * m[i][j] * v[j];
    return s.real();
  };
  return {expect(rho.clone1), expect(rho.clone2)};
}

/**
 * Simulated measurement run: each projection setting is counted
 * independently as Poisson(mean_total * p_setting / p_coincidence).
 */
template <class URBG>
CoincidenceCounts sample_counts(const GateParams& params, double eta, double mean_total,
                                URBG& rng) {
  if (!(mean_total > 0.0) || !std::isfinite(mean_total))
    throw PreconditionError("mean_total must be positive and finite");
  const auto p = coincidence_probabilities(params, eta);
  const double total = p.coincidence();
  if (!(total > kMinCoincidenceProbability))
    throw DegeneratePostSelectionError("coincidence probability is zero");
  auto draw = [&](double prob) -> std::int64_t {
    const double mean = mean_total * prob / total;
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::int64_t>(mean)(rng);
  };
  CoincidenceCounts counts;
  counts.pp = draw(p.pp);
  counts.po = draw(p.po);
  counts.op = draw(p.op);
  counts.oo = draw(p.oo);
  return counts;
}

inline FidelityPair estimate_fidelities(const CoincidenceCounts& counts) {
  if (counts.pp < 0 || counts.po < 0 || counts.op < 0 || counts.oo < 0)
    throw PreconditionError("negative coincidence count");
  const auto sigma = counts.sigma();
  if (sigma == 0) throw EmptySampleError("no coincidences recorded");
  const double s = static_cast<double>(sigma);
  return {static_cast<double>(counts.pp + counts.po) / s,
          static_cast<double>(counts.pp + counts.op) / s};
}

}  // namespace qclone
