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

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "qclone/errors.hpp"
#include "qclone/matrix.hpp"

namespace qclone {

enum class Polarization { H, V };

/**
 * Optical mode label: polarization x spatial path.
 *
 * Flat index order is (H,1), (V,1), (H,2), (V,2), ... so polarization varies
 * fastest. Spatial modes are numbered from 1.
 */
struct ModeLabel {
  Polarization polarization = Polarization::H;
  int spatial = 1;

  constexpr std::size_t index() const {
    return 2 * static_cast<std::size_t>(spatial - 1) +
           (polarization == Polarization::V ? 1 : 0);
  }

  static constexpr ModeLabel from_index(std::size_t i) {
    return ModeLabel{i % 2 == 0 ? Polarization::H : Polarization::V,
                     static_cast<int>(i / 2) + 1};
  }

  std::string name() const {
    return std::string(polarization == Polarization::H ? "H" : "V") +
           std::to_string(spatial);
  }

  friend constexpr bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

inline constexpr ModeLabel kH1{Polarization::H, 1};
inline constexpr ModeLabel kV1{Polarization::V, 1};
inline constexpr ModeLabel kH2{Polarization::H, 2};
inline constexpr ModeLabel kV2{Polarization::V, 2};

/// Occupation-number vector over flat-indexed modes.
class FockConfig {
 public:
  FockConfig() = default;

  explicit FockConfig(std::vector<int> occupations) : occ_(std::move(occupations)) {
    for (int n : occ_)
      if (n < 0) throw PreconditionError("negative mode occupation");
  }

  FockConfig(std::initializer_list<int> occupations)
      : FockConfig(std::vector<int>(occupations)) {}

  // Config with one photon in each listed mode (repeats allowed).
  static FockConfig from_modes(std::size_t num_modes,
                               std::initializer_list<ModeLabel> photons) {
    std::vector<int> occ(num_modes, 0);
    for (const auto& m : photons) {
      if (m.index() >= num_modes) throw DimensionError("mode label out of range");
      ++occ[m.index()];
    }
    return FockConfig(std::move(occ));
  }

  std::size_t num_modes() const noexcept { return occ_.size(); }
  int total_photons() const noexcept { return std::accumulate(occ_.begin(), occ_.end(), 0); }
  int operator[](std::size_t mode) const { return occ_[mode]; }
  int operator[](const ModeLabel& m) const { return occ_[m.index()]; }
  const std::vector<int>& occupations() const noexcept { return occ_; }

  friend bool operator==(const FockConfig&, const FockConfig&) = default;

 private:
  std::vector<int> occ_;
};

/**
 * All configurations of `photons` bosons over `modes` modes.
 *
 * Ordered so that photons sit in low-index modes first: for 4 modes and
 * 2 photons the sequence starts (2,0,0,0), (1,1,0,0), (1,0,1,0), ...
 */
inline std::vector<FockConfig> enumerate_configs(std::size_t modes, int photons) {
  std::vector<FockConfig> out;
  if (modes == 0) {
    if (photons == 0) out.emplace_back();
    return out;
  }
  std::vector<int> occ(modes, 0);
  auto fill = [&](auto&& self, std::size_t mode, int remaining) -> void {
    if (mode + 1 == modes) {
      occ[mode] = remaining;
      out.emplace_back(occ);
      return;
    }
    for (int n = remaining; n >= 0; --n) {
      occ[mode] = n;
      self(self, mode + 1, remaining - n);
    }
    occ[mode] = 0;
  };
  fill(fill, 0, photons);
  return out;
}

inline constexpr std::size_t kMaxPermanentSize = 24;

/**
 * Matrix permanent via Ryser's inclusion-exclusion formula.
 *
 *   perm(A) = (-1)^n sum_{S subset [n]} (-1)^{|S|} prod_i sum_{j in S} a_ij
 *
 * Subsets are visited in binary-reflected Gray-code order so each step adds
 * or removes a single column and the row sums update in O(n). Total cost
 * is O(2^n n).
 */
inline Complex permanent(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionError("permanent of non-square matrix");
  const std::size_t n = m.rows();
  if (n > kMaxPermanentSize)
    throw SizeError("permanent size " + std::to_string(n) + " exceeds guard " +
                    std::to_string(kMaxPermanentSize));
  if (n == 0) return Complex{1.0, 0.0};
  if (n == 1) return m(0, 0);

  std::vector<Complex> row_sums(n, Complex{});
  Complex total{};
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const auto col = static_cast<std::size_t>(std::countr_zero(k));
    const std::uint64_t bit = std::uint64_t{1} << col;
    gray ^= bit;
    if (gray & bit) {
      for (std::size_t i = 0; i < n; ++i) row_sums[i] += m(i, col);
    } else {
      for (std::size_t i = 0; i < n; ++i) row_sums[i] -= m(i, col);
    }
    Complex prod = row_sums[0];
    for (std::size_t i = 1; i < n; ++i) prod *= row_sums[i];
    // (-1)^{n - |S|}
    const bool odd = ((n - static_cast<std::size_t>(std::popcount(gray))) & 1U) != 0;
    total += odd ? -prod : prod;
  }
  return total;
}

/**
 * The N x N matrix whose permanent gives the transition amplitude
 * input -> output: column i of `u` repeated input[i] times, row j repeated
 * output[j] times. Unoccupied modes drop out.
 *
 * `u(j, i)` is the amplitude for a photon entering mode i to leave in mode j.
 */
inline ComplexMatrix amplitude_submatrix(const ComplexMatrix& u, const FockConfig& input,
                                         const FockConfig& output) {
  if (!u.is_square()) throw DimensionError("mode transformation must be square");
  if (input.num_modes() != u.cols() || output.num_modes() != u.rows())
    throw DimensionError("configuration mode count does not match matrix");
  const int photons = input.total_photons();
  if (photons != output.total_photons())
    throw ConservationError("input carries " + std::to_string(photons) +
                            " photons, output carries " +
                            std::to_string(output.total_photons()));

  std::vector<std::size_t> cols;
  std::vector<std::size_t> rows;
  cols.reserve(photons);
  rows.reserve(photons);
  for (std::size_t i = 0; i < input.num_modes(); ++i)
    for (int k = 0; k < input[i]; ++k) cols.push_back(i);
  for (std::size_t j = 0; j < output.num_modes(); ++j)
    for (int k = 0; k < output[j]; ++k) rows.push_back(j);

  ComplexMatrix sub(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = u(rows[r], cols[c]);
  return sub;
}

namespace detail {

inline double factorial_product(const FockConfig& config) {
  double p = 1.0;
  for (int n : config.occupations())
    for (int k = 2; k <= n; ++k) p *= k;
  return p;
}

}  // namespace detail

/// <output| U |input> = perm(U_sub) / sqrt(prod input_i! prod output_j!).
inline Complex transition_amplitude(const ComplexMatrix& u, const FockConfig& input,
                                    const FockConfig& output) {
  const ComplexMatrix sub = amplitude_submatrix(u, input, output);
  return permanent(sub) /
         std::sqrt(detail::factorial_product(input) * detail::factorial_product(output));
}

/**
 * Pure state with a fixed photon number, expanded in the Fock basis produced
 * by enumerate_configs().
 */
class FockState {
 public:
  FockState() = default;

  FockState(std::size_t modes, int photons)
      : modes_(modes), photons_(photons), basis_(enumerate_configs(modes, photons)),
        amplitudes_(basis_.size()) {}

  std::size_t num_modes() const noexcept { return modes_; }
  int photons() const noexcept { return photons_; }
  std::size_t dimension() const noexcept { return basis_.size(); }
  const std::vector<FockConfig>& basis() const noexcept { return basis_; }
  const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }

  Complex& amplitude(std::size_t k) { return amplitudes_[k]; }
  Complex amplitude(std::size_t k) const { return amplitudes_[k]; }

  std::size_t index_of(const FockConfig& config) const {
    for (std::size_t k = 0; k < basis_.size(); ++k)
      if (basis_[k] == config) return k;
    throw PreconditionError("configuration not in state basis");
  }

  Complex& operator[](const FockConfig& config) { return amplitudes_[index_of(config)]; }
  Complex operator[](const FockConfig& config) const {
    return amplitudes_[index_of(config)];
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
  }

 private:
  std::size_t modes_ = 0;
  int photons_ = 0;
  std::vector<FockConfig> basis_;
  std::vector<Complex> amplitudes_;
};

}  // namespace qclone
