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
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qclone/cloner.hpp"
#include "qclone/errors.hpp"
#include "qclone/nelder_mead.hpp"
#include "qclone/optics.hpp"

namespace qclone {

enum class Model { TwoParam, ThreeParam };
enum class NoiseMode { Exact, Shot };

inline const char* to_string(Model m) { return m == Model::TwoParam ? "1" : "2"; }
inline const char* to_string(NoiseMode n) { return n == NoiseMode::Exact ? "exact" : "shot"; }

// Ancilla |H>; see select_eigen_ancilla().
inline constexpr double kDefaultFixedOmegaDeg = 0.0;
inline constexpr double kDefaultMeanCounts = 400.0;
inline constexpr int kDefaultExactBudget = 200;
inline constexpr int kDefaultShotBudget = 120;
inline constexpr int kDefaultTestSetSize = 40;

/**
 * Everything that determines a training run. Angles are in degrees.
 *
 * Model 1 (TwoParam) optimizes (phi, theta) with the ancilla fixed at
 * fixed_omega_deg; Model 2 (ThreeParam) optimizes (phi, theta, omega).
 */
struct ExperimentConfig {
  Model model = Model::TwoParam;
  double fixed_omega_deg = kDefaultFixedOmegaDeg;
  std::vector<nm::Point> initial_simplex;
  double mean_total_counts = kDefaultMeanCounts;
  NoiseMode noise = NoiseMode::Exact;
  std::uint64_t seed = 1;
  nm::OptimizerConfig optimizer;
  int test_set_size = kDefaultTestSetSize;

  static std::vector<nm::Point> default_simplex(Model model) {
    // First vertex: the balanced splitter.
    if (model == Model::TwoParam) return {{22.5, 22.5}, {32.5, 22.5}, {22.5, 32.5}};
    return {{22.5, 22.5, 22.5}, {32.5, 22.5, 22.5}, {22.5, 32.5, 22.5}, {22.5, 22.5, 32.5}};
  }

  static ExperimentConfig defaults(Model model = Model::TwoParam,
                                   NoiseMode noise = NoiseMode::Exact) {
    ExperimentConfig cfg;
    cfg.model = model;
    cfg.noise = noise;
    cfg.initial_simplex = default_simplex(model);
    cfg.optimizer.max_evaluations =
        noise == NoiseMode::Exact ? kDefaultExactBudget : kDefaultShotBudget;
    return cfg;
  }

  std::size_t dimension() const { return model == Model::TwoParam ? 2 : 3; }

  void validate() const {
    optimizer.validate();
    const std::size_t n = dimension();
    if (initial_simplex.size() != n + 1)
      throw PreconditionError("model " + std::string(to_string(model)) + " needs " +
                              std::to_string(n + 1) + " simplex vertices, got " +
                              std::to_string(initial_simplex.size()));
    for (const auto& v : initial_simplex)
      if (v.size() != n)
        throw PreconditionError("simplex vertex has " + std::to_string(v.size()) +
                                " coordinates, model needs " + std::to_string(n));
    if (!(mean_total_counts > 0) || !std::isfinite(mean_total_counts))
      throw PreconditionError("mean_total_counts must be positive");
    if (test_set_size < 1) throw PreconditionError("test_set_size must be >= 1");
    if (!std::isfinite(fixed_omega_deg)) throw PreconditionError("fixed omega not finite");
  }

  /// Gate settings for an optimizer point (degrees).
  GateParams params_for(const nm::Point& deg) const {
    if (deg.size() != dimension())
      throw PreconditionError("point dimension does not match model");
    const double omega = model == Model::TwoParam ? fixed_omega_deg : deg[2];
    return GateParams::from_degrees(deg[0], deg[1], omega);
  }
};

/// C = (1 - F1)^2 + (1 - F2)^2 + (F1 - F2)^2
inline double cost(const FidelityPair& f) {
  const double a = 1.0 - f.f1, b = 1.0 - f.f2, c = f.f1 - f.f2;
  return a * a + b * b + c * c;
}

// Independent generator streams derived from the experiment seed.
enum class Stream : std::uint32_t { Training = 0, Testing = 1 };

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffU),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

template <class URBG>
double draw_eta(URBG& rng) {
  return std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng);
}

/// Fidelities for one signal instance under the configured noise model.
template <class URBG>
FidelityPair measure_fidelities(const GateParams& params, double eta,
                                const ExperimentConfig& cfg, URBG& rng) {
  if (cfg.noise == NoiseMode::Exact) return exact_fidelities(params, eta);
  return estimate_fidelities(sample_counts(params, eta, cfg.mean_total_counts, rng));
}

/// One gate run: a fresh training instance evaluated at a parameter point.
struct RunSample {
  GateParams params;
  double eta = 0.0;
  FidelityPair fidelities;
  double cost = 0.0;
};

template <class URBG>
RunSample sample_run(const nm::Point& point_deg, const ExperimentConfig& cfg, URBG& rng) {
  RunSample s;
  s.params = cfg.params_for(point_deg);
  s.eta = draw_eta(rng);
  s.fidelities = measure_fidelities(s.params, s.eta, cfg, rng);
  s.cost = cost(s.fidelities);
  return s;
}

/**
 * The online training objective: every call draws a new equatorial signal
 * state and returns the cost measured on it. The most recent sample is kept
 * for the trace.
 */
class CloningObjective {
 public:
  CloningObjective(const ExperimentConfig& cfg, std::mt19937_64& rng)
      : cfg_(&cfg), rng_(&rng) {}

  double operator()(const nm::Point& point_deg) {
    last_ = sample_run(point_deg, *cfg_, *rng_);
    return last_.cost;
  }

  const RunSample& last() const noexcept { return last_; }

 private:
  const ExperimentConfig* cfg_;
  std::mt19937_64* rng_;
  RunSample last_;
};

struct RunRecord {
  int run = 0;
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  double omega_deg = 0.0;
  double eta_rad = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double cost = 0.0;
  double simplex_size_deg = 0.0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct SimplexRecord {
  int iteration = 0;
  nm::StepKind kind = nm::StepKind::Reflect;
  nm::Simplex simplex;
};

struct TrainingResult {
  nm::Point best_point_deg;
  GateParams best_params;
  double best_cost = 0.0;
  bool converged = false;
  int evaluations = 0;
  int iterations = 0;
};

/// Ordered record of every gate run plus the optimizer's simplex history.
struct LearningTrace {
  std::vector<RunRecord> runs;
  std::vector<SimplexRecord> simplices;
  TrainingResult final;
};

inline LearningTrace train(const ExperimentConfig& cfg) {
  cfg.validate();
  auto rng = make_rng(cfg.seed, Stream::Training);
  CloningObjective objective(cfg, rng);
  LearningTrace trace;

  auto on_eval = [&](const nm::Evaluation& e) {
    const RunSample& s = objective.last();
    trace.runs.push_back(RunRecord{e.index, rad_to_deg(s.params.phi),
                                   rad_to_deg(s.params.theta), rad_to_deg(s.params.omega),
                                   s.eta, s.fidelities.f1, s.fidelities.f2, s.cost,
                                   e.simplex_size});
  };
  auto on_iter = [&](int it, const nm::Simplex& s, nm::StepKind kind) {
    trace.simplices.push_back(SimplexRecord{it, kind, s});
  };

  const nm::RunResult r =
      nm::run(cfg.initial_simplex, objective, cfg.optimizer, on_eval, on_iter);

  trace.final.best_point_deg = r.best_point;
  trace.final.best_params = cfg.params_for(r.best_point);
  trace.final.best_cost = r.best_value;
  trace.final.converged = r.converged;
  trace.final.evaluations = r.evaluations;
  trace.final.iterations = r.iterations;
  return trace;
}

struct TestSetResult {
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
  double mean_f2 = 0.0;
  double std_f2 = 0.0;
  int size = 0;
  // Set when size == 1: the standard deviations are reported as 0.
  bool degenerate = false;
};

/// Sample means and (n-1) standard deviations over fresh random signal states.
inline TestSetResult evaluate_test_set(const GateParams& params, const ExperimentConfig& cfg) {
  if (cfg.test_set_size < 1) throw PreconditionError("test_set_size must be >= 1");
  auto rng = make_rng(cfg.seed, Stream::Testing);
  const int n = cfg.test_set_size;
  std::vector<double> f1(n), f2(n);
  for (int i = 0; i < n; ++i) {
    const double eta = draw_eta(rng);
    const FidelityPair f = measure_fidelities(params, eta, cfg, rng);
    f1[i] = f.f1;
    f2[i] = f.f2;
  }
  auto mean = [n](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / n;
  };
  auto stddev = [n](const std::vector<double>& v, double m) {
    if (n < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (n - 1));
  };
  TestSetResult r;
  r.size = n;
  r.degenerate = n == 1;
  r.mean_f1 = mean(f1);
  r.mean_f2 = mean(f2);
  r.std_f1 = stddev(f1, r.mean_f1);
  r.std_f2 = stddev(f2, r.mean_f2);
  return r;
}

/// Inclusive, evenly spaced angle grid in degrees.
struct AxisRange {
  double lo_deg = 0.0;
  double hi_deg = 0.0;
  int points = 2;

  static AxisRange with_step(double lo, double hi, double step_deg) {
    if (!(step_deg > 0)) throw PreconditionError("grid step must be > 0");
    const int intervals = static_cast<int>(std::floor((hi - lo) / step_deg + 1e-9));
    return {lo, lo + intervals * step_deg, intervals + 1};
  }

  void validate() const {
    if (!std::isfinite(lo_deg) || !std::isfinite(hi_deg))
      throw PreconditionError("grid bounds must be finite");
    if (!(hi_deg > lo_deg)) throw PreconditionError("grid range is empty or inverted");
    if (points < 2) throw PreconditionError("grid needs at least 2 points per axis");
  }

  double at(int i) const {
    return i == points - 1 ? hi_deg : lo_deg + (hi_deg - lo_deg) * i / (points - 1);
  }
};

struct LandscapeCell {
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  double cost = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;

  double min_fidelity() const { return std::min(f1, f2); }
};

struct Landscape {
  AxisRange phi;
  AxisRange theta;
  double omega_deg = 0.0;
  int eta_samples = 1;
  std::vector<LandscapeCell> cells;  // phi-major
  std::size_t min_cost_index = 0;
  std::size_t max_fidelity_index = 0;  // argmax of min(F1, F2)

  const LandscapeCell& min_cost_cell() const { return cells.at(min_cost_index); }
  const LandscapeCell& max_fidelity_cell() const { return cells.at(max_fidelity_index); }
};

// Ancilla cos2w|H> + sin2w|V> is a polarization eigenstate when w is a multiple of 45 deg.
inline bool is_eigen_ancilla(double omega_deg) {
  return std::abs(std::sin(deg_to_rad(4 * omega_deg))) < 1e-12;
}

/**
 * Exact cost over a (phi, theta) grid at fixed omega. For an eigenstate
 * ancilla the fidelities do not depend on the signal phase and a single
 * phase is used; otherwise cost and fidelities are averaged over
 * `eta_samples` equally spaced phases. Phases with no coincidences are left
 * out of the average; a cell with none at all gets a NaN cost and zero
 * fidelities.
 */
inline Landscape scan_landscape(const AxisRange& phi, const AxisRange& theta,
                                double omega_deg, int eta_samples = 16) {
  phi.validate();
  theta.validate();
  if (eta_samples < 1) throw PreconditionError("eta_samples must be >= 1");

  Landscape out;
  out.phi = phi;
  out.theta = theta;
  out.omega_deg = omega_deg;
  out.eta_samples = is_eigen_ancilla(omega_deg) ? 1 : eta_samples;
  out.cells.reserve(static_cast<std::size_t>(phi.points) * theta.points);

  double best_cost = std::numeric_limits<double>::infinity();
  double best_fid = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < phi.points; ++i)
    for (int j = 0; j < theta.points; ++j) {
      LandscapeCell cell{phi.at(i), theta.at(j), 0.0, 0.0, 0.0};
      const GateParams p = GateParams::from_degrees(cell.phi_deg, cell.theta_deg, omega_deg);
      int used = 0;
      for (int k = 0; k < out.eta_samples; ++k) {
        const double eta = 2.0 * kPi * k / out.eta_samples;
        FidelityPair f;
        try {
          f = exact_fidelities(p, eta);
        } catch (const DegeneratePostSelectionError&) {
          continue;
        }
        cell.cost += cost(f);
        cell.f1 += f.f1;
        cell.f2 += f.f2;
        ++used;
      }
      if (used == 0) {
        cell.cost = std::numeric_limits<double>::quiet_NaN();
      } else {
        cell.cost /= used;
        cell.f1 /= used;
        cell.f2 /= used;
      }
      if (cell.cost < best_cost) {
        best_cost = cell.cost;
        out.min_cost_index = out.cells.size();
      }
      if (cell.min_fidelity() > best_fid) {
        best_fid = cell.min_fidelity();
        out.max_fidelity_index = out.cells.size();
      }
      out.cells.push_back(cell);
    }
  return out;
}

/**
 * Which polarization eigenstate ancilla (omega = 0 deg for |H>, 45 deg for |V>)
 * reaches the higher symmetric fidelity over a full-period scan at the given
 * step. Ties go to |H>.
 */
inline double select_eigen_ancilla(double step_deg = 0.5) {
  const auto axis = AxisRange::with_step(0.0, 180.0, step_deg);
  const double h = scan_landscape(axis, axis, 0.0).max_fidelity_cell().min_fidelity();
  const double v = scan_landscape(axis, axis, 45.0).max_fidelity_cell().min_fidelity();
  return v > h + 1e-9 ? 45.0 : 0.0;
}

}  // namespace qclone
