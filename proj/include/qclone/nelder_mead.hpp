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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qclone/errors.hpp"

namespace qclone::nm {

using Point = std::vector<double>;

/**
 * Nelder-Mead coefficients and stopping rule.
 *
 * size_tolerance is compared against the largest vertex-to-vertex distance.
 * When angle_period > 0 every coordinate difference is first wrapped into
 * (-period/2, period/2], so vertices on either side of a period boundary
 * count as close. Set it to 0 for ordinary Euclidean problems.
 */
struct OptimizerConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double size_tolerance = 0.1;
  int max_evaluations = 200;
  double angle_period = 180.0;

  void validate() const {
    if (!(reflection > 0)) throw PreconditionError("reflection coefficient must be > 0");
    if (!(expansion > 1)) throw PreconditionError("expansion coefficient must be > 1");
    if (!(contraction > 0 && contraction < 1))
      throw PreconditionError("contraction coefficient must be in (0, 1)");
    if (!(shrink > 0 && shrink < 1))
      throw PreconditionError("shrink coefficient must be in (0, 1)");
    if (!(size_tolerance > 0)) throw PreconditionError("size tolerance must be > 0");
    if (max_evaluations <= 0) throw PreconditionError("evaluation budget must be > 0");
    if (angle_period < 0) throw PreconditionError("angle period must be >= 0");
  }
};

struct Simplex {
  std::vector<Point> vertices;
  std::vector<double> values;

  std::size_t dimension() const { return vertices.empty() ? 0 : vertices.front().size(); }

  void validate() const {
    const std::size_t n = dimension();
    if (n == 0) throw PreconditionError("simplex has no dimension");
    if (vertices.size() != n + 1)
      throw PreconditionError("simplex in " + std::to_string(n) + " dimensions needs " +
                              std::to_string(n + 1) + " vertices");
    for (const auto& v : vertices)
      if (v.size() != n) throw PreconditionError("simplex vertices differ in dimension");
    if (values.size() != vertices.size())
      throw PreconditionError("simplex values not cached for every vertex");
  }

  std::size_t best_index() const {
    return static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
  }

  friend bool operator==(const Simplex&, const Simplex&) = default;
};

enum class StepKind { Reflect, Expand, ContractOutside, ContractInside, Shrink };

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::Reflect: return "reflect";
    case StepKind::Expand: return "expand";
    case StepKind::ContractOutside: return "contract_outside";
    case StepKind::ContractInside: return "contract_inside";
    case StepKind::Shrink: return "shrink";
  }
  return "unknown";
}

struct StepOutcome {
  Simplex simplex;
  StepKind kind;
};

inline double wrapped_difference(double a, double b, double period) {
  double d = a - b;
  if (period > 0) {
    d = std::fmod(d, period);
    if (d > period / 2) d -= period;
    if (d <= -period / 2) d += period;
  }
  return d;
}

/// Largest pairwise vertex distance.
inline double simplex_size(const std::vector<Point>& vertices, double angle_period) {
  double worst = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < vertices[i].size(); ++k) {
        const double d = wrapped_difference(vertices[i][k], vertices[j][k], angle_period);
        s += d * d;
      }
      worst = std::max(worst, std::sqrt(s));
    }
  return worst;
}

namespace detail {

template <class Objective>
double evaluate(Objective& objective, const Point& x) {
  const double v = objective(x);
  if (!std::isfinite(v)) throw EvaluationError("objective returned a non-finite value");
  return v;
}

// base + scale * (toward - base)
inline Point affine(const Point& base, const Point& toward, double scale) {
  Point p(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) p[i] = base[i] + scale * (toward[i] - base[i]);
  return p;
}

inline void sort_by_value(Simplex& s) {
  std::vector<std::size_t> order(s.vertices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
  Simplex sorted;
  sorted.vertices.reserve(order.size());
  sorted.values.reserve(order.size());
  for (std::size_t i : order) {
    sorted.vertices.push_back(std::move(s.vertices[i]));
    sorted.values.push_back(s.values[i]);
  }
  s = std::move(sorted);
}

}  // namespace detail

/**
 * One Nelder-Mead iteration.
 *
 * Vertices are ordered best to worst, then: reflect the worst vertex through
 * the centroid of the others; expand if the reflection beats the best;
 * accept it if it beats the second worst; otherwise contract (outside if it
 * beats the worst, inside if not) and shrink toward the best vertex when the
 * contraction fails. A reflected value equal to a threshold counts as not
 * better. Cached vertex values are never re-evaluated.
 *
 * The input simplex is taken by value, so an objective that throws leaves the
 * caller's simplex untouched.
 */
template <class Objective>
StepOutcome step(Simplex s, Objective&& objective, const OptimizerConfig& cfg = {}) {
  s.validate();
  detail::sort_by_value(s);
  const std::size_t n = s.dimension();
  const std::size_t worst = n;

  Point centroid(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t k = 0; k < n; ++k) centroid[k] += s.vertices[v][k];
  for (auto& c : centroid) c /= static_cast<double>(n);

  const Point reflected = detail::affine(centroid, s.vertices[worst], -cfg.reflection);
  const double f_reflected = detail::evaluate(objective, reflected);

  auto replace_worst = [&](Point p, double f, StepKind kind) {
    s.vertices[worst] = std::move(p);
    s.values[worst] = f;
    return StepOutcome{std::move(s), kind};
  };

  if (f_reflected < s.values.front()) {
    Point expanded = detail::affine(centroid, reflected, cfg.expansion);
    const double f_expanded = detail::evaluate(objective, expanded);
    if (f_expanded < f_reflected)
      return replace_worst(std::move(expanded), f_expanded, StepKind::Expand);
    return replace_worst(reflected, f_reflected, StepKind::Reflect);
  }
  if (f_reflected < s.values[worst - 1])
    return replace_worst(reflected, f_reflected, StepKind::Reflect);

  if (f_reflected < s.values[worst]) {
    Point contracted = detail::affine(centroid, reflected, cfg.contraction);
    const double f_contracted = detail::evaluate(objective, contracted);
    if (f_contracted <= f_reflected)
      return replace_worst(std::move(contracted), f_contracted, StepKind::ContractOutside);
  } else {
    Point contracted = detail::affine(centroid, s.vertices[worst], cfg.contraction);
    const double f_contracted = detail::evaluate(objective, contracted);
    if (f_contracted < s.values[worst])
      return replace_worst(std::move(contracted), f_contracted, StepKind::ContractInside);
  }

  // Shrink all vertices toward the best one. Evaluate into a scratch simplex
  // so a failing evaluation does not leave half-updated values behind.
  Simplex shrunk = s;
  for (std::size_t v = 1; v <= n; ++v) {
    shrunk.vertices[v] = detail::affine(s.vertices[0], s.vertices[v], cfg.shrink);
    shrunk.values[v] = detail::evaluate(objective, shrunk.vertices[v]);
  }
  return StepOutcome{std::move(shrunk), StepKind::Shrink};
}

/// One objective evaluation as reported to a run's trace sink.
struct Evaluation {
  int index = 0;  // 1-based, in call order
  Point point;
  double value = 0.0;
  double simplex_size = 0.0;  // size of the simplex that requested the point
};

struct RunResult {
  Point best_point;
  double best_value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  Simplex final_simplex;
};

using EvaluationSink = std::function<void(const Evaluation&)>;
using IterationSink = std::function<void(int iteration, const Simplex&, StepKind)>;

namespace detail {
struct BudgetExhausted {};
}  // namespace detail

/**
 * Minimize from the given initial vertices until the simplex is smaller than
 * cfg.size_tolerance or cfg.max_evaluations objective calls have been made.
 *
 * The initial vertices are evaluated here and count against the budget.
 * Every call of the objective is reported to `on_evaluation` in order;
 * `on_iteration` sees the simplex after each completed step. The budget is a
 * hard cap: a step that would exceed it is abandoned and the last complete
 * simplex is returned with converged = false.
 */
template <class Objective>
RunResult run(const std::vector<Point>& initial, Objective&& objective,
              const OptimizerConfig& cfg, const EvaluationSink& on_evaluation = {},
              const IterationSink& on_iteration = {}) {
  cfg.validate();
  Simplex s;
  s.vertices = initial;
  s.values.assign(initial.size(), 0.0);
  s.validate();

  int evaluations = 0;
  double current_size = simplex_size(s.vertices, cfg.angle_period);
  auto counted = [&](const Point& x) -> double {
    if (evaluations >= cfg.max_evaluations) throw detail::BudgetExhausted{};
    const double v = objective(x);
    ++evaluations;
    if (on_evaluation) on_evaluation(Evaluation{evaluations, x, v, current_size});
    return v;
  };

  RunResult result;
  auto finish = [&](const Simplex& final_simplex, bool converged, int iterations) {
    result.final_simplex = final_simplex;
    if (!final_simplex.values.empty()) {
      const std::size_t b = final_simplex.best_index();
      result.best_point = final_simplex.vertices[b];
      result.best_value = final_simplex.values[b];
    }
    result.evaluations = evaluations;
    result.iterations = iterations;
    result.converged = converged;
    return result;
  };

  try {
    for (std::size_t v = 0; v < s.vertices.size(); ++v)
      s.values[v] = detail::evaluate(counted, s.vertices[v]);
  } catch (const detail::BudgetExhausted&) {
    Simplex partial;
    for (int v = 0; v < evaluations; ++v) {
      partial.vertices.push_back(s.vertices[v]);
      partial.values.push_back(s.values[v]);
    }
    return finish(partial, false, 0);
  }

  int iterations = 0;
  while (true) {
    current_size = simplex_size(s.vertices, cfg.angle_period);
    if (current_size < cfg.size_tolerance) return finish(s, true, iterations);
    try {
      StepOutcome out = step(s, counted, cfg);
      s = std::move(out.simplex);
      ++iterations;
      if (on_iteration) on_iteration(iterations, s, out.kind);
    } catch (const detail::BudgetExhausted&) {
      return finish(s, false, iterations);
    }
  }
}

}  // namespace qclone::nm
