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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "qclone/nelder_mead.hpp"
#include "qclone/trainer.hpp"

#ifndef QCLONE_FIXTURE_DIR
#error "QCLONE_FIXTURE_DIR must be defined"
#endif

namespace qclone::nm {
namespace {

OptimizerConfig euclidean(double tol, int budget) {
  OptimizerConfig c;
  c.size_tolerance = tol;
  c.max_evaluations = budget;
  c.angle_period = 0.0;
  return c;
}

double rosenbrock(const Point& x) {
  return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
}

Simplex evaluated(std::vector<Point> vertices, const auto& f) {
  Simplex s;
  s.vertices = std::move(vertices);
  for (const auto& v : s.vertices) s.values.push_back(f(v));
  return s;
}

TEST(OptimizerConfig, Validation) {
  EXPECT_NO_THROW(OptimizerConfig{}.validate());
  auto bad = [](auto mutate) {
    OptimizerConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](auto& c) { c.reflection = 0; }).validate(), PreconditionError);
  EXPECT_THROW(bad([](auto& c) { c.expansion = 1; }).validate(), PreconditionError);
  EXPECT_THROW(bad([](auto& c) { c.contraction = 1; }).validate(), PreconditionError);
  EXPECT_THROW(bad([](auto& c) { c.shrink = 0; }).validate(), PreconditionError);
  EXPECT_THROW(bad([](auto& c) { c.size_tolerance = 0; }).validate(), PreconditionError);
  EXPECT_THROW(bad([](auto& c) { c.max_evaluations = 0; }).validate(), PreconditionError);
}

TEST(Simplex, NeedsNPlusOneVertices) {
  Simplex s;
  s.vertices = {{0, 0}, {1, 0}};
  s.values = {0, 0};
  EXPECT_THROW(s.validate(), PreconditionError);
  s.vertices.push_back({0, 1});
  EXPECT_THROW(s.validate(), PreconditionError);  // values not cached
  s.values.push_back(0);
  EXPECT_NO_THROW(s.validate());
}

TEST(SimplexSize, WrapsAnglesModuloPeriod) {
  EXPECT_NEAR(simplex_size({{0.0, 0.0}, {3.0, 4.0}}, 0.0), 5.0, 1e-12);
  EXPECT_NEAR(simplex_size({{0.05}, {179.95}}, 180.0), 0.1, 1e-9);
  EXPECT_NEAR(simplex_size({{0.05}, {179.95}}, 0.0), 179.9, 1e-9);
}

TEST(Step, QuadraticConverges) {
  auto f = [](const Point& x) { return (x[0] - 1) * (x[0] - 1) + (x[1] - 2) * (x[1] - 2); };
  Simplex s = evaluated({{0, 0}, {1, 0}, {0, 1}}, f);
  for (int i = 0; i < 200; ++i) s = step(s, f).simplex;
  const auto& best = s.vertices[s.best_index()];
  EXPECT_NEAR(best[0], 1.0, 1e-4);
  EXPECT_NEAR(best[1], 2.0, 1e-4);
}

TEST(Step, OneDimensionalAbsoluteValue) {
  auto f = [](const Point& x) { return std::abs(x[0] - 3.0); };
  Simplex s = evaluated({{0}, {1}}, f);
  for (int i = 0; i < 100; ++i) s = step(s, f).simplex;
  EXPECT_NEAR(s.vertices[s.best_index()][0], 3.0, 1e-3);
}

TEST(Step, ConstantObjectiveNeverGrows) {
  auto f = [](const Point&) { return 1.0; };
  Simplex s = evaluated({{0, 0}, {1, 0}, {0, 1}}, f);
  const auto first = step(s, f);
  EXPECT_TRUE(first.kind == StepKind::Shrink || first.kind == StepKind::ContractInside ||
              first.kind == StepKind::ContractOutside);
  double size = simplex_size(s.vertices, 0.0);
  for (int i = 0; i < 50; ++i) {
    s = step(s, f).simplex;
    const double next = simplex_size(s.vertices, 0.0);
    EXPECT_LE(next, size + 1e-12);
    size = next;
  }
}

TEST(Step, BranchesFireAsDocumented) {
  auto f = [](const Point& x) { return (x[0] - 10) * (x[0] - 10) + (x[1] - 10) * (x[1] - 10); };
  // Downhill far away: the reflection beats everything and expansion helps.
  EXPECT_EQ(step(evaluated({{0, 0}, {1, 0}, {0, 1}}, f), f).kind, StepKind::Expand);
  // Minimum inside the simplex: reflecting the worst vertex overshoots.
  auto g = [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; };
  const auto k = step(evaluated({{-1, -1}, {1, -1}, {0, 2}}, g), g).kind;
  EXPECT_TRUE(k == StepKind::ContractInside || k == StepKind::ContractOutside);
}

TEST(Step, CallsObjectiveMinimalNumberOfTimes) {
  int calls = 0;
  auto f = [&](const Point& x) {
    ++calls;
    return (x[0] - 1) * (x[0] - 1) + (x[1] + 2) * (x[1] + 2) + 0.5 * x[0] * x[1];
  };
  Simplex s = evaluated({{0, 0}, {1, 0}, {0, 1}}, f);
  for (int i = 0; i < 60; ++i) {
    calls = 0;
    const auto out = step(s, f);
    switch (out.kind) {
      case StepKind::Reflect: EXPECT_TRUE(calls == 1 || calls == 2); break;
      case StepKind::Expand:
      case StepKind::ContractOutside:
      case StepKind::ContractInside: EXPECT_EQ(calls, 2); break;
      case StepKind::Shrink: EXPECT_EQ(calls, 2 + 2); break;
    }
    s = out.simplex;
  }
}

TEST(Step, NonFiniteObjectiveLeavesSimplexIntact) {
  auto f = [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; };
  const Simplex s = evaluated({{1, 1}, {2, 1}, {1, 2}}, f);
  const Simplex before = s;
  auto bad = [](const Point&) { return std::numeric_limits<double>::quiet_NaN(); };
  EXPECT_THROW(step(s, bad), EvaluationError);
  EXPECT_EQ(s, before);
  auto inf = [](const Point&) { return std::numeric_limits<double>::infinity(); };
  EXPECT_THROW(step(s, inf), EvaluationError);
  EXPECT_EQ(s, before);
}

TEST(Step, ValuesStayConsistentWithVertices) {
  Simplex s = evaluated({{-1.2, 1.0}, {-1.1, 1.0}, {-1.2, 1.1}}, rosenbrock);
  for (int i = 0; i < 100; ++i) {
    s = step(s, rosenbrock).simplex;
    ASSERT_EQ(s.vertices.size(), 3U);
    for (std::size_t v = 0; v < 3; ++v) EXPECT_EQ(s.values[v], rosenbrock(s.vertices[v]));
  }
}

TEST(Step, NeverEvaluatesCachedVertex) {
  Simplex s = evaluated({{-1.2, 1.0}, {-1.1, 1.0}, {-1.2, 1.1}}, rosenbrock);
  for (int i = 0; i < 100; ++i) {
    std::set<Point> cached(s.vertices.begin(), s.vertices.end());
    auto f = [&](const Point& x) {
      EXPECT_EQ(cached.count(x), 0U) << "iteration " << i;
      return rosenbrock(x);
    };
    s = step(s, f).simplex;
  }
}

TEST(Step, BestValueNonIncreasing) {
  Simplex s = evaluated({{-1.2, 1.0}, {-1.1, 1.0}, {-1.2, 1.1}}, rosenbrock);
  double best = s.values[s.best_index()];
  for (int i = 0; i < 200; ++i) {
    s = step(s, rosenbrock).simplex;
    const double b = s.values[s.best_index()];
    EXPECT_LE(b, best);
    best = b;
  }
}

TEST(Run, RosenbrockFromStandardStart) {
  const auto r = run({{-1.2, 1.0}, {-1.1, 1.0}, {-1.2, 1.1}}, rosenbrock, euclidean(1e-8, 500));
  EXPECT_LE(r.evaluations, 500);
  EXPECT_NEAR(r.best_point[0], 1.0, 1e-3);
  EXPECT_NEAR(r.best_point[1], 1.0, 1e-3);
}

TEST(Run, EvaluationCountMatchesSinkEmissions) {
  int emitted = 0, last_index = 0;
  const auto r = run(
      {{-1.2, 1.0}, {-1.1, 1.0}, {-1.2, 1.1}}, rosenbrock, euclidean(1e-6, 300),
      [&](const Evaluation& e) {
        ++emitted;
        EXPECT_EQ(e.index, last_index + 1);
        EXPECT_EQ(e.value, rosenbrock(e.point));
        last_index = e.index;
      });
  EXPECT_EQ(r.evaluations, emitted);
}

TEST(Run, BudgetIsHardCap) {
  for (int budget : {1, 2, 3, 4, 7, 50}) {
    int calls = 0;
    auto f = [&](const Point& x) {
      ++calls;
      return rosenbrock(x);
    };
    const auto r = run({{-1.2, 1.0}, {-1.1, 1.0}, {-1.2, 1.1}}, f, euclidean(1e-12, budget));
    EXPECT_EQ(calls, budget);
    EXPECT_EQ(r.evaluations, budget);
    EXPECT_FALSE(r.converged);
    EXPECT_FALSE(r.best_point.empty());
  }
}

TEST(Run, StopsWhenSimplexSmall) {
  const auto r = run({{0.0, 0.0}, {0.01, 0.0}, {0.0, 0.01}}, rosenbrock, euclidean(0.1, 100));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.evaluations, 3);
  EXPECT_EQ(r.iterations, 0);
}

TEST(Run, ExactCloningCostFromBalancedStart) {
  // The symmetric optimum has F1 = F2 = (1 + 1/sqrt2)/2, so the lowest
  // reachable cost is 2 * (1 - F)^2, not zero.
  const double floor = 2.0 * (1.0 - kOptimalCloningFidelity) * (1.0 - kOptimalCloningFidelity);
  auto f = [](const Point& x) {
    return cost(exact_fidelities(GateParams::from_degrees(x[0], x[1], 0.0), 0.0));
  };
  OptimizerConfig cfg;
  const auto r = run(ExperimentConfig::default_simplex(Model::TwoParam), f, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.best_value, floor + 1e-3);
  EXPECT_GE(r.best_value, floor - 1e-12);
}

struct ReferenceRow {
  int iteration;
  std::string step;
  int vertex;
  double x, y, value;
};

std::vector<ReferenceRow> load_reference() {
  std::ifstream in(std::string(QCLONE_FIXTURE_DIR) + "/nm_rosenbrock_reference.csv");
  EXPECT_TRUE(in.good());
  std::vector<ReferenceRow> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f[6];
    for (auto& cell : f) std::getline(ss, cell, ',');
    rows.push_back({std::stoi(f[0]), f[1], std::stoi(f[2]), std::stod(f[3]), std::stod(f[4]),
                    std::stod(f[5])});
  }
  return rows;
}

TEST(Step, MatchesIndependentReferenceTrace) {
  const auto ref = load_reference();
  ASSERT_EQ(ref.size(), 30U);
  Simplex s = evaluated({{-1.2, 1.0}, {-1.1, 1.0}, {-1.2, 1.1}}, rosenbrock);
  for (int it = 1; it <= 10; ++it) {
    const auto out = step(s, rosenbrock);
    s = out.simplex;
    Simplex sorted = s;
    detail::sort_by_value(sorted);
    for (int v = 0; v < 3; ++v) {
      const auto& row = ref[static_cast<std::size_t>((it - 1) * 3 + v)];
      ASSERT_EQ(row.iteration, it);
      EXPECT_EQ(row.step, to_string(out.kind)) << "iteration " << it;
      EXPECT_NEAR(sorted.vertices[v][0], row.x, 1e-9) << "iteration " << it;
      EXPECT_NEAR(sorted.vertices[v][1], row.y, 1e-9) << "iteration " << it;
      EXPECT_NEAR(sorted.values[v], row.value, 1e-9) << "iteration " << it;
    }
  }
}

}  // namespace
}  // namespace qclone::nm
