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

// Minimal library use: evaluate the gate at a setting, then train Model 1.

#include <cstdio>

#include "qclone/qclone.hpp"

int main() {
  using namespace qclone;

  const auto p = GateParams::from_degrees(31.316, 76.316, 0.0);
  const auto [t_h, t_v] = splitting_ratios(p.phi, p.theta);
  for (double eta : {0.0, 1.0, 2.0}) {
    const auto f = exact_fidelities(p, eta);
    std::printf("eta = %.1f  F1 = %.6f  F2 = %.6f\n", eta, f.f1, f.f2);
  }
  std::printf("t_H = %.4f  t_V = %.4f  bound = %.6f\n", t_h, t_v, kOptimalCloningFidelity);

  auto cfg = ExperimentConfig::defaults(Model::TwoParam, NoiseMode::Exact);
  cfg.seed = 7;
  const auto trace = train(cfg);
  const auto& best = trace.final.best_point_deg;
  std::printf("trained in %d runs (%s): phi = %.3f  theta = %.3f  cost = %.6f\n",
              trace.final.evaluations, trace.final.converged ? "converged" : "budget hit",
              best[0], best[1], trace.final.best_cost);
  return trace.final.converged ? 0 : 1;
}
