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

// qclone: train, test and inspect the simulated learning phase-covariant cloner.
//
// Exit codes: 0 success / converged, 1 usage or config error, 2 not converged.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qclone/io.hpp"
#include "qclone/qclone.hpp"

namespace fs = std::filesystem;
using namespace qclone;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

#ifndef QCLONE_VERSION_STRING
#define QCLONE_VERSION_STRING "0.0.0"
#endif

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

// "lo:hi" in degrees.
std::pair<double, double> parse_range(const std::string& s) {
  const auto parts = io::split(s, ':');
  if (parts.size() != 2) throw ParseError("range must look like lo:hi, got '" + s + "'");
  return {io::parse_double(parts[0]), io::parse_double(parts[1])};
}

struct ExperimentFlags {
  std::string config_path;
  std::optional<int> model;
  std::optional<std::string> noise;
  std::optional<std::uint64_t> seed;
  std::optional<double> counts;
  std::optional<int> test_size;
  std::optional<double> omega;
  std::optional<int> max_evals;
  std::optional<double> tolerance;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "Experiment config file (INI)");
    cmd->add_option("--model", model, "1 = (phi, theta) with fixed ancilla, 2 = (phi, theta, omega)")
        ->check(CLI::IsMember({1, 2}));
    cmd->add_option("--noise", noise, "exact | shot");
    cmd->add_option("--seed", seed, "Seed for signal phases and shot noise");
    cmd->add_option("--counts", counts, "Mean coincidences per run in shot mode");
    cmd->add_option("--test-size", test_size, "Test set size");
    cmd->add_option("--omega", omega, "Fixed ancilla angle for model 1 (deg)");
    cmd->add_option("--max-evals", max_evals, "Evaluation budget");
    cmd->add_option("--tolerance", tolerance, "Simplex size tolerance (deg)");
  }

  ExperimentConfig resolve() const {
    io::ConfigOverrides base;
    if (!config_path.empty()) base = io::parse_config_file(config_path);
    io::ConfigOverrides top;
    if (model) top.model = *model == 1 ? Model::TwoParam : Model::ThreeParam;
    if (noise) top.noise = io::parse_noise(*noise);
    top.seed = seed;
    top.mean_total_counts = counts;
    top.test_set_size = test_size;
    top.fixed_omega_deg = omega;
    top.max_evaluations = max_evals;
    top.size_tolerance_deg = tolerance;
    // A model switch on the command line invalidates a file simplex of the other size.
    if (top.model && base.initial_simplex && base.initial_simplex->size() !=
                                                 (*top.model == Model::TwoParam ? 3U : 4U))
      base.initial_simplex.reset();
    base.merge(top);
    return base.resolve();
  }
};

void print_test(std::ostream& out, const TestSetResult& t) {
  out << std::fixed << std::setprecision(4) << "<F1> = " << t.mean_f1 << " +- " << t.std_f1
      << "\n<F2> = " << t.mean_f2 << " +- " << t.std_f2 << "\n";
  if (t.degenerate) out << "note: test set of size 1, standard deviations reported as 0\n";
  out.unsetf(std::ios::floatfield);
}

int cmd_train(const ExperimentFlags& flags, const std::string& out_dir, bool quiet) {
  const ExperimentConfig cfg = flags.resolve();
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  const LearningTrace trace = train(cfg);
  const TestSetResult test = evaluate_test_set(trace.final.best_params, cfg);

  std::ostringstream trace_csv, simplex_csv, config_ini;
  io::write_trace_csv(trace_csv, trace.runs);
  io::write_simplex_csv(simplex_csv, trace.simplices, cfg);
  io::write_config(config_ini, cfg);
  write_file(dir / "trace.csv", trace_csv.str());
  write_file(dir / "simplex.csv", simplex_csv.str());
  write_file(dir / "config.ini", config_ini.str());
  write_file(dir / "summary.json", io::summary_json(trace, test).dump(2) + "\n");

  nlohmann::ordered_json manifest;
  manifest["tool"] = "qclone";
  manifest["version"] = QCLONE_VERSION_STRING;
  manifest["timestamp"] = utc_timestamp();
  manifest["seed"] = cfg.seed;
  manifest["config"] = io::config_to_json(cfg);
  manifest["files"] = {{"trace", (dir / "trace.csv").string()},
                       {"simplex", (dir / "simplex.csv").string()},
                       {"summary", (dir / "summary.json").string()},
                       {"config", (dir / "config.ini").string()}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  if (!quiet) {
    const auto& p = trace.final.best_params;
    std::cout << "model " << to_string(cfg.model) << ", " << to_string(cfg.noise)
              << " mode, seed " << cfg.seed << "\n"
              << "best: phi = " << rad_to_deg(p.phi) << " deg, theta = " << rad_to_deg(p.theta)
              << " deg, omega = " << rad_to_deg(p.omega) << " deg, cost = "
              << trace.final.best_cost << "\n";
    print_test(std::cout, test);
    std::cout << (trace.final.converged ? "converged" : "NOT converged (budget exhausted)")
              << " after " << trace.final.evaluations << " evaluations\n"
              << "wrote " << (dir / "trace.csv").string() << "\n";
  }
  return trace.final.converged ? kExitOk : kExitNotConverged;
}

struct ScanFlags {
  std::string phi = "0:90";
  std::string theta = "0:90";
  std::optional<int> resolution;
  double step = 1.0;
  double omega = 0.0;
  int eta_samples = 16;
  std::string out = "grid.csv";
  std::string trace;
};

int cmd_scan(const ScanFlags& f) {
  const auto [phi_lo, phi_hi] = parse_range(f.phi);
  const auto [theta_lo, theta_hi] = parse_range(f.theta);
  AxisRange phi, theta;
  if (f.resolution) {
    phi = {phi_lo, phi_hi, *f.resolution};
    theta = {theta_lo, theta_hi, *f.resolution};
  } else {
    if (!(phi_hi > phi_lo) || !(theta_hi > theta_lo))
      throw PreconditionError("grid range is empty or inverted");
    phi = AxisRange::with_step(phi_lo, phi_hi, f.step);
    theta = AxisRange::with_step(theta_lo, theta_hi, f.step);
  }
  const Landscape land = scan_landscape(phi, theta, f.omega, f.eta_samples);

  std::ofstream out(f.out, std::ios::binary);
  if (!out) throw Error("cannot write '" + f.out + "'");
  io::write_grid_csv(out, land);

  const auto& m = land.min_cost_cell();
  const auto& b = land.max_fidelity_cell();
  const auto [t_h, t_v] = splitting_ratios(deg_to_rad(b.phi_deg), deg_to_rad(b.theta_deg));
  std::cout << phi.points << " x " << theta.points << " grid written to " << f.out << "\n"
            << "min cost " << m.cost << " at phi = " << m.phi_deg
            << " deg, theta = " << m.theta_deg << " deg (F1 = " << m.f1
            << ", F2 = " << m.f2 << ")\n"
            << "max min(F1,F2) " << b.min_fidelity() << " at phi = " << b.phi_deg
            << " deg, theta = " << b.theta_deg << " deg, t_H = " << t_h
            << ", t_V = " << t_v << "\n";

  if (!f.trace.empty()) {
    std::ifstream tin(f.trace);
    if (!tin) throw Error("cannot open trace '" + f.trace + "'");
    std::string header;
    std::getline(tin, header);
    tin.seekg(0);
    const fs::path overlay = fs::path(f.out).replace_extension("").string() + "_overlay.csv";
    std::ofstream o(overlay, std::ios::binary);
    if (io::trim(header) == io::kSimplexHeader) {
      // Triangles: one row per vertex per iteration.
      o << "iteration,vertex,phi_deg,theta_deg,cost\n";
      for (const auto& r : io::read_simplex_csv(tin))
        o << r.iteration << ',' << r.vertex << ',' << io::format_double(r.phi_deg) << ','
          << io::format_double(r.theta_deg) << ',' << io::format_double(r.cost) << "\n";
    } else {
      o << "run,phi_deg,theta_deg,cost\n";
      for (const auto& r : io::read_trace_csv(tin))
        o << r.run << ',' << io::format_double(r.phi_deg) << ','
          << io::format_double(r.theta_deg) << ',' << io::format_double(r.cost) << "\n";
    }
    std::cout << "overlay written to " << overlay.string() << "\n";
  }
  return kExitOk;
}

struct TestFlags {
  std::string params;
  std::optional<double> phi, theta, omega;
  int model = 2;
  std::string noise = "exact";
  std::uint64_t seed = 1;
  double counts = kDefaultMeanCounts;
  int size = kDefaultTestSetSize;
  bool json = false;
};

int cmd_test(const TestFlags& f) {
  std::vector<double> angles;
  if (!f.params.empty()) {
    for (auto part : io::split(f.params, ',')) angles.push_back(io::parse_double(part));
  } else {
    if (!f.phi || !f.theta) throw ParseError("give --params or both --phi and --theta");
    angles = {*f.phi, *f.theta};
    if (f.omega) angles.push_back(*f.omega);
  }
  if (angles.size() == 2) {
    if (f.model != 1) throw ParseError("two angles need --model 1 (fixed ancilla)");
    angles.push_back(f.omega.value_or(kDefaultFixedOmegaDeg));
  }
  if (angles.size() != 3) throw ParseError("expected 2 or 3 angles");

  ExperimentConfig cfg = ExperimentConfig::defaults(
      f.model == 1 ? Model::TwoParam : Model::ThreeParam, io::parse_noise(f.noise));
  cfg.seed = f.seed;
  cfg.mean_total_counts = f.counts;
  cfg.test_set_size = f.size;
  cfg.validate();
  const GateParams p = GateParams::from_degrees(angles[0], angles[1], angles[2]);
  const TestSetResult t = evaluate_test_set(p, cfg);
  if (f.json) {
    std::cout << io::test_result_json(p, t).dump(2) << "\n";
  } else {
    std::cout << "phi = " << angles[0] << " deg, theta = " << angles[1]
              << " deg, omega = " << angles[2] << " deg, " << f.noise << " mode, "
              << t.size << " test states\n";
    print_test(std::cout, t);
  }
  return kExitOk;
}

int cmd_permanent(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  const ComplexMatrix m = io::read_matrix_csv(in);
  const Complex p = permanent(m);
  std::cout << std::setprecision(17) << "perm = " << p.real() << " " << p.imag() << "\n"
            << "|perm|^2 = " << std::norm(p) << "\n";
  return kExitOk;
}

int cmd_sweep(const ExperimentFlags& flags, int seeds, const std::string& out_path) {
  if (seeds < 1) throw PreconditionError("--seeds must be >= 1");
  const ExperimentConfig base = flags.resolve();

  struct Row {
    std::uint64_t seed;
    LearningTrace trace;
    TestSetResult test;
  };
  auto one = [&base](std::uint64_t seed) {
    ExperimentConfig cfg = base;
    cfg.seed = seed;
    LearningTrace trace = train(cfg);
    TestSetResult test = evaluate_test_set(trace.final.best_params, cfg);
    return Row{seed, std::move(trace), test};
  };

  const unsigned workers = std::max(1U, std::thread::hardware_concurrency());
  std::vector<Row> rows;
  for (int start = 0; start < seeds; start += static_cast<int>(workers)) {
    std::vector<std::future<Row>> batch;
    for (int i = start; i < std::min(seeds, start + static_cast<int>(workers)); ++i)
      batch.push_back(std::async(std::launch::async, one, base.seed + i));
    for (auto& fut : batch) rows.push_back(fut.get());
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + out_path + "'");
  out << "seed,phi_deg,theta_deg,omega_deg,converged,evaluations,mean_f1,std_f1,mean_f2,std_f2\n";
  for (const auto& r : rows) {
    const auto& p = r.trace.final.best_params;
    out << r.seed << ',' << io::format_double(rad_to_deg(p.phi)) << ','
        << io::format_double(rad_to_deg(p.theta)) << ','
        << io::format_double(rad_to_deg(p.omega)) << ',' << (r.trace.final.converged ? 1 : 0)
        << ',' << r.trace.final.evaluations << ',' << io::format_double(r.test.mean_f1) << ','
        << io::format_double(r.test.std_f1) << ',' << io::format_double(r.test.mean_f2) << ','
        << io::format_double(r.test.std_f2) << "\n";
    std::cout << "seed " << r.seed << ": <F1> = " << r.test.mean_f1
              << ", <F2> = " << r.test.mean_f2
              << (r.trace.final.converged ? "" : " (not converged)") << "\n";
  }
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated linear-optical phase-covariant cloner trained by Nelder-Mead"};
  app.set_version_flag("--version", QCLONE_VERSION_STRING);
  app.require_subcommand(1);

  ExperimentFlags train_flags;
  std::string train_out = "qclone_out";
  bool quiet = false;
  auto* train_cmd = app.add_subcommand("train", "Train the gate and write trace, summary, manifest");
  train_flags.add_to(train_cmd);
  train_cmd->add_option("-o,--out", train_out, "Output directory");
  train_cmd->add_flag("-q,--quiet", quiet, "Suppress the report");

  ScanFlags scan;
  auto* scan_cmd = app.add_subcommand("scan", "Exact cost landscape over (phi, theta)");
  scan_cmd->add_option("--phi", scan.phi, "phi range lo:hi (deg)");
  scan_cmd->add_option("--theta", scan.theta, "theta range lo:hi (deg)");
  auto* res_opt = scan_cmd->add_option("--resolution", scan.resolution, "Grid points per axis (>= 2)");
  scan_cmd->add_option("--step", scan.step, "Grid step (deg)")->excludes(res_opt);
  scan_cmd->add_option("--omega", scan.omega, "Ancilla angle (deg)");
  scan_cmd->add_option("--eta-samples", scan.eta_samples, "Signal phases averaged for non-eigen ancillas");
  scan_cmd->add_option("-o,--out", scan.out, "Grid CSV path");
  scan_cmd->add_option("--trace", scan.trace, "trace.csv or simplex.csv to export as an overlay");

  TestFlags test;
  auto* test_cmd = app.add_subcommand("test", "Evaluate fixed gate settings on a random test set");
  test_cmd->add_option("--params", test.params, "phi,theta[,omega] (deg)");
  test_cmd->add_option("--phi", test.phi, "phi (deg)");
  test_cmd->add_option("--theta", test.theta, "theta (deg)");
  test_cmd->add_option("--omega", test.omega, "omega (deg)");
  test_cmd->add_option("--model", test.model, "1 or 2")->check(CLI::IsMember({1, 2}));
  test_cmd->add_option("--noise", test.noise, "exact | shot");
  test_cmd->add_option("--seed", test.seed, "Seed");
  test_cmd->add_option("--counts", test.counts, "Mean coincidences per test state (shot mode)");
  test_cmd->add_option("--size", test.size, "Number of test states");
  test_cmd->add_flag("--json", test.json, "Print JSON");

  std::string matrix_path;
  auto* perm_cmd = app.add_subcommand("permanent", "Permanent of a complex matrix CSV (rows of re,im pairs)");
  perm_cmd->add_option("matrix", matrix_path, "Matrix CSV file")->required();

  ExperimentFlags sweep_flags;
  int sweep_seeds = 20;
  std::string sweep_out = "sweep.csv";
  auto* sweep_cmd = app.add_subcommand("sweep", "Train with seeds base, base+1, ... and test each");
  sweep_flags.add_to(sweep_cmd);
  sweep_cmd->add_option("--seeds", sweep_seeds, "Number of seeds");
  sweep_cmd->add_option("-o,--out", sweep_out, "Sweep CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_flags, train_out, quiet);
    if (*scan_cmd) return cmd_scan(scan);
    if (*test_cmd) return cmd_test(test);
    if (*perm_cmd) return cmd_permanent(matrix_path);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep_seeds, sweep_out);
  } catch (const qclone::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
