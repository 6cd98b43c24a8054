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
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qclone/errors.hpp"
#include "qclone/matrix.hpp"
#include "qclone/trainer.hpp"

namespace qclone::io {

inline constexpr std::string_view kTraceHeader =
    "run,phi_deg,theta_deg,omega_deg,eta_rad,f1,f2,cost,simplex_size_deg";
inline constexpr std::string_view kGridHeader = "phi_deg,theta_deg,cost";
inline constexpr std::string_view kSimplexHeader =
    "iteration,step,vertex,phi_deg,theta_deg,omega_deg,cost";

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("failed to format number");
  return std::string(buf.data(), end);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, int line = 0) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError("expected a number, got '" + std::string(s) + "'", line);
  return v;
}

template <class Int>
Int parse_int(std::string_view s, int line = 0) {
  s = trim(s);
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
  return v;
}

inline Model parse_model(std::string_view s, int line = 0) {
  s = trim(s);
  if (s == "1" || s == "two-param" || s == "TwoParam") return Model::TwoParam;
  if (s == "2" || s == "three-param" || s == "ThreeParam") return Model::ThreeParam;
  throw ParseError("model must be 1 or 2, got '" + std::string(s) + "'", line);
}

inline NoiseMode parse_noise(std::string_view s, int line = 0) {
  s = trim(s);
  if (s == "exact") return NoiseMode::Exact;
  if (s == "shot") return NoiseMode::Shot;
  throw ParseError("noise must be 'exact' or 'shot', got '" + std::string(s) + "'", line);
}

/**
 * Partially specified experiment settings: what a config file or the
 * command line sets explicitly. Unset fields fall back to
 * ExperimentConfig::defaults() for the chosen model and noise mode.
 */
struct ConfigOverrides {
  std::optional<Model> model;
  std::optional<NoiseMode> noise;
  std::optional<std::uint64_t> seed;
  std::optional<double> mean_total_counts;
  std::optional<int> test_set_size;
  std::optional<double> fixed_omega_deg;
  std::optional<std::vector<nm::Point>> initial_simplex;
  std::optional<double> reflection;
  std::optional<double> expansion;
  std::optional<double> contraction;
  std::optional<double> shrink;
  std::optional<double> size_tolerance_deg;
  std::optional<int> max_evaluations;

  // Fields set in `top` win.
  void merge(const ConfigOverrides& top) {
    auto take = [](auto& dst, const auto& src) {
      if (src) dst = src;
    };
    take(model, top.model);
    take(noise, top.noise);
    take(seed, top.seed);
    take(mean_total_counts, top.mean_total_counts);
    take(test_set_size, top.test_set_size);
    take(fixed_omega_deg, top.fixed_omega_deg);
    take(initial_simplex, top.initial_simplex);
    take(reflection, top.reflection);
    take(expansion, top.expansion);
    take(contraction, top.contraction);
    take(shrink, top.shrink);
    take(size_tolerance_deg, top.size_tolerance_deg);
    take(max_evaluations, top.max_evaluations);
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = ExperimentConfig::defaults(model.value_or(Model::TwoParam),
                                                      noise.value_or(NoiseMode::Exact));
    if (seed) cfg.seed = *seed;
    if (mean_total_counts) cfg.mean_total_counts = *mean_total_counts;
    if (test_set_size) cfg.test_set_size = *test_set_size;
    if (fixed_omega_deg) cfg.fixed_omega_deg = *fixed_omega_deg;
    if (initial_simplex) cfg.initial_simplex = *initial_simplex;
    if (reflection) cfg.optimizer.reflection = *reflection;
    if (expansion) cfg.optimizer.expansion = *expansion;
    if (contraction) cfg.optimizer.contraction = *contraction;
    if (shrink) cfg.optimizer.shrink = *shrink;
    if (size_tolerance_deg) cfg.optimizer.size_tolerance = *size_tolerance_deg;
    if (max_evaluations) cfg.optimizer.max_evaluations = *max_evaluations;
    cfg.validate();
    return cfg;
  }
};

/**
 * Parse the INI-style experiment config.
 *
 *   [experiment]  model, noise, seed, mean_total_counts, test_set_size,
 *                 fixed_omega_deg
 *   [simplex]     vertex = a, b[, c]   (repeat once per vertex, degrees)
 *   [optimizer]   reflection, expansion, contraction, shrink,
 *                 size_tolerance_deg, max_evaluations
 *
 * '#' and ';' start comments. Errors carry the 1-based line number.
 */
inline ConfigOverrides parse_config(std::istream& in) {
  ConfigOverrides c;
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find_first_of("#;"); hash != std::string_view::npos)
      s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line);
      section = std::string(trim(s.substr(1, s.size() - 2)));
      if (section != "experiment" && section != "simplex" && section != "optimizer")
        throw ParseError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line);
    const std::string key(trim(s.substr(0, eq)));
    const std::string_view value = trim(s.substr(eq + 1));
    if (section.empty()) throw ParseError("key '" + key + "' outside any section", line);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line);

    if (section == "experiment") {
      if (key == "model") c.model = parse_model(value, line);
      else if (key == "noise") c.noise = parse_noise(value, line);
      else if (key == "seed") c.seed = parse_int<std::uint64_t>(value, line);
      else if (key == "mean_total_counts") c.mean_total_counts = parse_double(value, line);
      else if (key == "test_set_size") c.test_set_size = parse_int<int>(value, line);
      else if (key == "fixed_omega_deg") c.fixed_omega_deg = parse_double(value, line);
      else throw ParseError("unknown key '" + key + "' in [experiment]", line);
    } else if (section == "simplex") {
      if (key != "vertex") throw ParseError("unknown key '" + key + "' in [simplex]", line);
      nm::Point p;
      for (auto part : split(value, ',')) p.push_back(parse_double(part, line));
      if (p.size() != 2 && p.size() != 3)
        throw ParseError("vertex needs 2 or 3 angles", line);
      if (!c.initial_simplex) c.initial_simplex.emplace();
      c.initial_simplex->push_back(std::move(p));
    } else {
      if (key == "reflection") c.reflection = parse_double(value, line);
      else if (key == "expansion") c.expansion = parse_double(value, line);
      else if (key == "contraction") c.contraction = parse_double(value, line);
      else if (key == "shrink") c.shrink = parse_double(value, line);
      else if (key == "size_tolerance_deg") c.size_tolerance_deg = parse_double(value, line);
      else if (key == "max_evaluations") c.max_evaluations = parse_int<int>(value, line);
      else throw ParseError("unknown key '" + key + "' in [optimizer]", line);
    }
  }
  return c;
}

inline ConfigOverrides parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  try {
    return parse_config(in);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path);
  }
}

/// Fully resolved config in the same format parse_config() reads.
inline void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  out << "[experiment]\n"
      << "model = " << to_string(cfg.model) << "\n"
      << "noise = " << to_string(cfg.noise) << "\n"
      << "seed = " << cfg.seed << "\n"
      << "mean_total_counts = " << format_double(cfg.mean_total_counts) << "\n"
      << "test_set_size = " << cfg.test_set_size << "\n"
      << "fixed_omega_deg = " << format_double(cfg.fixed_omega_deg) << "\n\n"
      << "[simplex]\n";
  for (const auto& v : cfg.initial_simplex) {
    out << "vertex = ";
    for (std::size_t k = 0; k < v.size(); ++k)
      out << (k ? ", " : "") << format_double(v[k]);
    out << "\n";
  }
  const auto& o = cfg.optimizer;
  out << "\n[optimizer]\n"
      << "reflection = " << format_double(o.reflection) << "\n"
      << "expansion = " << format_double(o.expansion) << "\n"
      << "contraction = " << format_double(o.contraction) << "\n"
      << "shrink = " << format_double(o.shrink) << "\n"
      << "size_tolerance_deg = " << format_double(o.size_tolerance) << "\n"
      << "max_evaluations = " << o.max_evaluations << "\n";
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = std::stoi(to_string(cfg.model));
  j["noise"] = to_string(cfg.noise);
  j["seed"] = cfg.seed;
  j["mean_total_counts"] = cfg.mean_total_counts;
  j["test_set_size"] = cfg.test_set_size;
  j["fixed_omega_deg"] = cfg.fixed_omega_deg;
  j["initial_simplex_deg"] = cfg.initial_simplex;
  j["optimizer"] = {{"reflection", cfg.optimizer.reflection},
                    {"expansion", cfg.optimizer.expansion},
                    {"contraction", cfg.optimizer.contraction},
                    {"shrink", cfg.optimizer.shrink},
                    {"size_tolerance_deg", cfg.optimizer.size_tolerance},
                    {"max_evaluations", cfg.optimizer.max_evaluations}};
  return j;
}

inline void write_trace_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << kTraceHeader << "\n";
  for (const auto& r : runs)
    out << r.run << ',' << format_double(r.phi_deg) << ',' << format_double(r.theta_deg)
        << ',' << format_double(r.omega_deg) << ',' << format_double(r.eta_rad) << ','
        << format_double(r.f1) << ',' << format_double(r.f2) << ','
        << format_double(r.cost) << ',' << format_double(r.simplex_size_deg) << "\n";
}

inline std::vector<RunRecord> read_trace_csv(std::istream& in) {
  std::string raw;
  int line = 0;
  if (!std::getline(in, raw) || trim(raw) != kTraceHeader)
    throw ParseError("missing trace CSV header", 1);
  ++line;
  std::vector<RunRecord> runs;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    const auto f = split(raw, ',');
    if (f.size() != 9) throw ParseError("trace row needs 9 columns", line);
    runs.push_back(RunRecord{parse_int<int>(f[0], line), parse_double(f[1], line),
                             parse_double(f[2], line), parse_double(f[3], line),
                             parse_double(f[4], line), parse_double(f[5], line),
                             parse_double(f[6], line), parse_double(f[7], line),
                             parse_double(f[8], line)});
  }
  return runs;
}

inline void write_simplex_csv(std::ostream& out, const std::vector<SimplexRecord>& history,
                              const ExperimentConfig& cfg) {
  out << kSimplexHeader << "\n";
  for (const auto& rec : history)
    for (std::size_t v = 0; v < rec.simplex.vertices.size(); ++v) {
      const auto& x = rec.simplex.vertices[v];
      const double omega = x.size() > 2 ? x[2] : cfg.fixed_omega_deg;
      out << rec.iteration << ',' << nm::to_string(rec.kind) << ',' << v << ','
          << format_double(x[0]) << ',' << format_double(x[1]) << ','
          << format_double(omega) << ',' << format_double(rec.simplex.values[v]) << "\n";
    }
}

/// One vertex row of simplex.csv.
struct SimplexRow {
  int iteration = 0;
  std::string step;
  int vertex = 0;
  double phi_deg = 0.0;
  double theta_deg = 0.0;
  double omega_deg = 0.0;
  double cost = 0.0;
};

inline std::vector<SimplexRow> read_simplex_csv(std::istream& in) {
  std::string raw;
  int line = 1;
  if (!std::getline(in, raw) || trim(raw) != kSimplexHeader)
    throw ParseError("missing simplex CSV header", 1);
  std::vector<SimplexRow> rows;
  while (std::getline(in, raw)) {
    ++line;
    if (trim(raw).empty()) continue;
    const auto f = split(raw, ',');
    if (f.size() != 7) throw ParseError("simplex row needs 7 columns", line);
    rows.push_back(SimplexRow{parse_int<int>(f[0], line), std::string(trim(f[1])),
                              parse_int<int>(f[2], line), parse_double(f[3], line),
                              parse_double(f[4], line), parse_double(f[5], line),
                              parse_double(f[6], line)});
  }
  return rows;
}

inline void write_grid_csv(std::ostream& out, const Landscape& land) {
  out << kGridHeader << "\n";
  for (const auto& c : land.cells)
    out << format_double(c.phi_deg) << ',' << format_double(c.theta_deg) << ','
        << format_double(c.cost) << "\n";
}

/**
 * Square complex matrix, one row per line as "re,im,re,im,...".
 * Blank lines and '#' comments are skipped.
 */
inline ComplexMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<Complex>> rows;
  std::string raw;
  int line = 0;
  std::size_t width = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto fields = split(s, ',');
    if (fields.size() % 2 != 0)
      throw ParseError("row has an odd number of values; expected re,im pairs", line);
    std::vector<Complex> row;
    for (std::size_t k = 0; k < fields.size(); k += 2)
      row.emplace_back(parse_double(fields[k], line), parse_double(fields[k + 1], line));
    if (rows.empty()) width = row.size();
    else if (row.size() != width)
      throw ParseError("ragged matrix: row has " + std::to_string(row.size()) +
                           " entries, expected " + std::to_string(width),
                       line);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix file is empty");
  if (rows.size() != width)
    throw ParseError("matrix is " + std::to_string(rows.size()) + "x" +
                     std::to_string(width) + ", expected square");
  ComplexMatrix m(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) m(r, c) = rows[r][c];
  return m;
}

inline void write_matrix_csv(std::ostream& out, const ComplexMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c)
      out << (c ? "," : "") << format_double(m(r, c).real()) << ','
          << format_double(m(r, c).imag());
    out << "\n";
  }
}

inline nlohmann::ordered_json params_to_json(const GateParams& p) {
  return {{"phi_deg", rad_to_deg(p.phi)},
          {"theta_deg", rad_to_deg(p.theta)},
          {"omega_deg", rad_to_deg(p.omega)}};
}

/// Summary of a training run and its test-set evaluation.
inline nlohmann::ordered_json summary_json(const LearningTrace& trace,
                                           const TestSetResult& test) {
  nlohmann::ordered_json j;
  j["final_params"] = params_to_json(trace.final.best_params);
  j["mean_f1"] = test.mean_f1;
  j["std_f1"] = test.std_f1;
  j["mean_f2"] = test.mean_f2;
  j["std_f2"] = test.std_f2;
  j["converged"] = trace.final.converged;
  j["evaluations"] = trace.final.evaluations;
  j["best_cost"] = trace.final.best_cost;
  j["iterations"] = trace.final.iterations;
  j["test_set_size"] = test.size;
  j["test_set_degenerate"] = test.degenerate;
  return j;
}

inline nlohmann::ordered_json test_result_json(const GateParams& p, const TestSetResult& t) {
  nlohmann::ordered_json j;
  j["params"] = params_to_json(p);
  j["mean_f1"] = t.mean_f1;
  j["std_f1"] = t.std_f1;
  j["mean_f2"] = t.mean_f2;
  j["std_f2"] = t.std_f2;
  j["size"] = t.size;
  j["degenerate"] = t.degenerate;
  return j;
}

}  // namespace qclone::io
