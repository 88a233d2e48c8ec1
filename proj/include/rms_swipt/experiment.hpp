// SPDX-License-Identifier: Apache-2.0
//
// rms-swipt: robust transceiver design for transmissive-metasurface SWIPT networks
// Copyright (C) 2026 The rms-swipt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RMS_SWIPT_EXPERIMENT_HPP
#define RMS_SWIPT_EXPERIMENT_HPP

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ao.hpp"
#include "channel.hpp"
#include "scenario.hpp"

namespace rms_swipt {

enum class SweepAxis { max_power, num_elements, num_users, energy_threshold, noise_power, error_stddev };

inline const char *to_string(SweepAxis a) {
  switch (a) {
  case SweepAxis::max_power: return "max_power";
  case SweepAxis::num_elements: return "num_elements";
  case SweepAxis::num_users: return "num_users";
  case SweepAxis::energy_threshold: return "energy_threshold";
  case SweepAxis::noise_power: return "noise_power";
  case SweepAxis::error_stddev: return "error_stddev";
  }
  return "unknown";
}

inline SweepAxis sweep_axis_from_string(const std::string &s) {
  for (SweepAxis a : {SweepAxis::max_power, SweepAxis::num_elements, SweepAxis::num_users,
                      SweepAxis::energy_threshold, SweepAxis::noise_power, SweepAxis::error_stddev})
    if (s == to_string(a)) return a;
  throw std::invalid_argument("unknown sweep axis '" + s + "'");
}

/// Config at one sweep point. num_elements must be a perfect square (square
/// array); noise_power sets antenna and ID noise of every user to the value.
inline ScenarioConfig apply_axis(const ScenarioConfig &base, SweepAxis axis, double value) {
  ScenarioConfig c = base;
  switch (axis) {
  case SweepAxis::max_power: c.max_power = value; break;
  case SweepAxis::num_elements: {
    const int side = static_cast<int>(std::lround(std::sqrt(value)));
    if (side < 1 || side * side != static_cast<int>(std::lround(value)))
      throw std::invalid_argument("num_elements sweep values must be perfect squares");
    c.elements_x = side;
    c.elements_z = side;
    break;
  }
  case SweepAxis::num_users: {
    const int k = static_cast<int>(std::lround(value));
    if (k < 1 || std::abs(value - k) > 1e-9) throw std::invalid_argument("num_users sweep values must be integers");
    c.num_users = k;
    if (!c.users.empty()) c.users.resize(static_cast<std::size_t>(k), c.default_user);
    break;
  }
  case SweepAxis::energy_threshold: c.energy_threshold = value; break;
  case SweepAxis::noise_power: {
    auto set = [value](UserParams &u) {
      u.antenna_noise = value;
      u.id_noise = value;
    };
    set(c.default_user);
    for (UserParams &u : c.users) set(u);
    break;
  }
  case SweepAxis::error_stddev: c.error_variance = value * value; break;
  }
  c.validate();
  return c;
}

/// Mean spectral norm of error matrices with the given entry variance.
inline double expected_error_spectral_norm(int n, double variance, int samples, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0, 7);
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) acc += spectral_norm(sample_error_matrix(n, variance, rng));
  return acc / samples;
}

struct ExperimentSpec {
  ScenarioConfig base;
  SweepAxis axis = SweepAxis::max_power;
  std::vector<double> values;
  std::vector<Algorithm> algorithms{Algorithm::proposed, Algorithm::random_phase, Algorithm::equal_power,
                                    Algorithm::fixed_rho};
  int repetitions = 20;
  int threads = 1;
  std::string output_path;

  void validate() const {
    if (values.empty()) throw std::invalid_argument("ExperimentSpec: no sweep values");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1])) throw std::invalid_argument("ExperimentSpec: sweep values must be strictly increasing");
    if (repetitions < 1) throw std::invalid_argument("ExperimentSpec: repetitions must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("ExperimentSpec: no algorithms");
    if (threads < 1) throw std::invalid_argument("ExperimentSpec: threads must be >= 1");
    base.validate();
  }
};

struct ExperimentRow {
  double value = 0.0;
  Algorithm algorithm = Algorithm::proposed;
  int repetition = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  AoStatus status = AoStatus::infeasible;
  double sum_rate = std::numeric_limits<double>::quiet_NaN(); ///< NaN for infeasible cells
  int iterations = 0;
  double runtime_seconds = 0.0;
  double min_id_margin = std::numeric_limits<double>::quiet_NaN();
  double min_eh_margin = std::numeric_limits<double>::quiet_NaN();
  double rank_residual = std::numeric_limits<double>::quiet_NaN();
  std::string reason;

  bool feasible() const { return status != AoStatus::infeasible; }
  /// Sum rate with an infeasible cell counted as zero service.
  double effective_rate() const { return feasible() ? sum_rate : 0.0; }
};

struct ExperimentResult {
  SweepAxis axis = SweepAxis::max_power;
  std::vector<double> values;
  std::vector<Algorithm> algorithms;
  int repetitions = 0;
  std::vector<ExperimentRow> rows; ///< ordered by value, repetition, algorithm
  std::vector<double> error_spectral_norm; ///< per value, filled for the error_stddev axis

  const ExperimentRow &at(std::size_t value_index, int rep, std::size_t alg_index) const {
    return rows.at((value_index * static_cast<std::size_t>(repetitions) + static_cast<std::size_t>(rep)) *
                       algorithms.size() +
                   alg_index);
  }
  std::size_t algorithm_index(Algorithm a) const {
    for (std::size_t i = 0; i < algorithms.size(); ++i)
      if (algorithms[i] == a) return i;
    throw std::invalid_argument(std::string("algorithm not in experiment: ") + to_string(a));
  }
  double mean_effective_rate(std::size_t value_index, Algorithm a) const {
    const std::size_t ai = algorithm_index(a);
    double acc = 0.0;
    for (int r = 0; r < repetitions; ++r) acc += at(value_index, r, ai).effective_rate();
    return acc / repetitions;
  }
  int feasible_count(std::size_t value_index, Algorithm a) const {
    const std::size_t ai = algorithm_index(a);
    int n = 0;
    for (int r = 0; r < repetitions; ++r) n += at(value_index, r, ai).feasible();
    return n;
  }
};

void write_results_csv(const ExperimentResult &res, std::ostream &out);

/// One cell: a channel draw shared by every algorithm at (value, repetition).
inline std::vector<ExperimentRow> run_cell(const ExperimentSpec &spec, std::size_t value_index, int rep) {
  const double value = spec.values[value_index];
  std::vector<ExperimentRow> out;
  ScenarioConfig cfg;
  try {
    cfg = apply_axis(spec.base, spec.axis, value);
  } catch (const std::exception &e) {
    for (Algorithm a : spec.algorithms) {
      ExperimentRow row;
      row.value = value;
      row.algorithm = a;
      row.repetition = rep;
      row.seed = spec.base.rng_seed;
      row.reason = e.what();
      out.push_back(row);
    }
    return out;
  }
  const ChannelSet cs = draw_scenario(cfg, static_cast<std::uint64_t>(rep));
  for (Algorithm a : spec.algorithms) {
    ExperimentRow row;
    row.value = value;
    row.algorithm = a;
    row.repetition = rep;
    row.seed = cfg.rng_seed;
    row.config_hash = config_hash(cfg);
    try {
      const SolutionState st = run_algorithm(a, cs, cfg, static_cast<std::uint64_t>(rep));
      row.status = st.status;
      row.iterations = st.iteration;
      row.runtime_seconds = st.runtime_seconds;
      if (st.status == AoStatus::infeasible) {
        row.reason = st.message;
      } else {
        row.sum_rate = st.objective();
        const MarginSummary m = margins(st.F, build_constraints(cs.phi, st.p, st.rho, cfg));
        row.min_id_margin = m.min_id;
        row.min_eh_margin = m.min_eh;
        row.rank_residual = rank_residual(st.F);
        row.reason = st.message;
      }
    } catch (const std::exception &e) {
      row.status = AoStatus::infeasible;
      row.reason = e.what();
    }
    out.push_back(row);
  }
  return out;
}

inline ExperimentResult run_experiment(const ExperimentSpec &spec) {
  spec.validate();
  ExperimentResult res;
  res.axis = spec.axis;
  res.values = spec.values;
  res.algorithms = spec.algorithms;
  res.repetitions = spec.repetitions;
  const std::size_t cells = spec.values.size() * static_cast<std::size_t>(spec.repetitions);
  std::vector<std::vector<ExperimentRow>> parts(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells; c = next++)
      parts[c] = run_cell(spec, c / static_cast<std::size_t>(spec.repetitions),
                          static_cast<int>(c % static_cast<std::size_t>(spec.repetitions)));
  };
  const int nt = std::min<int>(spec.threads, static_cast<int>(cells));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (std::thread &t : pool) t.join();
  }
  for (auto &p : parts) res.rows.insert(res.rows.end(), p.begin(), p.end());
  if (spec.axis == SweepAxis::error_stddev)
    for (double v : spec.values)
      res.error_spectral_norm.push_back(
          expected_error_spectral_norm(spec.base.num_elements(), v * v, 200, spec.base.rng_seed));
  if (!spec.output_path.empty()) {
    std::ofstream out(spec.output_path);
    if (!out) throw std::runtime_error("cannot write results '" + spec.output_path + "'");
    write_results_csv(res, out);
  }
  return res;
}

namespace detail {
inline std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}
} // namespace detail

inline void write_results_csv(const ExperimentResult &res, std::ostream &out) {
  out.precision(12);
  out << "axis,value,algorithm,repetition,seed,config_hash,status,sum_rate,iterations,runtime_s,"
         "min_id_margin,min_eh_margin,rank_residual,error_spectral_norm,reason\n";
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const ExperimentRow &r = res.rows[i];
    const std::size_t vi = i / (static_cast<std::size_t>(res.repetitions) * res.algorithms.size());
    out << to_string(res.axis) << ',' << r.value << ',' << to_string(r.algorithm) << ',' << r.repetition << ','
        << r.seed << ',' << hex64(r.config_hash) << ',' << to_string(r.status) << ',';
    if (r.feasible()) out << r.sum_rate;
    out << ',' << r.iterations << ',' << r.runtime_seconds << ',';
    if (r.feasible()) out << r.min_id_margin << ',' << r.min_eh_margin << ',' << r.rank_residual;
    else out << ",,";
    out << ',';
    if (vi < res.error_spectral_norm.size()) out << res.error_spectral_norm[vi];
    out << ',' << detail::csv_field(r.reason) << '\n';
  }
}

/// Whitespace-separated table for gnuplot: value, then per algorithm the
/// mean effective rate and the number of feasible repetitions.
inline void write_plot_data(const ExperimentResult &res, std::ostream &out) {
  out.precision(10);
  out << "# " << to_string(res.axis);
  for (Algorithm a : res.algorithms) out << ' ' << to_string(a) << ' ' << to_string(a) << "_feasible";
  if (!res.error_spectral_norm.empty()) out << " error_spectral_norm";
  out << '\n';
  for (std::size_t v = 0; v < res.values.size(); ++v) {
    out << res.values[v];
    for (Algorithm a : res.algorithms) out << ' ' << res.mean_effective_rate(v, a) << ' ' << res.feasible_count(v, a);
    if (v < res.error_spectral_norm.size()) out << ' ' << res.error_spectral_norm[v];
    out << '\n';
  }
}

} // namespace rms_swipt

#endif // RMS_SWIPT_EXPERIMENT_HPP
