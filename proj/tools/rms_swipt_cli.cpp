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

// Command-line front end: parameter sweeps, the acceptance suite and CSV summaries.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "rms_swipt/acceptance.hpp"
#include "rms_swipt/experiment.hpp"

namespace rs = rms_swipt;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App *app, CommonOptions &o) {
  app->add_option("-c,--config", o.config_path, "JSON scenario file (defaults are used when absent)")
      ->check(CLI::ExistingFile);
  app->add_option("-s,--set", o.overrides, "Override a config field, e.g. --set max_power=2 --set default_user.eh.a=100");
  app->add_option_function<std::uint64_t>(
      "--seed",
      [&o](const std::uint64_t &v) {
        o.seed = v;
        o.seed_set = true;
      },
      "Base seed for geometry, fading and initial points");
}

rs::ScenarioConfig load(const CommonOptions &o) {
  rs::ScenarioConfig c = o.config_path.empty() ? rs::ScenarioConfig{} : rs::load_config(o.config_path);
  c = rs::apply_overrides(c, o.overrides);
  if (o.seed_set) c.rng_seed = o.seed;
  c.validate();
  return c;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += ch;
    }
  }
  out.push_back(cell);
  return out;
}

int run_report(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);
  auto col = [&](const std::string &name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("column '" + name + "' missing from '" + path + "'");
  };
  const std::size_t c_axis = col("axis"), c_value = col("value"), c_alg = col("algorithm"), c_status = col("status"),
                    c_rate = col("sum_rate"), c_iter = col("iterations"), c_time = col("runtime_s");
  struct Cell {
    int runs = 0, feasible = 0, converged = 0;
    double rate = 0.0, iterations = 0.0, runtime = 0.0;
  };
  std::map<std::pair<double, std::string>, Cell> cells;
  std::string axis;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < header.size()) throw std::runtime_error("short row in '" + path + "': " + line);
    axis = f[c_axis];
    Cell &c = cells[{std::stod(f[c_value]), f[c_alg]}];
    ++c.runs;
    c.iterations += std::stod(f[c_iter]);
    c.runtime += std::stod(f[c_time]);
    if (f[c_status] != "infeasible") {
      ++c.feasible;
      c.rate += std::stod(f[c_rate]);
    }
    c.converged += f[c_status] == "converged";
  }
  std::cout << std::left << std::setw(14) << axis << std::setw(14) << "algorithm" << std::right << std::setw(8)
            << "runs" << std::setw(10) << "feasible" << std::setw(11) << "converged" << std::setw(14) << "mean_rate"
            << std::setw(14) << "eff_rate" << std::setw(10) << "iters" << std::setw(11) << "time_s" << '\n';
  for (const auto &[key, c] : cells) {
    std::cout << std::left << std::setw(14) << key.first << std::setw(14) << key.second << std::right << std::setw(8)
              << c.runs << std::setw(10) << c.feasible << std::setw(11) << c.converged << std::fixed
              << std::setprecision(4) << std::setw(14) << (c.feasible ? c.rate / c.feasible : 0.0) << std::setw(14)
              << c.rate / c.runs << std::setprecision(2) << std::setw(10) << c.iterations / c.runs << std::setw(11)
              << c.runtime / c.runs << std::defaultfloat << std::setprecision(6) << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Robust sum-rate maximization for transmissive-metasurface SWIPT networks"};
  app.require_subcommand(1);

  CommonOptions run_common;
  std::string axis_name = "max_power";
  std::vector<double> values;
  std::vector<std::string> algorithms{"proposed", "random_phase", "equal_power", "fixed_rho"};
  int repetitions = 20, threads = 1;
  std::string out_dir = "results";
  bool plot = true;
  CLI::App *run = app.add_subcommand("run", "Sweep one parameter and write per-run results");
  add_common(run, run_common);
  run->add_option("-a,--axis", axis_name,
                  "Sweep axis: max_power, num_elements, num_users, energy_threshold, noise_power, error_stddev")
      ->capture_default_str();
  run->add_option("-v,--values", values, "Strictly increasing sweep values")->required()->delimiter(',');
  run->add_option("--algorithms", algorithms, "Comma-separated subset of proposed, random_phase, equal_power, fixed_rho")
      ->delimiter(',')
      ->capture_default_str();
  run->add_option("-r,--reps", repetitions, "Repetitions per sweep value")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("-j,--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  run->add_flag("!--no-plot", plot, "Skip the gnuplot data file");

  CommonOptions val_common;
  rs::AcceptanceOptions acc;
  std::vector<int> criteria;
  bool verbose = false;
  CLI::App *validate = app.add_subcommand("validate", "Run the acceptance criteria; exits nonzero if any fails");
  add_common(validate, val_common);
  validate->add_option("--criteria", criteria, "Subset of criteria 1-7 (default all)")
      ->delimiter(',')
      ->check(CLI::Range(1, 7));
  validate->add_option("-r,--reps", acc.repetitions, "Repetitions per experiment")->capture_default_str();
  validate->add_option("--mc-samples", acc.mc_samples, "Monte Carlo draws per outage check")->capture_default_str();
  validate->add_option("--oracle-instances", acc.oracle_instances, "Instances per oracle comparison")
      ->capture_default_str();
  validate->add_option("--probes", acc.probes, "Random probes for the bound checks")->capture_default_str();
  validate->add_option("--variance-samples", acc.prop2_samples, "Samples for the trace-variance check")
      ->capture_default_str();
  validate->add_option("-j,--threads", acc.threads, "Worker threads for the sweeps")->capture_default_str();
  validate->add_flag("--verbose", verbose, "Log progress to stderr");

  std::string report_path;
  CLI::App *report = app.add_subcommand("report", "Summarize a results CSV written by 'run'");
  report->add_option("csv", report_path, "results.csv")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      rs::ExperimentSpec spec;
      spec.base = load(run_common);
      spec.axis = rs::sweep_axis_from_string(axis_name);
      spec.values = values;
      spec.algorithms.clear();
      for (const auto &a : algorithms) spec.algorithms.push_back(rs::algorithm_from_string(a));
      spec.repetitions = repetitions;
      spec.threads = threads;
      fs::create_directories(out_dir);
      spec.output_path = (fs::path(out_dir) / "results.csv").string();
      rs::save_config(spec.base, (fs::path(out_dir) / "config.json").string());
      const rs::ExperimentResult res = rs::run_experiment(spec);
      if (plot) {
        std::ofstream pd(fs::path(out_dir) / "plot.dat");
        rs::write_plot_data(res, pd);
      }
      for (rs::Algorithm a : res.algorithms) {
        std::cout << rs::to_string(a) << ':';
        for (std::size_t v = 0; v < res.values.size(); ++v)
          std::cout << ' ' << res.values[v] << "->" << res.mean_effective_rate(v, a) << " (" << res.feasible_count(v, a)
                    << '/' << res.repetitions << ')';
        std::cout << '\n';
      }
      std::cout << "wrote " << spec.output_path << '\n';
      return 0;
    }
    if (*validate) {
      const rs::ScenarioConfig cfg = load(val_common);
      if (verbose) acc.log = &std::cerr;
      int failed = 0;
      for (const auto &c : rs::run_acceptance(cfg, acc, criteria)) {
        std::cout << rs::format_result(c) << '\n';
        for (const auto &n : c.notes) std::cout << "    " << n << '\n';
        failed += !c.passed;
      }
      return failed == 0 ? 0 : 1;
    }
    if (*report) return run_report(report_path);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
