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

#ifndef RMS_SWIPT_ACCEPTANCE_HPP
#define RMS_SWIPT_ACCEPTANCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ao.hpp"
#include "energy.hpp"
#include "experiment.hpp"
#include "oracles.hpp"
#include "validate.hpp"

namespace rms_swipt {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;
  std::vector<std::string> notes;
};

struct AcceptanceOptions {
  int repetitions = 20;
  long long mc_samples = 1000000;
  int oracle_instances = 50;
  int probes = 1000;
  long long prop2_samples = 100000;
  int threads = 1;
  std::vector<double> power_grid{0.125, 0.25, 0.5, 1.0, 2.0};
  std::vector<double> element_grid{9, 16, 36};
  std::vector<double> user_grid{2, 3, 4, 5};
  std::vector<double> energy_grid{1e-7, 1.7782794100389228e-7, 3.1622776601683795e-7, 5.6234132519034907e-7, 1e-6};
  std::vector<double> noise_grid{1e-10, 1e-9, 1e-8, 1e-7, 1e-6};
  std::vector<double> error_grid{1e-9, 1e-8, 3.1622776601683795e-8, 1e-7, 3.1622776601683795e-7};
  std::ostream *log = nullptr;
};

namespace detail {

inline std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline void log_line(const AcceptanceOptions &o, const std::string &s) {
  if (o.log) *o.log << "  " << s << '\n' << std::flush;
}

inline cplx complex_gaussian(Rng &rng, NormalDist &nd) { return complex_normal(rng, nd); }

inline CVector random_unit_modulus(int n, Rng &rng) {
  CVector f(n);
  for (int i = 0; i < n; ++i) f(i) = std::polar(1.0, 2.0 * kPi * uniform01(rng));
  return f;
}

/// Random PSD matrix of the given rank with unit-bounded diagonal.
inline CMatrix random_psd(int n, int rank, Rng &rng) {
  NormalDist nd;
  CMatrix g(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = complex_gaussian(rng, nd);
  CMatrix x = g * g.adjoint();
  const double dmax = x.diagonal().real().maxCoeff();
  return hermitian_part(x / dmax * (0.3 + 0.7 * uniform01(rng)));
}

inline CMatrix random_hermitian(int n, Rng &rng) {
  NormalDist nd;
  CMatrix x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = complex_gaussian(rng, nd);
  return hermitian_part(x);
}

inline RVector random_powers(int k, double p_max, Rng &rng) {
  RVector p(k);
  for (int i = 0; i < k; ++i) p(i) = 0.05 + uniform01(rng);
  return p * (p_max * (0.3 + 0.7 * uniform01(rng)) / p.sum());
}

inline RVector random_splits(int k, double lo, double hi, Rng &rng) {
  RVector r(k);
  for (int i = 0; i < k; ++i) r(i) = lo + (hi - lo) * uniform01(rng);
  return r;
}

inline ScenarioConfig toy_config(int side, int users) {
  ScenarioConfig c;
  c.elements_x = side;
  c.elements_z = side;
  c.num_users = users;
  return c;
}

inline double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline RVector vector_surrogate_gradient(const ConicProblem<VectorDomain> &pr, const RVector &x) {
  RVector g = pr.linear.size() == 0 ? RVector(RVector::Zero(x.size())) : pr.linear;
  for (const auto &l : pr.logs) g += (l.weight / (l.coeff.dot(x) + l.offset)) * l.coeff;
  return g;
}

inline double penalized_rate(const CMatrix &F, const RVector &p, const RVector &rho, const ChannelSet &cs,
                             const ScenarioConfig &cfg, double penalty) {
  return sum_rate(F, p, rho, cs, cfg) - penalty * (F.diagonal().real().sum() - spectral_norm(F));
}

} // namespace detail

struct BaselineRun {
  ChannelSet channels;
  SolutionState state;
};

/// Proposed algorithm on repetitions 0..reps-1 of a config.
inline std::vector<BaselineRun> baseline_runs(const ScenarioConfig &cfg, int reps) {
  std::vector<BaselineRun> out;
  for (int r = 0; r < reps; ++r) {
    BaselineRun b;
    b.channels = draw_scenario(cfg, static_cast<std::uint64_t>(r));
    b.state = algorithm1(b.channels, cfg, static_cast<std::uint64_t>(r));
    out.push_back(std::move(b));
  }
  return out;
}

inline CriterionResult criterion_convergence(const std::vector<BaselineRun> &runs, const ScenarioConfig &cfg) {
  CriterionResult c;
  c.id = 1;
  c.title = "convergence";
  int converged = 0, monotone = 0, max_iter = 0;
  double max_time = 0.0, worst_drop = 0.0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const SolutionState &st = runs[r].state;
    bool mono = true;
    for (std::size_t i = 1; i < st.objective_trace.size(); ++i) {
      const double drop = st.objective_trace[i - 1] - st.objective_trace[i];
      worst_drop = std::max(worst_drop, drop);
      if (drop > 1e-6) mono = false;
    }
    monotone += mono;
    const bool ok = st.status == AoStatus::converged && st.iteration <= cfg.max_ao_iterations && st.runtime_seconds <= 60.0;
    converged += ok;
    max_iter = std::max(max_iter, st.iteration);
    max_time = std::max(max_time, st.runtime_seconds);
    if (!ok || !mono)
      c.notes.push_back("run " + std::to_string(r) + ": " + to_string(st.status) + ", " + std::to_string(st.iteration) +
                        " iterations, " + detail::fmt("%.2f s", st.runtime_seconds) + (mono ? "" : ", non-monotone"));
  }
  const int n = static_cast<int>(runs.size());
  c.passed = n > 0 && converged == n && monotone == n;
  c.summary = std::to_string(converged) + "/" + std::to_string(n) + " converged, " + std::to_string(monotone) + "/" +
              std::to_string(n) + " monotone (largest drop " + detail::fmt("%.2e", worst_drop) + "), max " +
              std::to_string(max_iter) + " iterations, max " + detail::fmt("%.2f s", max_time);
  return c;
}

inline CriterionResult criterion_rank_one(const std::vector<BaselineRun> &runs, const ScenarioConfig &cfg) {
  CriterionResult c;
  c.id = 2;
  c.title = "rank-one enforcement";
  int checked = 0, good = 0;
  double worst_res = 0.0, worst_mod = 0.0, worst_rec = 0.0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const SolutionState &st = runs[r].state;
    if (st.status != AoStatus::converged) continue;
    ++checked;
    const double tr = st.F.diagonal().real().sum();
    const double res = rank_residual(st.F) / tr;
    const RankOneExtraction ex = extract_rank_one(st.F, cfg.rank_tol);
    const double mod = ex.ok ? ex.f.cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
    const double rec = ex.ok ? ex.reconstruction_error : std::numeric_limits<double>::infinity();
    worst_res = std::max(worst_res, res);
    worst_mod = std::max(worst_mod, mod);
    worst_rec = std::max(worst_rec, rec);
    const bool ok = res <= 1e-6 && mod <= 1.0 + 1e-9 && rec <= 1e-4;
    good += ok;
    if (!ok) c.notes.push_back("run " + std::to_string(r) + ": residual/tr " + detail::fmt("%.2e", res));
  }
  c.passed = checked > 0 && good == checked;
  c.summary = std::to_string(good) + "/" + std::to_string(checked) + " converged runs; max residual/tr " +
              detail::fmt("%.2e", worst_res) + ", max |f_n| " + detail::fmt("%.12f", worst_mod) +
              ", max reconstruction error " + detail::fmt("%.2e", worst_rec);
  return c;
}

inline CriterionResult criterion_robust(const std::vector<BaselineRun> &runs, const ScenarioConfig &cfg,
                                        const AcceptanceOptions &opt) {
  CriterionResult c;
  c.id = 3;
  c.title = "robust feasibility";
  int solutions = 0, analytic_ok = 0, mc_tests = 0, mc_ok = 0;
  double worst_analytic = 0.0, worst_z = 0.0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const SolutionState &st = runs[r].state;
    if (st.status != AoStatus::converged) continue;
    ++solutions;
    const ChannelSet &cs = runs[r].channels;
    const RobustConstraintSet rcs = build_constraints(cs.phi, st.p, st.rho, cfg);
    bool all = true;
    for (int k = 0; k < cs.num_users(); ++k) {
      const double oi = analytic_id_outage(st.F, rcs, k), oe = analytic_eh_outage(st.F, rcs, k);
      worst_analytic = std::max({worst_analytic, oi, oe});
      if (oi > cfg.user(k).id_outage_target + 1e-9 || oe > cfg.user(k).eh_outage_target + 1e-9) all = false;
      Rng rng = make_rng(cfg.rng_seed, r, 100 + static_cast<std::uint64_t>(k));
      const OutagePair mc = mc_outage(st.F, st.p, st.rho, cs, cfg, k, opt.mc_samples, rng);
      for (const McReport *m : {&mc.id, &mc.eh}) {
        ++mc_tests;
        const bool ok = std::abs(m->z_score) <= 3.0;
        mc_ok += ok;
        worst_z = std::max(worst_z, std::abs(m->z_score));
        if (!ok)
          c.notes.push_back("run " + std::to_string(r) + " user " + std::to_string(k) + (m == &mc.id ? " ID" : " EH") +
                            ": analytic " + detail::fmt("%.5f", m->analytic_value) + ", MC " +
                            detail::fmt("%.5f", m->estimate) + ", z " + detail::fmt("%.2f", m->z_score));
      }
    }
    analytic_ok += all;
    detail::log_line(opt, "criterion 3: run " + std::to_string(r) + " checked");
  }
  c.passed = solutions > 0 && analytic_ok == solutions && mc_ok == mc_tests;
  c.summary = std::to_string(analytic_ok) + "/" + std::to_string(solutions) + " solutions within outage targets (max " +
              detail::fmt("%.6f", worst_analytic) + "); " + std::to_string(mc_ok) + "/" + std::to_string(mc_tests) +
              " Monte Carlo checks within 3 SE (max |z| " + detail::fmt("%.2f", worst_z) + ", " +
              std::to_string(opt.mc_samples) + " draws each)";
  return c;
}

namespace detail {

// Mean over repetitions of a(rep) - b(rep).
inline double paired_mean(const ExperimentResult &res, std::size_t va, Algorithm a, std::size_t vb, Algorithm b) {
  const std::size_t ia = res.algorithm_index(a), ib = res.algorithm_index(b);
  double acc = 0.0;
  for (int r = 0; r < res.repetitions; ++r) acc += res.at(va, r, ia).effective_rate() - res.at(vb, r, ib).effective_rate();
  return acc / res.repetitions;
}

inline std::string means_line(const ExperimentResult &res, Algorithm a) {
  std::string s = std::string(to_string(a)) + ":";
  for (std::size_t v = 0; v < res.values.size(); ++v)
    s += " " + fmt("%.4g", res.values[v]) + "->" + fmt("%.3f", res.mean_effective_rate(v, a)) + "(" +
         std::to_string(res.feasible_count(v, a)) + ")";
  return s;
}

inline ExperimentResult sweep(const ScenarioConfig &cfg, SweepAxis axis, const std::vector<double> &values,
                              std::vector<Algorithm> algs, const AcceptanceOptions &opt) {
  ExperimentSpec spec;
  spec.base = cfg;
  spec.axis = axis;
  spec.values = values;
  spec.algorithms = std::move(algs);
  spec.repetitions = opt.repetitions;
  spec.threads = opt.threads;
  ExperimentResult res = run_experiment(spec);
  for (Algorithm a : res.algorithms) log_line(opt, std::string(to_string(axis)) + " " + means_line(res, a));
  return res;
}

// Checks sign(mean paired difference between consecutive points) for one algorithm.
inline bool monotone_check(const ExperimentResult &res, Algorithm a, bool increasing, std::vector<std::string> &notes) {
  bool ok = true;
  for (std::size_t v = 0; v + 1 < res.values.size(); ++v) {
    const double d = paired_mean(res, v + 1, a, v, a);
    if (increasing ? d < 0.0 : d > 0.0) {
      ok = false;
      notes.push_back(std::string(to_string(res.axis)) + " " + fmt("%.4g", res.values[v]) + " -> " +
                      fmt("%.4g", res.values[v + 1]) + ": paired mean change " + fmt("%.4f", d));
    }
  }
  return ok;
}

inline bool dominance_check(const ExperimentResult &res, std::vector<std::string> &notes) {
  bool ok = true;
  for (std::size_t v = 0; v < res.values.size(); ++v)
    for (Algorithm b : res.algorithms) {
      if (b == Algorithm::proposed) continue;
      const double d = paired_mean(res, v, Algorithm::proposed, v, b);
      if (d < 0.0) {
        ok = false;
        notes.push_back(std::string(to_string(res.axis)) + " " + fmt("%.4g", res.values[v]) + ": proposed - " +
                        to_string(b) + " = " + fmt("%.4f", d));
      }
    }
  return ok;
}

} // namespace detail

inline CriterionResult criterion_ordering(const ScenarioConfig &cfg, const AcceptanceOptions &opt) {
  CriterionResult c;
  c.id = 4;
  c.title = "ordering";
  const std::vector<Algorithm> all{Algorithm::proposed, Algorithm::random_phase, Algorithm::equal_power,
                                   Algorithm::fixed_rho};
  const ExperimentResult pw = detail::sweep(cfg, SweepAxis::max_power, opt.power_grid, all, opt);
  const ExperimentResult ne = detail::sweep(cfg, SweepAxis::num_elements, opt.element_grid, all, opt);
  const ExperimentResult nu = detail::sweep(cfg, SweepAxis::num_users, opt.user_grid, {Algorithm::proposed}, opt);
  const bool dom_p = detail::dominance_check(pw, c.notes);
  const bool dom_n = detail::dominance_check(ne, c.notes);
  const bool mono_p = detail::monotone_check(pw, Algorithm::proposed, true, c.notes);
  const bool mono_n = detail::monotone_check(ne, Algorithm::proposed, true, c.notes);
  const bool mono_k = detail::monotone_check(nu, Algorithm::proposed, false, c.notes);
  c.passed = dom_p && dom_n && mono_p && mono_n && mono_k;
  auto yn = [](bool b) { return b ? "ok" : "violated"; };
  c.summary = std::string("dominance over benchmarks: P_max ") + yn(dom_p) + ", N " + yn(dom_n) +
              "; proposed non-decreasing in P_max " + yn(mono_p) + ", in N " + yn(mono_n) + "; non-increasing in K " +
              yn(mono_k);
  for (const ExperimentResult *r : {&pw, &ne, &nu})
    for (Algorithm a : r->algorithms) c.notes.push_back(std::string(to_string(r->axis)) + " " + detail::means_line(*r, a));
  return c;
}

inline CriterionResult criterion_trends(const ScenarioConfig &cfg, const AcceptanceOptions &opt) {
  CriterionResult c;
  c.id = 5;
  c.title = "trends";
  const ExperimentResult eth = detail::sweep(cfg, SweepAxis::energy_threshold, opt.energy_grid, {Algorithm::proposed}, opt);
  const ExperimentResult noi = detail::sweep(cfg, SweepAxis::noise_power, opt.noise_grid, {Algorithm::proposed}, opt);
  const ExperimentResult err = detail::sweep(cfg, SweepAxis::error_stddev, opt.error_grid,
                                             {Algorithm::proposed, Algorithm::fixed_rho}, opt);
  const bool m_e = detail::monotone_check(eth, Algorithm::proposed, false, c.notes);
  const bool m_n = detail::monotone_check(noi, Algorithm::proposed, false, c.notes);
  const bool m_s = detail::monotone_check(err, Algorithm::proposed, false, c.notes);
  const std::size_t last = err.values.size() - 1;
  const double fr_first = err.mean_effective_rate(0, Algorithm::fixed_rho);
  const double fr_last = err.mean_effective_rate(last, Algorithm::fixed_rho);
  const int fr_infeasible = err.repetitions - err.feasible_count(last, Algorithm::fixed_rho);
  const double gap_last = detail::paired_mean(err, last, Algorithm::proposed, last, Algorithm::fixed_rho);
  const bool fr = fr_infeasible > 0 || fr_last < fr_first;
  c.passed = m_e && m_n && m_s && fr;
  auto yn = [](bool b) { return b ? "ok" : "violated"; };
  c.summary = std::string("proposed non-increasing in E_th ") + yn(m_e) + ", noise " + yn(m_n) + ", sigma_phi " +
              yn(m_s) + "; fixed_rho at largest sigma_phi: " + std::to_string(fr_infeasible) + " infeasible, mean " +
              detail::fmt("%.3f", fr_last) + " vs " + detail::fmt("%.3f", fr_first) + " at smallest (" +
              detail::fmt("%.1f%%", 100.0 * (1.0 - fr_last / std::max(fr_first, 1e-300))) +
              " drop), proposed - fixed_rho " + detail::fmt("%.3f", gap_last);
  for (const ExperimentResult *r : {&eth, &noi, &err})
    for (Algorithm a : r->algorithms) c.notes.push_back(std::string(to_string(r->axis)) + " " + detail::means_line(*r, a));
  if (!err.error_spectral_norm.empty())
    c.notes.push_back("mean error spectral norm at largest sigma_phi " + detail::fmt("%.3e", err.error_spectral_norm.back()));
  return c;
}

struct OracleTally {
  int matched = 0;
  int compared = 0;
  int infeasible_agree = 0;
  double worst_gap = 0.0;
};

/// P4 against projected gradient at N = 4 with non-binding robust constraints.
inline OracleTally oracle_p4(int instances, std::uint64_t seed) {
  OracleTally t;
  ScenarioConfig cfg = detail::toy_config(2, 2);
  cfg.sinr_threshold = 0.0;
  cfg.energy_threshold = 0.0;
  cfg.error_variance = 0.0;
  for (int i = 0; t.compared < instances && i < 4 * instances; ++i) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(i), 21);
    const ChannelSet cs = draw_scenario(cfg, static_cast<std::uint64_t>(1000 + i));
    const CMatrix F_r = detail::random_psd(cfg.num_elements(), 1, rng);
    const RVector p = detail::random_powers(2, cfg.max_power, rng);
    const RVector rho = detail::random_splits(2, 0.2, 0.9, rng);
    const double penalty = (i % 2 == 0) ? 0.0 : 0.5 * uniform01(rng);
    const Subproblem<PsdDomain> sp = solve_P4(F_r, p, rho, cs, cfg, penalty);
    CMatrix x;
    const OracleResult o = projected_gradient_psd(sp.problem, x);
    if (max_violation(sp.problem, x) > 1e-9) continue;
    ++t.compared;
    const double s = objective_value(sp.problem, sp.solution.value);
    const double gap = detail::relative_gap(s, o.objective);
    t.worst_gap = std::max(t.worst_gap, gap);
    t.matched += sp.solution.usable(cfg.solver.feas_tol) && gap <= 1e-3;
  }
  return t;
}

/// P5 against nested grid search at K = 2.
inline OracleTally oracle_p5(int instances, std::uint64_t seed) {
  OracleTally t;
  ScenarioConfig cfg = detail::toy_config(2, 2);
  for (int i = 0; t.compared < instances && i < 6 * instances; ++i) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(i), 22);
    cfg.energy_threshold = std::pow(10.0, -9.0 + 2.0 * uniform01(rng));
    cfg.error_variance = std::pow(10.0, -18.0 + 4.0 * uniform01(rng));
    const ChannelSet cs = draw_scenario(cfg, static_cast<std::uint64_t>(2000 + i));
    CVector f = detail::random_unit_modulus(cfg.num_elements(), rng);
    // Point the surface at one of the users half of the time.
    if (i % 2 == 0) {
      const CVector &h = cs.h[static_cast<std::size_t>(i / 2 % 2)];
      for (int n = 0; n < f.size(); ++n) f(n) = std::polar(1.0, std::arg(h(n)));
    }
    const CMatrix F = f * f.adjoint();
    const RVector p_r = detail::random_powers(2, cfg.max_power, rng);
    const RVector rho = detail::random_splits(2, 0.2, 0.8, rng);
    const Subproblem<VectorDomain> sp = solve_P5(F, p_r, rho, cs, cfg);
    RVector best;
    const OracleResult o = grid_search_2d(sp.problem, cfg.max_power, best);
    const bool solver_ok = sp.solution.usable(cfg.solver.feas_tol) && sp.solution.status != SolveStatus::infeasible;
    if (!solver_ok && !o.feasible) {
      ++t.infeasible_agree;
      continue;
    }
    ++t.compared;
    if (!solver_ok || !o.feasible) continue;
    const double gap = detail::relative_gap(objective_value(sp.problem, sp.solution.value), o.objective);
    t.worst_gap = std::max(t.worst_gap, gap);
    t.matched += gap <= 1e-3;
  }
  return t;
}

/// P6 against per-coordinate golden-section search.
inline OracleTally oracle_p6(int instances, std::uint64_t seed) {
  OracleTally t;
  ScenarioConfig cfg = detail::toy_config(2, 3);
  for (int i = 0; t.compared < instances && i < 6 * instances; ++i) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(i), 23);
    cfg.energy_threshold = std::pow(10.0, -9.0 + 2.0 * uniform01(rng));
    cfg.error_variance = std::pow(10.0, -18.0 + 4.0 * uniform01(rng));
    const ChannelSet cs = draw_scenario(cfg, static_cast<std::uint64_t>(3000 + i));
    const CVector f = detail::random_unit_modulus(cfg.num_elements(), rng);
    const CMatrix F = f * f.adjoint();
    const RVector p = detail::random_powers(3, cfg.max_power, rng);
    const RVector rho_r = detail::random_splits(3, 0.1, 0.9, rng);
    const Subproblem<VectorDomain> sp = solve_P6(F, p, rho_r, cs, cfg);
    RVector x;
    const OracleResult o = golden_section_separable(sp.problem, x);
    const bool solver_ok = sp.solution.usable(cfg.solver.feas_tol) && sp.solution.status != SolveStatus::infeasible;
    if (!solver_ok && !o.feasible) {
      ++t.infeasible_agree;
      continue;
    }
    ++t.compared;
    if (!solver_ok || !o.feasible) continue;
    const double gap = detail::relative_gap(objective_value(sp.problem, sp.solution.value), o.objective);
    t.worst_gap = std::max(t.worst_gap, gap);
    t.matched += gap <= 1e-3;
  }
  return t;
}

inline CriterionResult criterion_oracles(const ScenarioConfig &cfg, const AcceptanceOptions &opt) {
  CriterionResult c;
  c.id = 6;
  c.title = "oracle equivalence";
  const OracleTally t4 = oracle_p4(opt.oracle_instances, cfg.rng_seed);
  const OracleTally t5 = oracle_p5(opt.oracle_instances, cfg.rng_seed);
  const OracleTally t6 = oracle_p6(opt.oracle_instances, cfg.rng_seed);
  auto part = [&](const char *name, const OracleTally &t) {
    return std::string(name) + " " + std::to_string(t.matched) + "/" + std::to_string(t.compared) + " (max gap " +
           detail::fmt("%.1e", t.worst_gap) + ", " + std::to_string(t.infeasible_agree) + " agreed infeasible)";
  };
  auto full = [&](const OracleTally &t) { return t.compared == opt.oracle_instances && t.matched == t.compared; };
  c.passed = full(t4) && full(t5) && full(t6);
  c.summary = part("P4", t4) + "; " + part("P5", t5) + "; " + part("P6", t6);
  return c;
}

inline CriterionResult criterion_kernels(const ScenarioConfig &cfg, const AcceptanceOptions &opt) {
  CriterionResult c;
  c.id = 7;
  c.title = "math kernels";
  bool ok = true;
  std::ostringstream sum;

  // Interference-log gradient against central differences.
  {
    ScenarioConfig tc = detail::toy_config(2, 2);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Rng rng = make_rng(cfg.rng_seed, static_cast<std::uint64_t>(i), 31);
      const ChannelSet cs = draw_scenario(tc, static_cast<std::uint64_t>(4000 + i));
      const CMatrix F = detail::random_psd(4, 2, rng);
      const CMatrix D = detail::random_hermitian(4, rng);
      const RVector p = detail::random_powers(2, tc.max_power, rng);
      const RVector rho = detail::random_splits(2, 0.1, 0.9, rng);
      worst = std::max(worst, check_grad_gbar(F, D, p, rho, cs, i % 2, tc).best_relative_error);
    }
    ok = ok && worst <= 1e-5;
    sum << "gradient FD " << detail::fmt("%.1e", worst);
  }

  // Bounds of the linearizations: global minorants of the true objectives,
  // tight at the expansion point.
  {
    ScenarioConfig tc = detail::toy_config(2, 3);
    int bound_fail = 0, tight_fail = 0;
    double worst_tight = 0.0;
    auto tight = [&](double s, double t) {
      const double g = std::abs(s - t) / std::max(1.0, std::abs(t));
      worst_tight = std::max(worst_tight, g);
      if (g > 1e-9) ++tight_fail;
    };
    auto below = [&](double s, double t) {
      if (s > t + 1e-9 * std::max(1.0, std::abs(t))) ++bound_fail;
    };
    for (int i = 0; i < opt.probes; ++i) {
      Rng rng = make_rng(cfg.rng_seed, static_cast<std::uint64_t>(i), 32);
      const ChannelSet cs = draw_scenario(tc, static_cast<std::uint64_t>(5000 + i % 50));
      const int n = tc.num_elements();
      const CMatrix F_r = detail::random_psd(n, 1 + i % 3, rng);
      const CMatrix F = detail::random_psd(n, 1 + i % 4, rng);
      const RVector p_r = detail::random_powers(3, tc.max_power, rng), p = detail::random_powers(3, tc.max_power, rng);
      const RVector rho_r = detail::random_splits(3, 0.05, 0.95, rng), rho = detail::random_splits(3, 0.05, 0.95, rng);
      // Spectral-norm minorant.
      below(spectral_lb(F, F_r).value, spectral_norm(F));
      tight(spectral_lb(F_r, F_r).value, spectral_norm(F_r));
      // F-block surrogate with penalty.
      const double pen = uniform01(rng);
      const auto p4 = build_P4(F_r, p_r, rho_r, cs, build_constraints(cs.phi, p_r, rho_r, tc), tc, pen);
      below(objective_value(p4, F), detail::penalized_rate(F, p_r, rho_r, cs, tc, pen));
      tight(objective_value(p4, F_r), detail::penalized_rate(F_r, p_r, rho_r, cs, tc, pen));
      // Power block.
      const auto p5 = build_P5(F_r, p_r, rho_r, cs, tc);
      below(objective_value(p5, p), sum_rate(F_r, p, rho_r, cs, tc));
      tight(objective_value(p5, p_r), sum_rate(F_r, p_r, rho_r, cs, tc));
      // Splitting block.
      const auto p6 = build_P6(F_r, p_r, rho_r, cs, tc);
      below(objective_value(p6, rho), sum_rate(F_r, p_r, rho, cs, tc));
      tight(objective_value(p6, rho_r), sum_rate(F_r, p_r, rho_r, cs, tc));
    }
    ok = ok && bound_fail == 0 && tight_fail == 0;
    sum << "; surrogate probes " << opt.probes << ": " << bound_fail << " bound and " << tight_fail
        << " tightness violations (max gap " << detail::fmt("%.1e", worst_tight) << ")";
  }

  // Tangency of the power and splitting surrogates.
  {
    ScenarioConfig tc = detail::toy_config(2, 3);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Rng rng = make_rng(cfg.rng_seed, static_cast<std::uint64_t>(i), 33);
      const ChannelSet cs = draw_scenario(tc, static_cast<std::uint64_t>(6000 + i));
      const CMatrix F = detail::random_psd(4, 1, rng);
      const RVector p = detail::random_powers(3, tc.max_power, rng);
      const RVector rho = detail::random_splits(3, 0.1, 0.9, rng);
      RVector dp(3), dr(3);
      for (int k = 0; k < 3; ++k) {
        dp(k) = uniform01(rng) - 0.5;
        dr(k) = uniform01(rng) - 0.5;
      }
      const auto p5 = build_P5(F, p, rho, cs, tc);
      const auto p6 = build_P6(F, p, rho, cs, tc);
      const double a5 = detail::vector_surrogate_gradient(p5, p).dot(dp);
      const double a6 = detail::vector_surrogate_gradient(p6, rho).dot(dr);
      const double h5 = 1e-2 * p.minCoeff(), h6 = 1e-2 * std::min(rho.minCoeff(), 1.0 - rho.maxCoeff());
      worst = std::max(worst, fd_gradient_check([&](double t) { return sum_rate(F, p + t * dp, rho, cs, tc); }, a5,
                                                {h5, h5 / 10, h5 / 100})
                                  .best_relative_error);
      worst = std::max(worst, fd_gradient_check([&](double t) { return sum_rate(F, p, rho + t * dr, cs, tc); }, a6,
                                                {h6, h6 / 10, h6 / 100})
                                  .best_relative_error);
    }
    ok = ok && worst <= 1e-5;
    sum << "; power/splitting tangency FD " << detail::fmt("%.1e", worst);
  }

  // Harvester end points.
  {
    const EhParams eh = cfg.user(0).eh;
    const double at0 = harvest(0.0, eh);
    const double sup = harvest(1e6, eh);
    const bool hv = std::abs(at0) <= 1e-12 && std::abs(sup - 0.024) <= 1e-12 && std::abs(eh.max_harvest - 0.024) <= 1e-12;
    ok = ok && hv;
    sum << "; Psi(0) " << detail::fmt("%.1e", at0) << ", sup " << detail::fmt("%.15f", sup);
  }

  // Trace variance of the error model.
  {
    Rng rng = make_rng(cfg.rng_seed, 0, 34);
    const CMatrix Y = detail::random_hermitian(8, rng);
    const VarianceReport v = check_prop2(Y, 0.01, opt.prop2_samples, rng);
    ok = ok && v.ratio >= 0.9 && v.ratio <= 1.1;
    sum << "; trace variance ratio " << detail::fmt("%.4f", v.ratio) << " at " << opt.prop2_samples << " samples";
  }
  c.passed = ok;
  c.summary = sum.str();
  return c;
}

/// Runs the selected criteria (1..7); an empty selection runs all of them.
inline std::vector<CriterionResult> run_acceptance(const ScenarioConfig &cfg, const AcceptanceOptions &opt,
                                                   std::vector<int> selection = {}) {
  if (selection.empty()) selection = {1, 2, 3, 4, 5, 6, 7};
  auto wanted = [&](int id) { return std::find(selection.begin(), selection.end(), id) != selection.end(); };
  std::vector<CriterionResult> out;
  std::vector<BaselineRun> runs;
  if (wanted(1) || wanted(2) || wanted(3)) {
    runs = baseline_runs(cfg, opt.repetitions);
    detail::log_line(opt, "baseline runs done");
  }
  if (wanted(1)) out.push_back(criterion_convergence(runs, cfg));
  if (wanted(2)) out.push_back(criterion_rank_one(runs, cfg));
  if (wanted(3)) out.push_back(criterion_robust(runs, cfg, opt));
  if (wanted(4)) out.push_back(criterion_ordering(cfg, opt));
  if (wanted(5)) out.push_back(criterion_trends(cfg, opt));
  if (wanted(6)) out.push_back(criterion_oracles(cfg, opt));
  if (wanted(7)) out.push_back(criterion_kernels(cfg, opt));
  return out;
}

inline std::string format_result(const CriterionResult &c) {
  return std::string(c.passed ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " (" + c.title + "): " + c.summary;
}

} // namespace rms_swipt

#endif // RMS_SWIPT_ACCEPTANCE_HPP
