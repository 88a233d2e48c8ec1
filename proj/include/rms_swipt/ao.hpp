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

#ifndef RMS_SWIPT_AO_HPP
#define RMS_SWIPT_AO_HPP

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "linalg.hpp"
#include "robust.hpp"
#include "scenario.hpp"
#include "solver.hpp"

namespace rms_swipt {

/// tr(Phi_k F) = h_k^H F h_k for every user.
inline RVector channel_gains(const ChannelSet &cs, const CMatrix &F) {
  RVector t(cs.num_users());
  for (int k = 0; k < cs.num_users(); ++k) t(k) = cs.h[k].dot(F * cs.h[k]).real();
  return t;
}

inline double user_rate(int k, const RVector &gain, const RVector &p, const RVector &rho, const ScenarioConfig &cfg) {
  const UserParams &u = cfg.user(k);
  const double noise = rho(k) * u.antenna_noise + u.id_noise_value();
  const double interference = rho(k) * (p.sum() - p(k)) * gain(k);
  return std::log2(1.0 + rho(k) * p(k) * gain(k) / (interference + noise));
}

/// Sum of the per-user achievable rates with the estimated covariances, bits/s/Hz.
inline double sum_rate(const CMatrix &F, const RVector &p, const RVector &rho, const ChannelSet &cs,
                       const ScenarioConfig &cfg) {
  const RVector g = channel_gains(cs, F);
  double r = 0.0;
  for (int k = 0; k < cs.num_users(); ++k) r += user_rate(k, g, p, rho, cfg);
  return r;
}

namespace detail {
inline double interference_denominator(int k, double gain, const RVector &p, const RVector &rho,
                                       const ScenarioConfig &cfg) {
  const UserParams &u = cfg.user(k);
  return rho(k) * (p.sum() - p(k)) * gain + rho(k) * u.antenna_noise + u.id_noise_value();
}
} // namespace detail

/// Gradient in F of log2(rho_k sum_{i!=k} p_i tr(Phi_k F) + rho_k sigma_k^2 + delta_k^2) at F_r.
inline CMatrix grad_gbar(const CMatrix &F_r, const RVector &p, const RVector &rho, const CMatrix &phi_k, int k,
                         const ScenarioConfig &cfg) {
  const double gain = trace_product(phi_k, F_r);
  const double den = detail::interference_denominator(k, gain, p, rho, cfg);
  if (!(den > 0.0)) throw std::domain_error("grad_gbar: non-positive denominator");
  return (rho(k) * (p.sum() - p(k)) / (den * kLn2)) * phi_k;
}

struct SpectralBound {
  double value = 0.0;
  bool degenerate = false;
  CVector direction;
};

/// Affine minorant of the spectral norm expanded at F_r, evaluated at F.
inline SpectralBound spectral_lb(const CMatrix &F, const CMatrix &F_r) {
  const DominantEigen de = dominant_eigen(F_r);
  SpectralBound sb;
  sb.direction = de.vector;
  sb.degenerate = de.degenerate;
  sb.value = de.value + trace_product(de.vector * de.vector.adjoint(), F - F_r);
  return sb;
}

/// tr(F) - ||F||_2, zero exactly when rank(F) <= 1.
inline double rank_residual(const CMatrix &F) {
  const RVector ev = hermitian_eigenvalues(F);
  return std::max(0.0, ev.sum() - ev(ev.size() - 1));
}

struct RankOneExtraction {
  bool ok = false;
  CVector f;
  double residual = 0.0;
  double reconstruction_error = 0.0; ///< ||F - f f^H||_F / ||F||_F
};

/// f = sqrt(lambda_1) u_1 with entries clipped to unit modulus; refused when
/// the rank residual exceeds rank_tol * tr(F).
inline RankOneExtraction extract_rank_one(const CMatrix &F, double rank_tol) {
  RankOneExtraction out;
  const double tr = F.diagonal().real().sum();
  out.residual = rank_residual(F);
  if (!(out.residual <= rank_tol * std::max(tr, std::numeric_limits<double>::min()))) return out;
  const DominantEigen de = dominant_eigen(F);
  out.f = std::sqrt(std::max(de.value, 0.0)) * de.vector;
  for (Eigen::Index n = 0; n < out.f.size(); ++n) {
    const double a = std::abs(out.f(n));
    if (a > 1.0) out.f(n) /= a;
  }
  const double fn = frobenius_norm(F);
  out.reconstruction_error = fn > 0.0 ? frobenius_norm(F - out.f * out.f.adjoint()) / fn : 0.0;
  out.ok = true;
  return out;
}

// ---- subproblems -------------------------------------------------------------


/// Penalized, linearized problem in F for fixed (p, rho) expanded at F_r.
inline ConicProblem<PsdDomain> build_P4(const CMatrix &F_r, const RVector &p, const RVector &rho, const ChannelSet &cs,
                                        const RobustConstraintSet &rcs, const ScenarioConfig &cfg, double penalty) {
  const int K = cs.num_users();
  const int N = cs.num_elements();
  ConicProblem<PsdDomain> pr;
  pr.domain.order = N;
  const double ptot = p.sum();
  for (int k = 0; k < K; ++k) {
    const UserParams &u = cfg.user(k);
    const double noise = rho(k) * u.antenna_noise + u.id_noise_value();
    pr.logs.push_back({HermitianCoeff{}.add_outer(rho(k) * ptot, cs.h[k]), noise, 1.0 / kLn2});
    // Upper bound of the interference log, tight at F_r.
    const double others = rho(k) * (ptot - p(k));
    const double gain_r = cs.h[k].dot(F_r * cs.h[k]).real();
    const double den = others * gain_r + noise;
    const double slope = others / (den * kLn2);
    pr.linear.add_outer(-slope, cs.h[k]);
    pr.constant -= std::log2(den) - slope * gain_r;
  }
  if (penalty > 0.0) {
    const DominantEigen de = dominant_eigen(F_r);
    pr.linear.add_identity(-penalty);
    pr.linear.add_outer(penalty, de.vector);
  }
  for (int n = 0; n < N; ++n) {
    CVector e = CVector::Zero(N);
    e(n) = 1.0;
    pr.constraints.push_back({HermitianCoeff{}.add_outer(1.0, e), 1.0});
  }
  for (int k = 0; k < K; ++k) {
    const UserConstraint &uc = rcs[k];
    pr.cones.push_back({HermitianCoeff{}.add_outer(uc.tilde_scale, cs.h[k]), -uc.c, uc.id_coeff * uc.sigma_e, {}, {}});
  }
  for (int k = 0; k < K; ++k) {
    const UserConstraint &uc = rcs[k];
    pr.cones.push_back({HermitianCoeff{}.add_outer(uc.hat_scale, cs.h[k]), -uc.phi, uc.eh_coeff * uc.beta_e, {}, {}});
  }
  return pr;
}

/// Linearized power-allocation problem for fixed (F, rho) expanded at p_r.
inline ConicProblem<VectorDomain> build_P5(const CMatrix &F, const RVector &p_r, const RVector &rho,
                                           const ChannelSet &cs, const ScenarioConfig &cfg) {
  const int K = cs.num_users();
  const RVector gain = channel_gains(cs, F);
  const double fn = frobenius_norm(F);
  const double sphi = cfg.error_stddev();
  const double g = cfg.sinr_threshold;
  ConicProblem<VectorDomain> pr;
  pr.domain.size = K;
  pr.linear = RVector::Zero(K);
  for (int k = 0; k < K; ++k) {
    const UserParams &u = cfg.user(k);
    const double noise = rho(k) * u.antenna_noise + u.id_noise_value();
    pr.logs.push_back({RVector::Constant(K, rho(k) * gain(k)), noise, 1.0 / kLn2});
    const double den = rho(k) * (p_r.sum() - p_r(k)) * gain(k) + noise;
    RVector a = RVector::Constant(K, rho(k) * gain(k) / (den * kLn2));
    a(k) = 0.0;
    pr.linear -= a;
    pr.constant -= std::log2(den) - a.dot(p_r);
  }
  for (int k = 0; k < K; ++k) {
    RVector e = RVector::Zero(K);
    e(k) = -1.0;
    pr.constraints.push_back({e, 0.0});
  }
  pr.constraints.push_back({RVector::Ones(K), cfg.max_power});
  for (int k = 0; k < K; ++k) {
    const UserParams &u = cfg.user(k);
    const double id_coeff = outage_coeff(u.id_outage_target);
    RVector a = RVector::Constant(K, -g * rho(k) * gain(k));
    a(k) = rho(k) * gain(k);
    RMatrix m = RMatrix::Zero(K, K);
    m.diagonal().setConstant(g);
    m(k, k) = 1.0;
    const double c = rho(k) * g * u.antenna_noise + g * u.id_noise_value();
    pr.cones.push_back({a, -c, id_coeff * rho(k) * sphi * fn, m, {}});
  }
  for (int k = 0; k < K; ++k) {
    const UserParams &u = cfg.user(k);
    const double eh_coeff = outage_coeff(u.eh_outage_target);
    const double phi = harvest_inverse(cfg.energy_threshold, u.eh) - (1.0 - rho(k)) * u.antenna_noise;
    pr.cones.push_back({RVector::Constant(K, (1.0 - rho(k)) * gain(k)), -phi,
                        eh_coeff * (1.0 - rho(k)) * sphi * fn, {}, {}});
  }
  return pr;
}

/// Linearized power-splitting problem for fixed (F, p) expanded at rho_r.
inline ConicProblem<VectorDomain> build_P6(const CMatrix &F, const RVector &p, const RVector &rho_r,
                                           const ChannelSet &cs, const ScenarioConfig &cfg) {
  const int K = cs.num_users();
  const RVector gain = channel_gains(cs, F);
  const double fn = frobenius_norm(F);
  const double sphi = cfg.error_stddev();
  const double g = cfg.sinr_threshold;
  const double ptot = p.sum();
  ConicProblem<VectorDomain> pr;
  pr.domain.size = K;
  pr.linear = RVector::Zero(K);
  for (int k = 0; k < K; ++k) {
    const UserParams &u = cfg.user(k);
    const double delta2 = u.id_noise_value();
    const double a_k = ptot * gain(k) + u.antenna_noise;
    const double b_k = (ptot - p(k)) * gain(k) + u.antenna_noise;
    RVector ea = RVector::Zero(K);
    ea(k) = a_k;
    pr.logs.push_back({ea, delta2, 1.0 / kLn2});
    const double den = rho_r(k) * b_k + delta2;
    const double slope = b_k / (den * kLn2);
    pr.linear(k) -= slope;
    pr.constant -= std::log2(den) - slope * rho_r(k);

    RVector e = RVector::Zero(K);
    e(k) = 1.0;
    pr.constraints.push_back({-e, 0.0});
    pr.constraints.push_back({e, 1.0});

    const double id_coeff = outage_coeff(u.id_outage_target);
    const double eh_coeff = outage_coeff(u.eh_outage_target);
    const double sig = sphi * std::sqrt(p(k) * p(k) + g * g * std::max(p.squaredNorm() - p(k) * p(k), 0.0));
    // rho_k [ (p_k - g sum_{i!=k} p_i) T_k - g sigma_k^2 - id_coeff sig ||F|| ] >= g delta_k^2
    const double id_slope = (p(k) - g * (ptot - p(k))) * gain(k) - g * u.antenna_noise - id_coeff * sig * fn;
    pr.constraints.push_back({-id_slope * e, -g * delta2});
    // (1 - rho_k) [ sum_i p_i T_k + sigma_k^2 - eh_coeff sigma_phi ||p|| ||F|| ] >= Psi^{-1}(E_th)
    const double eh_level = ptot * gain(k) + u.antenna_noise - eh_coeff * sphi * p.norm() * fn;
    const double need = harvest_inverse(cfg.energy_threshold, u.eh);
    pr.constraints.push_back({eh_level * e, eh_level - need});
  }
  return pr;
}

template <class Domain> struct Subproblem {
  ConicProblem<Domain> problem;
  ConicSolution<Domain> solution;
  double surrogate_at_start = 0.0; ///< surrogate objective at the expansion point
};

/// P4 at expansion point F_r, warm-started there.
inline Subproblem<PsdDomain> solve_P4(const CMatrix &F_r, const RVector &p, const RVector &rho, const ChannelSet &cs,
                                      const ScenarioConfig &cfg, double penalty) {
  Subproblem<PsdDomain> sp;
  sp.problem = build_P4(F_r, p, rho, cs, build_constraints(cs.phi, p, rho, cfg), cfg, penalty);
  sp.surrogate_at_start = objective_value(sp.problem, F_r);
  sp.solution = solve(sp.problem, F_r, cfg.solver);
  return sp;
}

inline Subproblem<VectorDomain> solve_P5(const CMatrix &F, const RVector &p_r, const RVector &rho,
                                         const ChannelSet &cs, const ScenarioConfig &cfg) {
  Subproblem<VectorDomain> sp;
  sp.problem = build_P5(F, p_r, rho, cs, cfg);
  sp.surrogate_at_start = objective_value(sp.problem, p_r);
  sp.solution = solve(sp.problem, p_r, cfg.solver);
  return sp;
}

inline Subproblem<VectorDomain> solve_P6(const CMatrix &F, const RVector &p, const RVector &rho_r,
                                         const ChannelSet &cs, const ScenarioConfig &cfg) {
  Subproblem<VectorDomain> sp;
  sp.problem = build_P6(F, p, rho_r, cs, cfg);
  sp.surrogate_at_start = objective_value(sp.problem, rho_r);
  sp.solution = solve(sp.problem, rho_r, cfg.solver);
  return sp;
}

// ---- solution state ------------------------------------------------------------

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double rank_residual = 0.0;
  double min_id_margin = 0.0;
  double min_eh_margin = 0.0;
  double penalty = 0.0;
};

enum class AoStatus { converged, max_iterations, infeasible };

inline const char *to_string(AoStatus s) {
  switch (s) {
  case AoStatus::converged: return "converged";
  case AoStatus::max_iterations: return "max_iterations";
  case AoStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

struct SolutionState {
  CMatrix F;
  RVector p;
  RVector rho;
  CVector f;
  double penalty = 0.0;
  int iteration = 0;
  std::vector<double> objective_trace;
  std::vector<IterationRecord> trace;
  AoStatus status = AoStatus::max_iterations;
  std::string message;
  double runtime_seconds = 0.0;
  int subproblem_failures = 0;

  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

struct MarginSummary {
  double min_id = std::numeric_limits<double>::infinity();
  double min_eh = std::numeric_limits<double>::infinity();
  /// Margins divided by the scale of the terms they compare.
  double min_id_relative = std::numeric_limits<double>::infinity();
  double min_eh_relative = std::numeric_limits<double>::infinity();
};

inline MarginSummary margins(const CMatrix &F, const RobustConstraintSet &rcs) {
  MarginSummary m;
  const double fn = frobenius_norm(F);
  for (int k = 0; k < rcs.size(); ++k) {
    const UserConstraint &u = rcs[k];
    const double id = id_margin(F, rcs, k);
    const double eh = eh_margin(F, rcs, k);
    const double id_scale = std::abs(trace_product(u.phi_tilde, F)) + std::abs(u.c) + u.id_coeff * u.sigma_e * fn;
    const double eh_scale = std::abs(trace_product(u.phi_hat, F)) + std::abs(u.phi) + u.eh_coeff * u.beta_e * fn;
    m.min_id = std::min(m.min_id, id);
    m.min_eh = std::min(m.min_eh, eh);
    m.min_id_relative = std::min(m.min_id_relative, id_scale > 0.0 ? id / id_scale : id);
    m.min_eh_relative = std::min(m.min_eh_relative, eh_scale > 0.0 ? eh / eh_scale : eh);
  }
  return m;
}

inline bool robust_feasible(const CMatrix &F, const RobustConstraintSet &rcs, double rel_tol) {
  const MarginSummary m = margins(F, rcs);
  return m.min_id_relative >= -rel_tol && m.min_eh_relative >= -rel_tol;
}

/// Which blocks Algorithm 1 updates; the benchmarks freeze one of them.
struct BlockSelection {
  bool F = true;
  bool p = true;
  bool rho = true;
};

inline SolutionState initial_state(const ChannelSet &cs, const ScenarioConfig &cfg, Rng &rng) {
  const int K = cs.num_users();
  const int N = cs.num_elements();
  SolutionState st;
  st.f.resize(N);
  for (int n = 0; n < N; ++n) st.f(n) = std::polar(1.0, 2.0 * kPi * uniform01(rng));
  st.F = st.f * st.f.adjoint();
  st.p = RVector::Constant(K, cfg.max_power / K);
  st.rho = RVector::Constant(K, 0.5);
  st.penalty = cfg.penalty_init;
  return st;
}

namespace detail {

inline bool accept_rate(double candidate, double current) {
  return candidate >= current - 1e-12 * std::max(1.0, std::abs(current));
}

// F-block: P4 solves under a growing penalty until the iterate is rank one.
// Returns true when F was replaced.
inline bool update_F(SolutionState &st, const ChannelSet &cs, const RobustConstraintSet &rcs,
                     const ScenarioConfig &cfg, int &failures, bool monotone = true) {
  const double current = sum_rate(st.F, st.p, st.rho, cs, cfg);
  CMatrix F = st.F;
  double prev_res = rank_residual(F);
  bool have = false;
  for (int step = 0; step < cfg.max_penalty_steps; ++step) {
    const ConicSolution<PsdDomain> sol = solve_P4(F, st.p, st.rho, cs, cfg, st.penalty).solution;
    if (!sol.usable(cfg.solver.feas_tol)) {
      ++failures;
      break;
    }
    F = sol.value;
    have = true;
    const double res = rank_residual(F);
    const double tr = F.diagonal().real().sum();
    if (res <= cfg.rank_tol * tr) break;
    if (sol.status != SolveStatus::optimal) {
      ++failures;
      break;
    }
    if (res > 0.1 * prev_res) st.penalty = std::min(st.penalty * cfg.penalty_growth, cfg.penalty_max);
    if (st.penalty == 0.0) st.penalty = cfg.penalty_init > 0.0 ? cfg.penalty_init : 1e-2;
    prev_res = res;
  }
  if (!have) return false;
  const double tr = F.diagonal().real().sum();
  if (rank_residual(F) > cfg.rank_tol * tr) return false;
  if (!robust_feasible(F, rcs, 0.0)) return false;
  if (monotone && !accept_rate(sum_rate(F, st.p, st.rho, cs, cfg), current)) return false;
  st.F = F;
  return true;
}

inline bool update_p(SolutionState &st, const ChannelSet &cs, const ScenarioConfig &cfg, int &failures) {
  const double current = sum_rate(st.F, st.p, st.rho, cs, cfg);
  const ConicSolution<VectorDomain> sol = solve_P5(st.F, st.p, st.rho, cs, cfg).solution;
  if (!sol.usable(cfg.solver.feas_tol)) {
    ++failures;
    return false;
  }
  RVector p = sol.value.cwiseMax(0.0);
  const RobustConstraintSet rcs = build_constraints(cs.phi, p, st.rho, cfg);
  if (!robust_feasible(st.F, rcs, 0.0)) return false;
  if (!accept_rate(sum_rate(st.F, p, st.rho, cs, cfg), current)) return false;
  st.p = p;
  return true;
}

inline bool update_rho(SolutionState &st, const ChannelSet &cs, const ScenarioConfig &cfg, int &failures) {
  const double current = sum_rate(st.F, st.p, st.rho, cs, cfg);
  const ConicSolution<VectorDomain> sol = solve_P6(st.F, st.p, st.rho, cs, cfg).solution;
  if (!sol.usable(cfg.solver.feas_tol)) {
    ++failures;
    return false;
  }
  RVector rho = sol.value.cwiseMax(0.0).cwiseMin(1.0);
  const RobustConstraintSet rcs = build_constraints(cs.phi, st.p, rho, cfg);
  if (!robust_feasible(st.F, rcs, 0.0)) return false;
  if (!accept_rate(sum_rate(st.F, st.p, rho, cs, cfg), current)) return false;
  st.rho = rho;
  return true;
}

// Drives an infeasible start towards the robust feasible set one block at a
// time; a phase-I point is kept only when it raises the worst relative margin.
inline double worst_margin(const SolutionState &st, const ChannelSet &cs, const ScenarioConfig &cfg) {
  const MarginSummary m = margins(st.F, build_constraints(cs.phi, st.p, st.rho, cfg));
  return std::min(m.min_id_relative, m.min_eh_relative);
}

inline bool restore_feasibility(SolutionState &st, const ChannelSet &cs, const ScenarioConfig &cfg,
                                const BlockSelection &blocks) {
  double score = worst_margin(st, cs, cfg);
  auto consider = [&](SolutionState cand) {
    const double s = worst_margin(cand, cs, cfg);
    if (s > score) {
      score = s;
      st = std::move(cand);
    }
    return score >= 0.0;
  };
  for (int round = 0; round < 8 && score < 0.0; ++round) {
    const double start = score;
    if (blocks.F) {
      const RobustConstraintSet rcs = build_constraints(cs.phi, st.p, st.rho, cfg);
      const auto sol = find_feasible(build_P4(st.F, st.p, st.rho, cs, rcs, cfg, 0.0), st.F, cfg.solver);
      if (sol.status != SolveStatus::numerical_error) {
        SolutionState cand = st;
        cand.F = project_psd(sol.value);
        if (consider(std::move(cand))) break;
      }
    }
    if (blocks.p) {
      const auto sol = find_feasible(build_P5(st.F, st.p, st.rho, cs, cfg), st.p, cfg.solver);
      if (sol.status != SolveStatus::numerical_error) {
        SolutionState cand = st;
        cand.p = sol.value.cwiseMax(0.0);
        if (cand.p.sum() > cfg.max_power) cand.p *= cfg.max_power / cand.p.sum();
        if (consider(std::move(cand))) break;
      }
    }
    if (blocks.rho) {
      const auto sol = find_feasible(build_P6(st.F, st.p, st.rho, cs, cfg), st.rho, cfg.solver);
      if (sol.status != SolveStatus::numerical_error) {
        SolutionState cand = st;
        cand.rho = sol.value.cwiseMax(0.0).cwiseMin(1.0);
        if (consider(std::move(cand))) break;
      }
    }
    if (!(score > start)) break;
  }
  return score >= 0.0;
}

} // namespace detail

/// Alternating optimization over the selected blocks starting from `init`.
inline SolutionState alternating_optimization(const ChannelSet &cs, const ScenarioConfig &cfg, SolutionState st,
                                              const BlockSelection &blocks) {
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](SolutionState &s, AoStatus status, const std::string &msg) -> SolutionState {
    s.status = status;
    s.message = msg;
    s.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const RankOneExtraction ex = extract_rank_one(s.F, cfg.rank_tol);
    if (ex.ok) s.f = ex.f;
    return s;
  };
  auto record = [&](SolutionState &s) {
    const RobustConstraintSet rcs = build_constraints(cs.phi, s.p, s.rho, cfg);
    const MarginSummary m = margins(s.F, rcs);
    IterationRecord rec;
    rec.iteration = s.iteration;
    rec.objective = sum_rate(s.F, s.p, s.rho, cs, cfg);
    rec.rank_residual = rank_residual(s.F);
    rec.min_id_margin = m.min_id;
    rec.min_eh_margin = m.min_eh;
    rec.penalty = s.penalty;
    s.trace.push_back(rec);
    s.objective_trace.push_back(rec.objective);
  };

  if (!detail::restore_feasibility(st, cs, cfg, blocks))
    return finish(st, AoStatus::infeasible, "no robust feasible starting point found");
  // A restored F may be full rank; the trace starts from a rank-one point.
  if (rank_residual(st.F) > cfg.rank_tol * st.F.diagonal().real().sum()) {
    const RobustConstraintSet rcs = build_constraints(cs.phi, st.p, st.rho, cfg);
    if (!detail::update_F(st, cs, rcs, cfg, st.subproblem_failures, false))
      return finish(st, AoStatus::infeasible, "no rank-one robust feasible starting point found");
  }
  record(st);
  for (int r = 1; r <= cfg.max_ao_iterations; ++r) {
    st.iteration = r;
    const double prev = st.objective_trace.back();
    const double prev_res = rank_residual(st.F);
    if (blocks.F) {
      const RobustConstraintSet rcs = build_constraints(cs.phi, st.p, st.rho, cfg);
      detail::update_F(st, cs, rcs, cfg, st.subproblem_failures);
    }
    if (blocks.p) detail::update_p(st, cs, cfg, st.subproblem_failures);
    if (blocks.rho) detail::update_rho(st, cs, cfg, st.subproblem_failures);
    record(st);
    const double obj = st.objective_trace.back();
    const double res = rank_residual(st.F);
    const double tr = st.F.diagonal().real().sum();
    const bool rank_one = res <= cfg.rank_tol * tr;
    const double change = std::abs(obj - prev) / std::max(std::abs(prev), 1e-12);
    if (rank_one && change <= cfg.convergence_threshold && prev_res <= cfg.rank_tol * tr)
      return finish(st, AoStatus::converged, "");
  }
  return finish(st, AoStatus::max_iterations, "iteration limit reached");
}

/// Algorithm 1: joint optimization of (F, p, rho).
inline SolutionState algorithm1(const ChannelSet &cs, const ScenarioConfig &cfg, std::uint64_t rep = 0) {
  Rng rng = make_rng(cfg.rng_seed, rep, 3);
  return alternating_optimization(cs, cfg, initial_state(cs, cfg, rng), BlockSelection{});
}

enum class Algorithm { proposed, random_phase, equal_power, fixed_rho };

inline const char *to_string(Algorithm a) {
  switch (a) {
  case Algorithm::proposed: return "proposed";
  case Algorithm::random_phase: return "random_phase";
  case Algorithm::equal_power: return "equal_power";
  case Algorithm::fixed_rho: return "fixed_rho";
  }
  return "unknown";
}

inline Algorithm algorithm_from_string(const std::string &s) {
  if (s == "proposed") return Algorithm::proposed;
  if (s == "random_phase") return Algorithm::random_phase;
  if (s == "equal_power") return Algorithm::equal_power;
  if (s == "fixed_rho") return Algorithm::fixed_rho;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

/// Proposed algorithm or one of the three benchmarks; all share the same
/// initial point for a given repetition.
inline SolutionState run_algorithm(Algorithm a, const ChannelSet &cs, const ScenarioConfig &cfg,
                                   std::uint64_t rep = 0) {
  Rng rng = make_rng(cfg.rng_seed, rep, 3);
  SolutionState init = initial_state(cs, cfg, rng);
  BlockSelection b;
  switch (a) {
  case Algorithm::proposed: break;
  case Algorithm::random_phase: b.F = false; break;
  case Algorithm::equal_power: b.p = false; break;
  case Algorithm::fixed_rho: b.rho = false; break;
  }
  return alternating_optimization(cs, cfg, init, b);
}

inline SolutionState run_benchmark_variant(const std::string &name, const ChannelSet &cs, const ScenarioConfig &cfg,
                                           std::uint64_t rep = 0) {
  const Algorithm a = algorithm_from_string(name);
  if (a == Algorithm::proposed) throw std::invalid_argument("run_benchmark_variant: not a benchmark");
  return run_algorithm(a, cs, cfg, rep);
}

inline void write_trace_csv(const SolutionState &st, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace '" + path + "'");
  out.precision(12);
  out << "iteration,objective,rank_residual,min_id_margin,min_eh_margin,penalty\n";
  for (const IterationRecord &r : st.trace)
    out << r.iteration << ',' << r.objective << ',' << r.rank_residual << ',' << r.min_id_margin << ','
        << r.min_eh_margin << ',' << r.penalty << '\n';
}

} // namespace rms_swipt

#endif // RMS_SWIPT_AO_HPP
