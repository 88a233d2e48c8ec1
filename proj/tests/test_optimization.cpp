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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rms_swipt/acceptance.hpp"
#include "rms_swipt/ao.hpp"
#include "rms_swipt/experiment.hpp"
#include "rms_swipt/oracles.hpp"
#include "rms_swipt/solver.hpp"
#include "rms_swipt/validate.hpp"

namespace rs = rms_swipt;
using rs::CMatrix;
using rs::CVector;
using rs::RVector;

namespace {

rs::ScenarioConfig small_config(int side, int users) {
  rs::ScenarioConfig c;
  c.elements_x = side;
  c.elements_z = side;
  c.num_users = users;
  return c;
}

// No SINR or harvesting requirement and perfect covariances.
rs::ScenarioConfig unconstrained(int side, int users) {
  rs::ScenarioConfig c = small_config(side, users);
  c.sinr_threshold = 0.0;
  c.energy_threshold = 0.0;
  c.error_variance = 0.0;
  return c;
}

CMatrix aligned_beam(const CVector &h) {
  CVector f(h.size());
  for (int n = 0; n < h.size(); ++n) f(n) = std::polar(1.0, std::arg(h(n)));
  return f * f.adjoint();
}

double direct_sum_rate(const CMatrix &F, const RVector &p, const RVector &rho, const rs::ChannelSet &cs,
                       const rs::ScenarioConfig &cfg) {
  double r = 0.0;
  for (int k = 0; k < cs.num_users(); ++k) {
    const double t = (cs.h[k].adjoint() * F * cs.h[k])(0, 0).real();
    double interference = 0.0;
    for (int i = 0; i < cs.num_users(); ++i)
      if (i != k) interference += p(i) * t;
    const rs::UserParams &u = cfg.user(k);
    const double sinr = rho(k) * p(k) * t / (rho(k) * (interference + u.antenna_noise) + u.id_noise_value());
    r += std::log(1.0 + sinr) / std::log(2.0);
  }
  return r;
}

} // namespace

// ---- solver ------------------------------------------------------------------

TEST(Solver, SeparableDiagonalOptimum) {
  rs::ConicProblem<rs::PsdDomain> pr;
  pr.domain.order = 4;
  pr.linear.add_identity(1.0);
  for (int n = 0; n < 4; ++n) {
    CVector e = CVector::Zero(4);
    e(n) = 1.0;
    pr.constraints.push_back({rs::HermitianCoeff{}.add_outer(1.0, e), 1.0});
  }
  const auto sol = rs::solve(pr, CMatrix(0.5 * CMatrix::Identity(4, 4)));
  ASSERT_EQ(sol.status, rs::SolveStatus::optimal) << sol.message;
  EXPECT_NEAR(sol.objective, 4.0, 1e-6);
  EXPECT_LE((sol.value - CMatrix::Identity(4, 4)).norm(), 1e-5);
}

TEST(Solver, MonotoneLogHitsBox) {
  rs::ConicProblem<rs::VectorDomain> pr;
  pr.domain.size = 1;
  pr.logs.push_back({RVector::Ones(1), 1.0, 1.0});
  pr.constraints.push_back({-RVector::Ones(1), 0.0});
  pr.constraints.push_back({RVector::Ones(1), 1.0});
  const auto sol = rs::solve(pr, RVector::Constant(1, 5.0));
  ASSERT_TRUE(sol.usable(1e-7)) << sol.message;
  EXPECT_NEAR(sol.value(0), 1.0, 1e-6);
  EXPECT_NEAR(sol.objective, std::log(2.0), 1e-6);
}

TEST(Solver, ReportsInfeasibleSet) {
  rs::ConicProblem<rs::VectorDomain> pr;
  pr.domain.size = 1;
  pr.linear = RVector::Ones(1);
  pr.constraints.push_back({RVector::Ones(1), -1.0});
  pr.constraints.push_back({-RVector::Ones(1), -1.0});
  const auto sol = rs::solve(pr, RVector::Zero(1));
  EXPECT_FALSE(sol.usable(1e-7));
  EXPECT_EQ(sol.status, rs::SolveStatus::infeasible);
}

TEST(Solver, SecondOrderConeConstraint) {
  // maximize x1 + x2 subject to sqrt(2) >= ||x||: optimum x = (1, 1).
  rs::ConicProblem<rs::VectorDomain> pr;
  pr.domain.size = 2;
  pr.linear = RVector::Ones(2);
  pr.cones.push_back({RVector::Zero(2), std::sqrt(2.0), 1.0, {}, {}});
  const auto sol = rs::solve(pr, RVector::Zero(2));
  ASSERT_TRUE(sol.usable(1e-7)) << sol.message;
  EXPECT_NEAR(sol.value(0), 1.0, 1e-5);
  EXPECT_NEAR(sol.value(1), 1.0, 1e-5);
}

TEST(Solver, PsdSubproblemMatchesFirstOrderOracle) {
  const rs::OracleTally t = rs::oracle_p4(5, 17);
  EXPECT_EQ(t.compared, 5);
  EXPECT_EQ(t.matched, t.compared);
  EXPECT_LE(t.worst_gap, 1e-4);
}

TEST(Solver, RankOneWarmStartsSolve) {
  rs::ScenarioConfig c = rs::detail::toy_config(2, 2);
  c.sinr_threshold = 0.0;
  c.energy_threshold = 0.0;
  c.error_variance = 0.0;
  for (int i = 0; i < 60; ++i) {
    rs::Rng rng = rs::make_rng(c.rng_seed, static_cast<std::uint64_t>(i), 21);
    const rs::ChannelSet cs = rs::draw_scenario(c, static_cast<std::uint64_t>(1000 + i));
    const CMatrix F_r = rs::detail::random_psd(c.num_elements(), 1, rng);
    const RVector p = rs::detail::random_powers(2, c.max_power, rng);
    const RVector rho = rs::detail::random_splits(2, 0.2, 0.9, rng);
    const auto sp = rs::solve_P4(F_r, p, rho, cs, c, i % 2 == 0 ? 0.0 : 0.5 * rs::uniform01(rng));
    EXPECT_TRUE(sp.solution.usable(c.solver.feas_tol)) << i << ": " << sp.solution.message;
    EXPECT_GE(sp.solution.objective, sp.surrogate_at_start - 1e-9) << i;
  }
}

TEST(Solver, ProjectPsd) {
  rs::Rng rng = rs::make_rng(3);
  const CMatrix psd = rs::detail::random_psd(5, 3, rng);
  EXPECT_LE((rs::project_psd(psd) - psd).cwiseAbs().maxCoeff(), 1e-12);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  const CMatrix pd = rs::project_psd(d);
  EXPECT_NEAR(pd(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(pd(1, 1)), 0.0, 1e-15);
  const CMatrix x = rs::detail::random_hermitian(8, rng);
  const CMatrix once = rs::project_psd(x);
  EXPECT_LE((rs::project_psd(once) - once).norm(), 1e-10);
}

// ---- rates and kernels -----------------------------------------------------------

TEST(Rate, ZeroPowerZeroRate) {
  const rs::ScenarioConfig c = small_config(2, 3);
  const rs::ChannelSet cs = rs::draw_scenario(c);
  EXPECT_EQ(rs::sum_rate(CMatrix::Identity(4, 4), RVector::Zero(3), RVector::Constant(3, 0.5), cs, c), 0.0);
}

TEST(Rate, SingleUserReduction) {
  rs::ScenarioConfig c = small_config(2, 1);
  c.default_user.antenna_noise = 0.0;
  c.default_user.id_noise = 1e-9;
  const rs::ChannelSet cs = rs::draw_scenario(c);
  const CMatrix F = aligned_beam(cs.h[0]);
  const RVector p = RVector::Constant(1, 0.8), rho = RVector::Ones(1);
  const double t = rs::trace_product(cs.phi[0], F);
  EXPECT_NEAR(rs::sum_rate(F, p, rho, cs, c), std::log2(1.0 + 0.8 * t / 1e-9), 1e-12);
}

TEST(Rate, MatchesDirectTranscription) {
  const rs::ScenarioConfig c = small_config(3, 4);
  const rs::ChannelSet cs = rs::draw_scenario(c, 2);
  rs::Rng rng = rs::make_rng(5);
  for (int i = 0; i < 10; ++i) {
    const CMatrix F = rs::detail::random_psd(9, 1 + i % 3, rng);
    const RVector p = rs::detail::random_powers(4, 1.0, rng);
    const RVector rho = rs::detail::random_splits(4, 0.05, 1.0, rng);
    const double want = direct_sum_rate(F, p, rho, cs, c);
    EXPECT_NEAR(rs::sum_rate(F, p, rho, cs, c), want, 1e-12 * std::max(1.0, want));
  }
}

TEST(Kernel, GradientVanishesWithoutInterference) {
  const rs::ScenarioConfig c = small_config(2, 1);
  const rs::ChannelSet cs = rs::draw_scenario(c);
  const CMatrix g = rs::grad_gbar(CMatrix::Identity(4, 4), RVector::Ones(1), RVector::Constant(1, 0.5), cs.phi[0], 0, c);
  EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Kernel, ScalarGradient) {
  const rs::ScenarioConfig c = small_config(1, 2);
  const rs::ChannelSet cs = rs::draw_scenario(c);
  RVector p(2), rho(2);
  p << 0.3, 0.6;
  rho << 0.4, 0.7;
  const double x = 0.8, phi = cs.phi[0](0, 0).real();
  const double a = rho(0) * p(1) * phi, b = rho(0) * c.default_user.antenna_noise + c.default_user.id_noise_value();
  const CMatrix F = CMatrix::Constant(1, 1, x);
  // d/dx log2(a x + b) = a / ((a x + b) ln 2)
  EXPECT_NEAR(rs::grad_gbar(F, p, rho, cs.phi[0], 0, c)(0, 0).real() * phi / phi, a / ((a * x + b) * rs::kLn2),
              1e-12 * a / ((a * x + b) * rs::kLn2));
}

TEST(Kernel, GradientFiniteDifferences) {
  const rs::ScenarioConfig c = small_config(2, 2);
  rs::Rng rng = rs::make_rng(6);
  for (int i = 0; i < 10; ++i) {
    const rs::ChannelSet cs = rs::draw_scenario(c, i);
    const CMatrix F = rs::detail::random_psd(4, 2, rng);
    const CMatrix D = rs::detail::random_hermitian(4, rng);
    const RVector p = rs::detail::random_powers(2, 1.0, rng), rho = rs::detail::random_splits(2, 0.1, 0.9, rng);
    const rs::FdReport r = rs::check_grad_gbar(F, D, p, rho, cs, i % 2, c);
    EXPECT_LE(r.best_relative_error, 1e-5);
  }
}

TEST(Kernel, SpectralMinorant) {
  rs::Rng rng = rs::make_rng(7);
  const CMatrix Fr = rs::detail::random_psd(6, 2, rng);
  EXPECT_NEAR(rs::spectral_lb(Fr, Fr).value, rs::spectral_norm(Fr), 1e-12);

  const rs::SpectralBound deg = rs::spectral_lb(Fr, CMatrix::Identity(6, 6));
  EXPECT_TRUE(deg.degenerate);
  EXPECT_LE(deg.value, rs::spectral_norm(Fr) + 1e-10);

  for (int i = 0; i < 1000; ++i) {
    const CMatrix F = rs::detail::random_psd(6, 1 + i % 6, rng);
    const CMatrix R = rs::detail::random_psd(6, 1 + i % 5, rng);
    ASSERT_LE(rs::spectral_lb(F, R).value, rs::spectral_norm(F) + 1e-10);
  }
}

TEST(Kernel, RankOneExtraction) {
  rs::Rng rng = rs::make_rng(8);
  const CVector f0 = rs::detail::random_unit_modulus(5, rng);
  const rs::RankOneExtraction ex = rs::extract_rank_one(f0 * f0.adjoint(), 1e-6);
  ASSERT_TRUE(ex.ok);
  const rs::cplx phase = f0.dot(ex.f) / std::abs(f0.dot(ex.f));
  EXPECT_LE((ex.f - phase * f0).norm(), 1e-10);
  EXPECT_LE(ex.f.cwiseAbs().maxCoeff(), 1.0 + 1e-12);

  const rs::RankOneExtraction refused = rs::extract_rank_one(CMatrix::Identity(2, 2), 1e-6);
  EXPECT_FALSE(refused.ok);
  EXPECT_NEAR(refused.residual, 1.0, 1e-12);

  const CVector u = rs::detail::random_unit_modulus(5, rng);
  CVector v = rs::detail::random_unit_modulus(5, rng);
  v -= u * (u.dot(v) / u.squaredNorm());
  v /= v.norm();
  const CMatrix near = u * u.adjoint() + 1e-9 * v * v.adjoint();
  const rs::RankOneExtraction ne = rs::extract_rank_one(near, 1e-6);
  ASSERT_TRUE(ne.ok);
  EXPECT_LE(ne.reconstruction_error, 1e-4);
}

// ---- subproblems -------------------------------------------------------------

TEST(Subproblem, SingleUserBeamSaturatesDiagonal) {
  const rs::ScenarioConfig c = unconstrained(2, 1);
  const rs::ChannelSet cs = rs::draw_scenario(c);
  const RVector p = RVector::Ones(1), rho = RVector::Constant(1, 0.5);
  const auto sp = rs::solve_P4(CMatrix(0.5 * CMatrix::Identity(4, 4)), p, rho, cs, c, 0.0);
  ASSERT_TRUE(sp.solution.usable(c.solver.feas_tol)) << sp.solution.message;
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(sp.solution.value(n, n).real(), 1.0, 1e-5);
  const double best = rs::trace_product(cs.phi[0], aligned_beam(cs.h[0]));
  EXPECT_NEAR(rs::trace_product(cs.phi[0], sp.solution.value), best, 1e-5 * best);

  // Restarting at the optimum stays there.
  const CMatrix Fr = aligned_beam(cs.h[0]);
  const auto again = rs::solve_P4(Fr, p, rho, cs, c, 0.0);
  ASSERT_TRUE(again.solution.usable(c.solver.feas_tol));
  EXPECT_LE((again.solution.value - Fr).norm(), 1e-4 * Fr.norm());
}

TEST(Subproblem, PsdStepIsAnAscentStep) {
  const rs::ScenarioConfig c = small_config(2, 2);
  rs::Rng rng = rs::make_rng(9);
  for (int i = 0; i < 5; ++i) {
    const rs::ChannelSet cs = rs::draw_scenario(c, i);
    const CMatrix Fr = rs::detail::random_psd(4, 1, rng);
    const RVector p = rs::detail::random_powers(2, 1.0, rng), rho = rs::detail::random_splits(2, 0.3, 0.7, rng);
    const auto sp = rs::solve_P4(Fr, p, rho, cs, unconstrained(2, 2), 0.1);
    ASSERT_TRUE(sp.solution.usable(c.solver.feas_tol));
    EXPECT_GE(sp.solution.objective, sp.surrogate_at_start - 1e-8);
    EXPECT_GE(rs::detail::penalized_rate(sp.solution.value, p, rho, cs, c, 0.1),
              rs::detail::penalized_rate(Fr, p, rho, cs, c, 0.1) - 1e-8);
  }
}

TEST(Subproblem, SingleUserTakesFullPower) {
  const rs::ScenarioConfig c = unconstrained(2, 1);
  const rs::ChannelSet cs = rs::draw_scenario(c);
  const auto sp = rs::solve_P5(aligned_beam(cs.h[0]), RVector::Constant(1, 0.3), RVector::Constant(1, 0.5), cs, c);
  ASSERT_TRUE(sp.solution.usable(c.solver.feas_tol));
  EXPECT_NEAR(sp.solution.value(0), c.max_power, 1e-6);
}

TEST(Subproblem, ZeroBudgetCannotMeetSinr) {
  rs::ScenarioConfig c = small_config(2, 2);
  c.max_power = 0.0;
  const rs::ChannelSet cs = rs::draw_scenario(rs::ScenarioConfig(small_config(2, 2)));
  const auto sp = rs::solve_P5(aligned_beam(cs.h[0]), RVector::Constant(2, 0.0), RVector::Constant(2, 0.5), cs, c);
  EXPECT_FALSE(sp.solution.usable(c.solver.feas_tol));
}

TEST(Subproblem, PowerMatchesGridSearch) {
  const rs::OracleTally t = rs::oracle_p5(10, 21);
  EXPECT_EQ(t.compared, 10);
  EXPECT_EQ(t.matched, t.compared);
}

TEST(Subproblem, SplittingWithoutHarvestingGoesToOne) {
  const rs::ScenarioConfig c = unconstrained(2, 1);
  const rs::ChannelSet cs = rs::draw_scenario(c);
  const auto sp = rs::solve_P6(aligned_beam(cs.h[0]), RVector::Constant(1, 1.0), RVector::Constant(1, 0.5), cs, c);
  ASSERT_TRUE(sp.solution.usable(c.solver.feas_tol));
  EXPECT_GE(sp.solution.value(0), 1.0 - 1e-5);

  // With interference each step is an ascent step towards one.
  const rs::ScenarioConfig c2 = unconstrained(2, 2);
  const rs::ChannelSet cs2 = rs::draw_scenario(c2);
  const CMatrix F = aligned_beam(cs2.h[0]);
  const RVector p = RVector::Constant(2, 0.5);
  RVector rho = RVector::Constant(2, 0.5);
  for (int i = 0; i < 3; ++i) {
    const auto step = rs::solve_P6(F, p, rho, cs2, c2);
    ASSERT_TRUE(step.solution.usable(c2.solver.feas_tol));
    EXPECT_GT(step.solution.value.minCoeff(), rho.minCoeff());
    EXPECT_GE(rs::sum_rate(F, p, step.solution.value, cs2, c2), rs::sum_rate(F, p, rho, cs2, c2));
    rho = step.solution.value;
  }
}

TEST(Subproblem, BindingHarvestPinsSplit) {
  rs::ScenarioConfig c = unconstrained(2, 1);
  const rs::ChannelSet cs = rs::draw_scenario(c);
  const CMatrix F = aligned_beam(cs.h[0]);
  const RVector p = RVector::Constant(1, 1.0);
  const double received = p(0) * rs::trace_product(cs.phi[0], F) + c.default_user.antenna_noise;
  c.energy_threshold = rs::harvest(0.4 * received, c.default_user.eh);
  const auto sp = rs::solve_P6(F, p, RVector::Constant(1, 0.3), cs, c);
  ASSERT_TRUE(sp.solution.usable(c.solver.feas_tol));
  EXPECT_NEAR(sp.solution.value(0), 0.6, 1e-6);
}

TEST(Subproblem, SplittingMatchesGoldenSection) {
  const rs::OracleTally t = rs::oracle_p6(10, 23);
  EXPECT_EQ(t.compared, 10);
  EXPECT_EQ(t.matched, t.compared);
  EXPECT_LE(t.worst_gap, 1e-6);
}

// ---- alternating optimization ----------------------------------------------------

TEST(Algorithm, DefaultRunConvergesMonotonically) {
  const rs::ScenarioConfig c;
  const rs::ChannelSet cs = rs::draw_scenario(c, 0);
  const rs::SolutionState st = rs::algorithm1(cs, c, 0);
  ASSERT_EQ(st.status, rs::AoStatus::converged) << st.message;
  for (std::size_t i = 1; i < st.objective_trace.size(); ++i)
    EXPECT_GE(st.objective_trace[i], st.objective_trace[i - 1] - 1e-6);
  const rs::MarginSummary m = rs::margins(st.F, rs::build_constraints(cs.phi, st.p, st.rho, c));
  EXPECT_GE(m.min_id_relative, -1e-6);
  EXPECT_GE(m.min_eh_relative, -1e-6);
  EXPECT_LE(st.p.sum(), c.max_power * (1 + 1e-9));
  EXPECT_LE(st.F.diagonal().real().maxCoeff(), 1.0 + 1e-9);
  EXPECT_NEAR(st.objective(), rs::sum_rate(st.F, st.p, st.rho, cs, c), 1e-9);
}

TEST(Algorithm, SingleUserClosedForm) {
  const rs::ScenarioConfig c = unconstrained(2, 1);
  const rs::ChannelSet cs = rs::draw_scenario(c, 1);
  const rs::SolutionState st = rs::algorithm1(cs, c, 1);
  ASSERT_NE(st.status, rs::AoStatus::infeasible) << st.message;
  const double t = rs::trace_product(cs.phi[0], aligned_beam(cs.h[0]));
  const rs::UserParams &u = c.default_user;
  const double best = std::log2(1.0 + c.max_power * t / (u.antenna_noise + u.id_noise_value()));
  EXPECT_NEAR(st.objective(), best, 1e-3 * best);
  EXPECT_NEAR(st.p(0), c.max_power, 1e-3);
}

TEST(Algorithm, UnreachableHarvestIsInfeasible) {
  rs::ScenarioConfig c = small_config(2, 2);
  c.energy_threshold = 0.02;
  const rs::ChannelSet cs = rs::draw_scenario(c);
  const rs::SolutionState st = rs::run_benchmark_variant("fixed_rho", cs, c);
  EXPECT_EQ(st.status, rs::AoStatus::infeasible);
  EXPECT_FALSE(st.message.empty());
  EXPECT_THROW(rs::run_benchmark_variant("proposed", cs, c), std::invalid_argument);
  EXPECT_THROW(rs::run_benchmark_variant("nope", cs, c), std::invalid_argument);
}

TEST(Algorithm, EqualPowerWithOneUserUsesFullBudget) {
  const rs::ScenarioConfig c = small_config(4, 1);
  const rs::ChannelSet cs = rs::draw_scenario(c, 2);
  const rs::SolutionState eq = rs::run_benchmark_variant("equal_power", cs, c, 2);
  const rs::SolutionState pr = rs::algorithm1(cs, c, 2);
  ASSERT_NE(eq.status, rs::AoStatus::infeasible);
  ASSERT_NE(pr.status, rs::AoStatus::infeasible);
  EXPECT_EQ(eq.p(0), c.max_power);
  EXPECT_NEAR(eq.objective(), pr.objective(), 1e-3 * pr.objective());
}

TEST(Algorithm, NamesRoundTrip) {
  for (rs::Algorithm a : {rs::Algorithm::proposed, rs::Algorithm::random_phase, rs::Algorithm::equal_power,
                          rs::Algorithm::fixed_rho})
    EXPECT_EQ(rs::algorithm_from_string(rs::to_string(a)), a);
}

// ---- validation harness ------------------------------------------------------------

TEST(Validate, NoErrorGivesDeterministicOutage) {
  rs::ScenarioConfig c = small_config(2, 2);
  c.error_variance = 0.0;
  const rs::ChannelSet cs = rs::draw_scenario(c);
  const CMatrix F = aligned_beam(cs.h[0]);
  RVector p(2), rho(2);
  p << 0.7, 0.3;
  rho << 0.5, 0.5;
  rs::Rng rng = rs::make_rng(1);
  const rs::OutagePair o = rs::mc_outage(F, p, rho, cs, c, 0, 10000, rng);
  const rs::RobustConstraintSet rcs = rs::build_constraints(cs.phi, p, rho, c);
  EXPECT_EQ(o.id.estimate, rs::id_margin(F, rcs, 0) > 0 ? 0.0 : 1.0);
  EXPECT_EQ(o.eh.estimate, rs::eh_margin(F, rcs, 0) > 0 ? 0.0 : 1.0);
  EXPECT_THROW(rs::mc_outage(F, p, rho, cs, c, 0, 10, rng), std::invalid_argument);
}

namespace {

struct OutageFixture {
  rs::ScenarioConfig cfg = small_config(2, 2);
  rs::ChannelSet cs;
  RVector p{2}, rho{2};
  CMatrix F;
  OutageFixture() {
    cfg.error_variance = 1e-14;
    cs = rs::draw_scenario(cfg, 1);
    p << 0.6, 0.4;
    rho << 0.5, 0.5;
    F = aligned_beam(cs.h[0]);
  }
};

} // namespace

TEST(Validate, BoundaryInstanceMatchesTarget) {
  OutageFixture fx;
  const rs::RobustConstraintSet rcs = rs::build_constraints(fx.cs.phi, fx.p, fx.rho, fx.cfg);
  const rs::UserConstraint &u = rcs[0];
  const double a = rs::trace_product(u.phi_tilde, fx.F) - u.id_coeff * u.sigma_e * rs::frobenius_norm(fx.F);
  ASSERT_GT(a, 0.0);
  const CMatrix Fb = (u.c / a) * fx.F;
  rs::Rng rng = rs::make_rng(2);
  const rs::McReport r = rs::mc_id_outage(Fb, fx.p, fx.rho, fx.cs, fx.cfg, 0, 1000000, rng);
  EXPECT_NEAR(r.analytic_value, 0.1, 1e-9);
  EXPECT_LE(std::abs(r.z_score), 4.0);
}

TEST(Validate, RandomInstanceWithinThreeStandardErrors) {
  OutageFixture fx;
  // Beam scaled to the harvesting boundary; the signal gain stays far above
  // the error spread, so sign flips of the gains do not occur.
  const rs::RobustConstraintSet rcs = rs::build_constraints(fx.cs.phi, fx.p, fx.rho, fx.cfg);
  const rs::UserConstraint &u = rcs[0];
  const CMatrix F = (u.phi / rs::trace_product(u.phi_hat, fx.F)) * 1.0005 * fx.F;
  rs::Rng rng = rs::make_rng(3);
  const rs::OutagePair o = rs::mc_outage(F, fx.p, fx.rho, fx.cs, fx.cfg, 0, 1000000, rng);
  EXPECT_GT(o.eh.analytic_value, 1e-3);
  EXPECT_LE(std::abs(o.id.z_score), 3.0);
  EXPECT_LE(std::abs(o.eh.z_score), 3.0);
  EXPECT_NEAR(o.eh.estimate, o.eh.analytic_value, 3 * o.eh.standard_error() + 1e-12);
}

TEST(Validate, TraceVariance) {
  rs::Rng rng = rs::make_rng(4);
  const rs::VarianceReport zero = rs::check_prop2(CMatrix::Zero(3, 3), 0.5, 1000, rng);
  EXPECT_EQ(zero.variance, 0.0);
  const rs::VarianceReport one = rs::check_prop2(CMatrix::Identity(1, 1), 0.25, 100000, rng);
  EXPECT_NEAR(one.variance / 0.25, 1.0, 0.02);
  const rs::VarianceReport big = rs::check_prop2(rs::detail::random_hermitian(8, rng), 0.01, 100000, rng);
  EXPECT_GE(big.ratio, 0.9);
  EXPECT_LE(big.ratio, 1.1);
}

TEST(Validate, ExpectedRateApproximation) {
  rs::ScenarioConfig c = small_config(2, 2);
  c.error_variance = 0.0;
  rs::ChannelSet cs = rs::draw_scenario(c);
  const CMatrix F = aligned_beam(cs.h[0]);
  RVector p(2), rho(2);
  p << 0.5, 0.5;
  rho << 0.6, 0.6;
  rs::Rng rng = rs::make_rng(5);
  EXPECT_LE(rs::check_prop1(cs, p, rho, F, c, 1000, rng), 1e-13);
  const double sigma = 1e-4 * std::max(rs::spectral_norm(cs.phi[0]), rs::spectral_norm(cs.phi[1]));
  cs.error_variance = sigma * sigma;
  EXPECT_LE(rs::check_prop1(cs, p, rho, F, c, 20000, rng), 0.01);
}

TEST(Validate, FiniteDifferences) {
  const rs::FdReport affine = rs::fd_gradient_check([](double t) { return 3.0 - 2.5 * t; }, -2.5);
  for (double e : affine.relative_errors) EXPECT_LE(e, 1e-9);

  const rs::ScenarioConfig c = small_config(2, 3);
  const rs::ChannelSet cs = rs::draw_scenario(c, 4);
  rs::Rng rng = rs::make_rng(6);
  const CMatrix F = rs::detail::random_psd(4, 1, rng);
  const RVector p = rs::detail::random_powers(3, 1.0, rng), rho = rs::detail::random_splits(3, 0.2, 0.8, rng);
  const auto p6 = rs::build_P6(F, p, rho, cs, c);
  const RVector g = rs::detail::vector_surrogate_gradient(p6, rho);
  for (int k = 0; k < 3; ++k) {
    RVector e = RVector::Zero(3);
    e(k) = 1.0;
    const rs::FdReport r =
        rs::fd_gradient_check([&](double t) { return rs::sum_rate(F, p, rho + t * e, cs, c); }, g(k), {1e-3, 1e-4, 1e-5});
    EXPECT_LE(r.best_relative_error, 1e-7);
  }
}

// ---- experiments ------------------------------------------------------------------

TEST(Experiment, SpecValidation) {
  rs::ExperimentSpec s;
  s.values = {1.0, 0.5};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.values = {0.5, 1.0};
  s.repetitions = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.repetitions = 1;
  EXPECT_NO_THROW(s.validate());
  EXPECT_THROW(rs::apply_axis(s.base, rs::SweepAxis::num_elements, 10), std::invalid_argument);
  EXPECT_EQ(rs::apply_axis(s.base, rs::SweepAxis::num_elements, 36).elements_z, 6);
  EXPECT_DOUBLE_EQ(rs::apply_axis(s.base, rs::SweepAxis::error_stddev, 1e-7).error_variance, 1e-14);
  const rs::ScenarioConfig n = rs::apply_axis(s.base, rs::SweepAxis::noise_power, 1e-9);
  EXPECT_EQ(n.default_user.antenna_noise, 1e-9);
  EXPECT_EQ(n.default_user.id_noise_value(), 1e-9);
  EXPECT_EQ(rs::sweep_axis_from_string("error_stddev"), rs::SweepAxis::error_stddev);
}

namespace {

std::string without_runtime(const std::string &csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cols.push_back(cell);
    if (cols.size() > 9) cols.erase(cols.begin() + 9);
    for (const auto &c : cols) out += c + ',';
    out += '\n';
  }
  return out;
}

} // namespace

TEST(Experiment, RerunIsIdentical) {
  rs::ExperimentSpec s;
  s.values = {1.0};
  s.repetitions = 1;
  std::ostringstream a, b;
  rs::write_results_csv(rs::run_experiment(s), a);
  s.threads = 2;
  rs::write_results_csv(rs::run_experiment(s), b);
  EXPECT_EQ(without_runtime(a.str()), without_runtime(b.str()));
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "axis,value,algorithm,repetition,seed,config_hash,status,sum_rate,iterations,runtime_s,"
            "min_id_margin,min_eh_margin,rank_residual,error_spectral_norm,reason");
}

TEST(Experiment, ProposedBeatsEqualPower) {
  rs::ExperimentSpec s;
  s.values = {0.5, 1.0};
  s.repetitions = 3;
  s.algorithms = {rs::Algorithm::proposed, rs::Algorithm::equal_power};
  const rs::ExperimentResult r = rs::run_experiment(s);
  for (std::size_t v = 0; v < 2; ++v)
    EXPECT_GE(r.mean_effective_rate(v, rs::Algorithm::proposed), r.mean_effective_rate(v, rs::Algorithm::equal_power));
  std::ostringstream plot;
  rs::write_plot_data(r, plot);
  EXPECT_NE(plot.str().find("# max_power proposed"), std::string::npos);
}

TEST(Experiment, RandomPhaseNeverBeatsProposedOnAverage) {
  rs::ExperimentSpec s;
  s.values = {1.0};
  s.repetitions = 20;
  s.algorithms = {rs::Algorithm::proposed, rs::Algorithm::random_phase};
  const rs::ExperimentResult r = rs::run_experiment(s);
  EXPECT_GE(r.mean_effective_rate(0, rs::Algorithm::proposed), r.mean_effective_rate(0, rs::Algorithm::random_phase));
}

TEST(Experiment, RateGrowsWithSurfaceSize) {
  rs::ExperimentSpec s;
  s.axis = rs::SweepAxis::num_elements;
  s.values = {4, 9, 16};
  s.repetitions = 4;
  s.algorithms = {rs::Algorithm::proposed};
  const rs::ExperimentResult r = rs::run_experiment(s);
  for (std::size_t v = 0; v + 1 < s.values.size(); ++v)
    EXPECT_GE(r.mean_effective_rate(v + 1, rs::Algorithm::proposed), r.mean_effective_rate(v, rs::Algorithm::proposed));
}
