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

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rms_swipt/channel.hpp"
#include "rms_swipt/energy.hpp"
#include "rms_swipt/linalg.hpp"
#include "rms_swipt/robust.hpp"
#include "rms_swipt/scenario.hpp"

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

CVector random_vector(int n, rs::Rng &rng) {
  rs::NormalDist nd;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = rs::complex_normal(rng, nd);
  return v;
}

} // namespace

// ---- scenario ----------------------------------------------------------------

TEST(Scenario, UserBelowTransceiverLooksStraightDown) {
  const rs::UserGeometry g = rs::make_geometry({0, 0, 15}, {0, 0, 0});
  EXPECT_DOUBLE_EQ(g.distance, 15.0);
  EXPECT_DOUBLE_EQ(g.aod_vertical, 0.0);
}

TEST(Scenario, ZeroRadiusPutsEveryUserAtTheCenter) {
  rs::ScenarioConfig c;
  c.user_disk_radius = 0.0;
  rs::Rng rng = rs::make_rng(3);
  const auto users = rs::sample_user_positions(c, rng);
  ASSERT_EQ(users.size(), 4u);
  for (const auto &u : users) {
    EXPECT_DOUBLE_EQ(u.distance, users[0].distance);
    EXPECT_DOUBLE_EQ(u.aod_vertical, users[0].aod_vertical);
    EXPECT_DOUBLE_EQ(u.position[0], 0.0);
  }
}

TEST(Scenario, UniformDiskMeanRadius) {
  rs::ScenarioConfig c;
  c.num_users = 10000;
  rs::Rng rng = rs::make_rng(5);
  const auto users = rs::sample_user_positions(c, rng);
  double acc = 0.0;
  for (const auto &u : users) {
    const double r = std::hypot(u.position[0] - c.user_disk_center[0], u.position[1] - c.user_disk_center[1]);
    EXPECT_LE(r, c.user_disk_radius + 1e-12);
    acc += r;
  }
  EXPECT_NEAR(acc / users.size(), 2.0 / 3.0 * 50.0, 0.02 * 100.0 / 3.0);
}

TEST(Scenario, SameSeedSameGeometry) {
  rs::ScenarioConfig c;
  rs::Rng a = rs::make_rng(11, 2, 1), b = rs::make_rng(11, 2, 1);
  const auto ua = rs::sample_user_positions(c, a), ub = rs::sample_user_positions(c, b);
  for (std::size_t k = 0; k < ua.size(); ++k) {
    EXPECT_EQ(ua[k].position, ub[k].position);
    EXPECT_EQ(ua[k].distance, ub[k].distance);
  }
}

TEST(Scenario, ValidationRejectsBadValues) {
  rs::ScenarioConfig c;
  EXPECT_NO_THROW(c.validate());
  auto bad = [](auto mutate) {
    rs::ScenarioConfig x;
    mutate(x);
    EXPECT_THROW(x.validate(), std::invalid_argument);
  };
  bad([](rs::ScenarioConfig &x) { x.num_users = 0; });
  bad([](rs::ScenarioConfig &x) { x.max_power = 0.0; });
  bad([](rs::ScenarioConfig &x) { x.default_user.id_outage_target = 0.5; });
  bad([](rs::ScenarioConfig &x) { x.default_user.eh_outage_target = 0.0; });
  bad([](rs::ScenarioConfig &x) { x.energy_threshold = 0.024; });
  bad([](rs::ScenarioConfig &x) { x.users.resize(2); });
}

TEST(Scenario, JsonRoundTripAndOverrides) {
  rs::ScenarioConfig c;
  c.num_users = 3;
  c.default_user.id_noise = 2e-9;
  const nlohmann::json j = c;
  const rs::ScenarioConfig back = j.get<rs::ScenarioConfig>();
  EXPECT_EQ(rs::config_hash(back), rs::config_hash(c));
  EXPECT_DOUBLE_EQ(back.default_user.id_noise_value(), 2e-9);

  const rs::ScenarioConfig o = rs::apply_overrides(c, {"max_power=2.5", "default_user.eh.a=100", "elements_x=3"});
  EXPECT_DOUBLE_EQ(o.max_power, 2.5);
  EXPECT_DOUBLE_EQ(o.default_user.eh.a, 100.0);
  EXPECT_EQ(o.elements_x, 3);
  EXPECT_NE(rs::config_hash(o), rs::config_hash(c));
  EXPECT_THROW(rs::apply_overrides(c, {"no_such_key=1"}), std::invalid_argument);
  EXPECT_THROW(rs::apply_overrides(c, {"max_power"}), std::invalid_argument);

  nlohmann::json bad = c;
  bad["typo"] = 1;
  EXPECT_THROW(bad.get<rs::ScenarioConfig>(), std::invalid_argument);
}

TEST(Scenario, ConfigFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "rms_swipt_config_test.json";
  rs::ScenarioConfig c;
  c.energy_threshold = 3e-7;
  rs::save_config(c, path.string());
  const rs::ScenarioConfig back = rs::load_config(path.string());
  EXPECT_DOUBLE_EQ(back.energy_threshold, 3e-7);
  std::filesystem::remove(path);
  EXPECT_THROW(rs::load_config(path.string()), std::invalid_argument);
}

// ---- channel -----------------------------------------------------------------

TEST(Channel, SteeringAtZeroAngleIsAllOnes) {
  rs::UserGeometry g;
  g.distance = 10.0;
  const CVector a = rs::upa_steering(g, 3, 4, 0.05, 0.1);
  ASSERT_EQ(a.size(), 12);
  for (int i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a(i) - rs::cplx(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Channel, SingleElementSteering) {
  rs::UserGeometry g;
  g.aod_vertical = 0.7;
  g.aod_horizontal = 1.3;
  const CVector a = rs::upa_steering(g, 1, 1, 0.05, 0.1);
  ASSERT_EQ(a.size(), 1);
  EXPECT_EQ(a(0), rs::cplx(1.0, 0.0));
}

TEST(Channel, HandEvaluatedTwoByTwoSteering) {
  rs::UserGeometry g;
  g.aod_vertical = rs::kPi / 2;
  g.aod_horizontal = 0.0;
  const CVector a = rs::upa_steering(g, 2, 2, 0.05, 0.1);
  const rs::cplx m = std::polar(1.0, -rs::kPi);
  const rs::cplx want[4] = {1.0, 1.0, m, m};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(a(i) - want[i]), 0.0, 1e-12);
}

TEST(Channel, SteeringEntriesHaveUnitModulus) {
  rs::Rng rng = rs::make_rng(9);
  for (int t = 0; t < 20; ++t) {
    rs::UserGeometry g;
    g.aod_vertical = rs::kPi * rs::uniform01(rng);
    g.aod_horizontal = 2 * rs::kPi * rs::uniform01(rng);
    const CVector a = rs::upa_steering(g, 4, 4, 0.05, 0.1);
    EXPECT_NEAR(a.cwiseAbs().maxCoeff(), 1.0, 1e-14);
    EXPECT_NEAR(a.cwiseAbs().minCoeff(), 1.0, 1e-14);
  }
}

TEST(Channel, PureLosChannelPower) {
  rs::ScenarioConfig c = small_config(4, 1);
  c.rician_factor = std::numeric_limits<double>::infinity();
  const rs::UserGeometry g = rs::make_geometry({0, 0, 15}, {20, 10, 0});
  rs::Rng rng = rs::make_rng(1);
  const CVector h = rs::rician_channel(g, c, rng);
  EXPECT_NEAR(h.squaredNorm(), rs::large_scale_gain(g, c) * 16, 1e-15);

  c.reference_gain = 1.0;
  const rs::UserGeometry unit = rs::make_geometry({0, 0, 1}, {0, 0, 0});
  EXPECT_NEAR(rs::rician_channel(unit, c, rng).squaredNorm(), 16.0, 1e-12);
}

TEST(Channel, RicianMeanPower) {
  const rs::ScenarioConfig c = small_config(4, 1);
  const rs::UserGeometry g = rs::make_geometry({0, 0, 15}, {10, -5, 0});
  rs::Rng rng = rs::make_rng(2);
  const int n = 100000;
  double acc = 0.0;
  for (int s = 0; s < n; ++s) acc += rs::rician_channel(g, c, rng).squaredNorm();
  const double want = rs::large_scale_gain(g, c) * 16;
  EXPECT_NEAR(acc / n / want, 1.0, 0.01);
}

TEST(Channel, CovarianceBasics) {
  CVector e1 = CVector::Zero(3);
  e1(0) = 1.0;
  const CMatrix phi = rs::covariance(e1);
  EXPECT_EQ(phi(0, 0), rs::cplx(1.0, 0.0));
  EXPECT_EQ(phi.cwiseAbs().sum(), 1.0);

  rs::Rng rng = rs::make_rng(4);
  const CVector h = random_vector(4, rng);
  const CMatrix p = rs::covariance(h);
  EXPECT_NEAR(p.trace().real(), h.squaredNorm(), 1e-12);
  EXPECT_TRUE(rs::is_hermitian(p));
  const RVector ev = rs::hermitian_eigenvalues(p);
  EXPECT_LE(ev(2), 1e-12 * ev(3));
  EXPECT_GE(ev(0), -1e-10 * ev(3));
}

TEST(Channel, ScenarioDrawIsPairedAndRankOne) {
  const rs::ScenarioConfig c;
  const rs::ChannelSet a = rs::draw_scenario(c, 4), b = rs::draw_scenario(c, 4), d = rs::draw_scenario(c, 5);
  ASSERT_EQ(a.num_users(), 4);
  ASSERT_EQ(a.num_elements(), 16);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(a.h[k], b.h[k]);
    EXPECT_NEAR(a.phi[k].trace().real(), a.h[k].squaredNorm(), 1e-20);
  }
  EXPECT_NE(a.h[0], d.h[0]);
}

TEST(Channel, ErrorMatrixZeroVarianceAndHermitian) {
  rs::Rng rng = rs::make_rng(6);
  EXPECT_EQ(rs::sample_error_matrix(5, 0.0, rng).cwiseAbs().maxCoeff(), 0.0);
  const CMatrix x = rs::sample_error_matrix(6, 0.3, rng);
  EXPECT_EQ((x - x.adjoint()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Channel, ErrorMatrixEntryVariances) {
  rs::Rng rng = rs::make_rng(7);
  const int n = 8, samples = 100000;
  const double var = 0.01;
  double diag = 0.0, off = 0.0, re = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CMatrix x = rs::sample_error_matrix(n, var, rng);
    for (int i = 0; i < n; ++i) {
      diag += std::norm(x(i, i));
      for (int j = i + 1; j < n; ++j) {
        off += std::norm(x(i, j));
        re += x(i, j).real() * x(i, j).real();
      }
    }
  }
  const double npairs = n * (n - 1) / 2.0;
  EXPECT_NEAR(diag / (samples * n) / var, 1.0, 0.03);
  EXPECT_NEAR(off / (samples * npairs) / var, 1.0, 0.03);
  EXPECT_NEAR(re / (samples * npairs) / (var / 2), 1.0, 0.03);
}

TEST(Channel, TraceSamplerMatchesExplicitMatrix) {
  rs::Rng seed = rs::make_rng(8);
  const CVector f = random_vector(5, seed);
  const CMatrix F = f * f.adjoint();
  const rs::ErrorTraceSampler sampler(F, 0.2);
  rs::Rng a = rs::make_rng(12), b = rs::make_rng(12);
  rs::NormalDist nd;
  for (int s = 0; s < 10; ++s) {
    const double direct = rs::trace_product(rs::sample_error_matrix(5, 0.2, a), F);
    EXPECT_NEAR(sampler(b, nd), direct, 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

// ---- energy ------------------------------------------------------------------

TEST(Energy, ZeroInputHarvestsNothing) {
  const rs::EhParams eh;
  EXPECT_EQ(rs::harvest(0.0, eh), 0.0);
  EXPECT_EQ(rs::harvest_inverse(0.0, eh), 0.0);
}

TEST(Energy, SaturatesAtMaximum) {
  const rs::EhParams eh;
  EXPECT_NEAR(rs::harvest(10.0, eh), 0.024, 1e-12);
  EXPECT_LT(rs::harvest(10.0, eh), 0.024);
  EXPECT_THROW(rs::harvest_inverse(0.024, eh), std::domain_error);
  EXPECT_THROW(rs::harvest(-1.0, eh), std::domain_error);
}

TEST(Energy, MidpointAgainstHighPrecision) {
  using big = boost::multiprecision::cpp_bin_float_50;
  const rs::EhParams eh;
  const big a = eh.a, b = eh.b, m = eh.max_harvest, p = eh.b;
  const big eab = exp(a * b);
  const big X = eab / (1 + eab);
  const big Y = m / eab;
  const big want = m / (X * (1 + exp(-a * (p - b)))) - Y;
  EXPECT_NEAR(rs::harvest(eh.b, eh), want.convert_to<double>(), 1e-15);
}

TEST(Energy, InverseRoundTrip) {
  const rs::EhParams eh;
  for (double p : {1e-6, eh.b}) EXPECT_NEAR(rs::harvest_inverse(rs::harvest(p, eh), eh), p, 1e-8 * p) << p;
  // Deep in saturation the output sits a few ulps below the ceiling, so the
  // input is only recoverable to about ulp(E) / slope.
  const double p = 10 * eh.b;
  const double e = rs::harvest(p, eh);
  ASSERT_LT(e, eh.max_harvest);
  const double ulp = std::nextafter(e, 1.0) - e;
  EXPECT_NEAR(rs::harvest_inverse(e, eh), p, 1e-8 * p + 2.0 * ulp / rs::harvest_slope(p, eh));
}

TEST(Energy, InverseAgainstBisection) {
  const rs::EhParams eh;
  const double target = 0.5 * eh.max_harvest;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (rs::harvest(mid, eh) < target ? lo : hi) = mid;
  }
  EXPECT_NEAR(rs::harvest_inverse(target, eh), 0.5 * (lo + hi), 1e-10);
}

TEST(Energy, SlopeMatchesDifferences) {
  const rs::EhParams eh;
  for (double p : {1e-4, 0.01, 0.03}) {
    const double h = 1e-7;
    const double fd = (rs::harvest(p + h, eh) - rs::harvest(p - h, eh)) / (2 * h);
    EXPECT_NEAR(rs::harvest_slope(p, eh), fd, 1e-6 * std::abs(fd));
  }
}

// ---- robust ------------------------------------------------------------------

TEST(Robust, ErfInverse) {
  EXPECT_EQ(rs::erf_inv(0.0), 0.0);
  for (double y : {0.3, 0.8}) EXPECT_DOUBLE_EQ(rs::erf_inv(-y), -rs::erf_inv(y));
  double lo = 0.0, hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erf(mid) < 0.8 ? lo : hi) = mid;
  }
  EXPECT_NEAR(rs::erf_inv(0.8), 0.5 * (lo + hi), 1e-12);
  for (double y : {-0.999999, -0.5, 0.1, 0.95, 0.9999999}) EXPECT_NEAR(std::erf(rs::erf_inv(y)), y, 1e-14);
}

TEST(Robust, SingleUserErrorScale) {
  rs::ScenarioConfig c = small_config(2, 1);
  c.error_variance = 4e-6;
  const rs::ChannelSet cs = rs::draw_scenario(c);
  RVector p(1), rho(1);
  p << 0.7;
  rho << 0.3;
  const rs::RobustConstraintSet rcs = rs::build_constraints(cs.phi, p, rho, c);
  EXPECT_NEAR(rcs[0].sigma_e, 0.3 * 2e-3 * 0.7, 1e-18);
}

TEST(Robust, FullSplitStarvesHarvester) {
  rs::ScenarioConfig c = small_config(2, 2);
  c.error_variance = 1e-12;
  const rs::ChannelSet cs = rs::draw_scenario(c);
  RVector p(2), rho(2);
  p << 0.4, 0.6;
  rho << 1.0, 0.5;
  const rs::RobustConstraintSet rcs = rs::build_constraints(cs.phi, p, rho, c);
  EXPECT_EQ(rcs[0].beta_e, 0.0);
  EXPECT_EQ(rcs[0].phi_hat.cwiseAbs().maxCoeff(), 0.0);
  const CMatrix F = CMatrix::Identity(4, 4);
  EXPECT_DOUBLE_EQ(rs::eh_margin(F, rcs, 0), -rcs[0].phi);
  EXPECT_GT(rcs[0].phi, 0.0);
}

TEST(Robust, ConstraintMatricesMatchDirectFormula) {
  rs::ScenarioConfig c = small_config(2, 2);
  c.error_variance = 1e-14;
  const rs::ChannelSet cs = rs::draw_scenario(c, 3);
  RVector p(2), rho(2);
  p << 0.3, 0.5;
  rho << 0.6, 0.2;
  const rs::RobustConstraintSet rcs = rs::build_constraints(cs.phi, p, rho, c);
  const double g = c.sinr_threshold;
  for (int k = 0; k < 2; ++k) {
    const CMatrix tilde = rho(k) * (p(k) - g * (p.sum() - p(k))) * cs.phi[k];
    const CMatrix hat = (1 - rho(k)) * p.sum() * cs.phi[k];
    EXPECT_LE((rcs[k].phi_tilde - tilde).cwiseAbs().maxCoeff(), 1e-12 * tilde.cwiseAbs().maxCoeff());
    EXPECT_LE((rcs[k].phi_hat - hat).cwiseAbs().maxCoeff(), 1e-12 * hat.cwiseAbs().maxCoeff());
    EXPECT_TRUE(rs::is_hermitian(rcs[k].phi_tilde));
    EXPECT_GE(rcs[k].sigma_e, 0.0);
    EXPECT_GT(rcs[k].id_coeff, 0.0);
    EXPECT_GT(rcs[k].eh_coeff, 0.0);
  }
  EXPECT_THROW(rs::build_constraints(cs.phi, p, RVector::Constant(2, 1.5), c), std::invalid_argument);
}

namespace {

struct RobustFixture {
  rs::ScenarioConfig cfg = small_config(2, 2);
  rs::ChannelSet cs;
  RVector p{2}, rho{2};
  CMatrix F;
  RobustFixture() {
    cfg.error_variance = 1e-13;
    cs = rs::draw_scenario(cfg, 1);
    p << 0.6, 0.4;
    rho << 0.5, 0.5;
    CVector f(4);
    for (int n = 0; n < 4; ++n) f(n) = std::polar(1.0, std::arg(cs.h[0](n)));
    F = f * f.adjoint();
  }
};

} // namespace

TEST(Robust, MarginsAtHalfOutageTarget) {
  RobustFixture fx;
  fx.cfg.default_user.id_outage_target = 0.5;
  fx.cfg.default_user.eh_outage_target = 0.5;
  const rs::RobustConstraintSet rcs = rs::build_constraints(fx.cs.phi, fx.p, fx.rho, fx.cfg);
  EXPECT_EQ(rcs[0].id_coeff, 0.0);
  EXPECT_NEAR(rs::id_margin(fx.F, rcs, 0), rs::trace_product(rcs[0].phi_tilde, fx.F) - rcs[0].c, 1e-20);
  EXPECT_NEAR(rs::eh_margin(fx.F, rcs, 0), rs::trace_product(rcs[0].phi_hat, fx.F) - rcs[0].phi, 1e-20);
}

TEST(Robust, ZeroBeamformerViolates) {
  RobustFixture fx;
  const rs::RobustConstraintSet rcs = rs::build_constraints(fx.cs.phi, fx.p, fx.rho, fx.cfg);
  const CMatrix Z = CMatrix::Zero(4, 4);
  EXPECT_DOUBLE_EQ(rs::id_margin(Z, rcs, 1), -rcs[1].c);
  EXPECT_LT(rs::id_margin(Z, rcs, 1), 0.0);
  EXPECT_THROW(rs::analytic_id_outage(Z, rcs, 1), std::domain_error);
}

TEST(Robust, ZeroMarginGivesTargetOutage) {
  RobustFixture fx;
  const rs::RobustConstraintSet rcs = rs::build_constraints(fx.cs.phi, fx.p, fx.rho, fx.cfg);
  const rs::UserConstraint &u = rcs[0];
  const double fn = rs::frobenius_norm(fx.F);
  // Margins are affine along F = t F0; pick t where they vanish.
  const double a_id = rs::trace_product(u.phi_tilde, fx.F) - u.id_coeff * u.sigma_e * fn;
  ASSERT_GT(a_id, 0.0);
  const CMatrix Fi = (u.c / a_id) * fx.F;
  EXPECT_NEAR(rs::id_margin(Fi, rcs, 0), 0.0, 1e-12 * u.c);
  EXPECT_NEAR(rs::analytic_id_outage(Fi, rcs, 0), 0.1, 1e-9);

  const double a_eh = rs::trace_product(u.phi_hat, fx.F) - u.eh_coeff * u.beta_e * fn;
  ASSERT_GT(a_eh, 0.0);
  ASSERT_GT(u.phi, 0.0);
  const CMatrix Fe = (u.phi / a_eh) * fx.F;
  EXPECT_NEAR(rs::analytic_eh_outage(Fe, rcs, 0), 0.1, 1e-9);
}

TEST(Robust, AnalyticOutageLimits) {
  RobustFixture fx;
  rs::RobustConstraintSet rcs = rs::build_constraints(fx.cs.phi, fx.p, fx.rho, fx.cfg);
  const rs::UserConstraint &u = rcs[0];
  const CMatrix Fh = (u.c / rs::trace_product(u.phi_tilde, fx.F)) * fx.F;
  EXPECT_NEAR(rs::analytic_id_outage(Fh, rcs, 0), 0.5, 1e-12);
  fx.cfg.error_variance = 1e-40;
  rcs = rs::build_constraints(fx.cs.phi, fx.p, fx.rho, fx.cfg);
  EXPECT_LT(rs::analytic_id_outage(fx.F, rcs, 0), 1e-12);
}
