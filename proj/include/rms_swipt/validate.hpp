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

#ifndef RMS_SWIPT_VALIDATE_HPP
#define RMS_SWIPT_VALIDATE_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ao.hpp"
#include "channel.hpp"
#include "energy.hpp"
#include "robust.hpp"
#include "scenario.hpp"

namespace rms_swipt {

struct McReport {
  double estimate = 0.0;
  double half_width_95 = 0.0;
  long long num_samples = 0;
  double analytic_value = 0.0;
  /// (estimate - analytic) over the binomial standard error at the analytic value.
  double z_score = 0.0;

  double standard_error() const {
    return num_samples > 0 ? std::sqrt(analytic_value * (1.0 - analytic_value) / static_cast<double>(num_samples))
                           : 0.0;
  }
};

/// How the sampled errors enter the K terms of a user's SINR or harvested power.
enum class ErrorCoupling {
  per_stream, ///< independent error matrix for every stream term (matches the closed-form variances)
  shared      ///< one error matrix per user, common to all stream terms
};

inline const char *to_string(ErrorCoupling c) { return c == ErrorCoupling::shared ? "shared" : "per_stream"; }

namespace detail {

inline McReport make_report(long long hits, long long n, double analytic) {
  McReport r;
  r.num_samples = n;
  r.analytic_value = analytic;
  r.estimate = static_cast<double>(hits) / static_cast<double>(n);
  r.half_width_95 = 1.96 * std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(n));
  const double se = r.standard_error();
  if (se > 0.0) r.z_score = (r.estimate - analytic) / se;
  else r.z_score = r.estimate == analytic ? 0.0 : std::numeric_limits<double>::infinity();
  return r;
}

inline void check_samples(long long n) {
  if (n < 10000) throw std::invalid_argument("Monte Carlo estimates need at least 1e4 samples");
}

// Draws the K perturbed gains tr((Phi_k + dPhi) F), i = 1..K, of user k.
class GainSampler {
public:
  GainSampler(const ChannelSet &cs, const CMatrix &F, int k, ErrorCoupling coupling)
      : K_(cs.num_users()), base_(trace_product(cs.phi[k], F)), coupling_(coupling), trace_(F, cs.error_variance) {}

  void operator()(Rng &rng, NormalDist &nd, std::vector<double> &out) const {
    out.resize(static_cast<std::size_t>(K_));
    if (coupling_ == ErrorCoupling::shared) {
      const double g = base_ + trace_(rng, nd);
      for (double &v : out) v = g;
    } else {
      for (double &v : out) v = base_ + trace_(rng, nd);
    }
  }

private:
  int K_;
  double base_;
  ErrorCoupling coupling_;
  ErrorTraceSampler trace_;
};

} // namespace detail

struct OutagePair {
  McReport id;
  McReport eh;
};

/// Information and energy outage of user k estimated from the same error
/// draws. Non-positive signal gains, SINR denominators or received powers
/// count as outage.
inline OutagePair mc_outage(const CMatrix &F, const RVector &p, const RVector &rho, const ChannelSet &cs,
                            const ScenarioConfig &cfg, int k, long long num_samples, Rng &rng,
                            ErrorCoupling coupling = ErrorCoupling::per_stream) {
  detail::check_samples(num_samples);
  const RobustConstraintSet rcs = build_constraints(cs.phi, p, rho, cfg);
  const UserParams &u = cfg.user(k);
  const double g = cfg.sinr_threshold;
  const detail::GainSampler sampler(cs, F, k, coupling);
  NormalDist nd;
  std::vector<double> gains;
  long long id_hits = 0, eh_hits = 0;
  for (long long s = 0; s < num_samples; ++s) {
    sampler(rng, nd, gains);
    double interference = 0.0, total = 0.0;
    for (int i = 0; i < cs.num_users(); ++i) {
      const double pg = p(i) * gains[static_cast<std::size_t>(i)];
      total += pg;
      if (i != k) interference += pg;
    }
    const double signal = rho(k) * p(k) * gains[static_cast<std::size_t>(k)];
    const double den = rho(k) * interference + rho(k) * u.antenna_noise + u.id_noise_value();
    if (!(gains[static_cast<std::size_t>(k)] > 0.0) || !(den > 0.0) || signal / den <= g) ++id_hits;
    const double received = (1.0 - rho(k)) * (total + u.antenna_noise);
    if (!(received >= 0.0) || harvest(received, u.eh) <= cfg.energy_threshold) ++eh_hits;
  }
  return {detail::make_report(id_hits, num_samples, analytic_id_outage(F, rcs, k)),
          detail::make_report(eh_hits, num_samples, analytic_eh_outage(F, rcs, k))};
}

inline McReport mc_id_outage(const CMatrix &F, const RVector &p, const RVector &rho, const ChannelSet &cs,
                             const ScenarioConfig &cfg, int k, long long num_samples, Rng &rng,
                             ErrorCoupling coupling = ErrorCoupling::per_stream) {
  return mc_outage(F, p, rho, cs, cfg, k, num_samples, rng, coupling).id;
}

inline McReport mc_eh_outage(const CMatrix &F, const RVector &p, const RVector &rho, const ChannelSet &cs,
                             const ScenarioConfig &cfg, int k, long long num_samples, Rng &rng,
                             ErrorCoupling coupling = ErrorCoupling::per_stream) {
  return mc_outage(F, p, rho, cs, cfg, k, num_samples, rng, coupling).eh;
}

struct VarianceReport {
  double mean = 0.0;
  double variance = 0.0;
  double expected_variance = 0.0;
  /// variance / expected_variance; 1 when the closed form holds.
  double ratio = 0.0;
  long long num_samples = 0;
};

/// Sample mean and variance of tr(Y X) over error matrices X with entry
/// variance sigma_x^2, against the closed form sigma_x^2 tr(Y Y^H).
inline VarianceReport check_prop2(const CMatrix &Y, double variance, long long num_samples, Rng &rng) {
  if (num_samples < 2) throw std::invalid_argument("check_prop2: need at least two samples");
  if (!is_hermitian(Y)) throw std::invalid_argument("check_prop2: Y must be Hermitian");
  const ErrorTraceSampler sampler(Y, variance);
  NormalDist nd;
  double mean = 0.0, m2 = 0.0;
  for (long long s = 1; s <= num_samples; ++s) {
    const double x = sampler(rng, nd);
    const double d = x - mean;
    mean += d / static_cast<double>(s);
    m2 += d * (x - mean);
  }
  VarianceReport r;
  r.num_samples = num_samples;
  r.mean = mean;
  r.variance = m2 / static_cast<double>(num_samples - 1);
  r.expected_variance = variance * Y.squaredNorm();
  r.ratio = r.expected_variance > 0.0 ? r.variance / r.expected_variance : (r.variance == 0.0 ? 1.0 : 0.0);
  return r;
}

/// Largest relative gap between the Monte Carlo mean rate (one shared error
/// matrix per user) and the rate evaluated at the estimated covariances.
inline double check_prop1(const ChannelSet &cs, const RVector &p, const RVector &rho, const CMatrix &F,
                          const ScenarioConfig &cfg, long long num_samples, Rng &rng) {
  if (num_samples < 1) throw std::invalid_argument("check_prop1: need at least one sample");
  const RVector nominal = channel_gains(cs, F);
  const ErrorTraceSampler sampler(F, cs.error_variance);
  NormalDist nd;
  double worst = 0.0;
  for (int k = 0; k < cs.num_users(); ++k) {
    const double closed = user_rate(k, nominal, p, rho, cfg);
    double acc = 0.0;
    RVector g = nominal;
    for (long long s = 0; s < num_samples; ++s) {
      g(k) = nominal(k) + sampler(rng, nd);
      acc += user_rate(k, g, p, rho, cfg);
    }
    const double mean = acc / static_cast<double>(num_samples);
    worst = std::max(worst, std::abs(mean - closed) / std::max(std::abs(closed), 1e-300));
  }
  return worst;
}

struct FdReport {
  double analytic = 0.0;
  std::vector<double> steps;
  std::vector<double> estimates;
  std::vector<double> relative_errors;
  double best_relative_error = std::numeric_limits<double>::infinity();
  /// log10 error ratio between consecutive steps (2 for central differences).
  double observed_order = 0.0;
};

/// Central differences of phi at 0 compared with an analytic derivative.
inline FdReport fd_gradient_check(const std::function<double(double)> &phi, double analytic,
                                  const std::vector<double> &steps = {1e-3, 1e-4, 1e-5}) {
  FdReport r;
  r.analytic = analytic;
  r.steps = steps;
  const double scale = std::max(std::abs(analytic), std::numeric_limits<double>::min());
  for (double h : steps) {
    const double est = (phi(h) - phi(-h)) / (2.0 * h);
    r.estimates.push_back(est);
    const double e = std::abs(est - analytic) / scale;
    r.relative_errors.push_back(e);
    r.best_relative_error = std::min(r.best_relative_error, e);
  }
  if (steps.size() >= 2) {
    const double e0 = r.relative_errors[0], e1 = r.relative_errors[1];
    if (e0 > 0.0 && e1 > 0.0) r.observed_order = std::log10(e0 / e1) / std::log10(steps[0] / steps[1]);
  }
  return r;
}

/// Interference term of the rate, log2(rho_k sum_{i!=k} p_i tr(Phi_k F) + rho_k sigma_k^2 + delta_k^2).
inline double interference_log(const CMatrix &F, const RVector &p, const RVector &rho, const CMatrix &phi_k, int k,
                               const ScenarioConfig &cfg) {
  return std::log2(detail::interference_denominator(k, trace_product(phi_k, F), p, rho, cfg));
}

/// Directional check of grad_gbar at F along the Hermitian direction D.
inline FdReport check_grad_gbar(const CMatrix &F, const CMatrix &D, const RVector &p, const RVector &rho,
                                const ChannelSet &cs, int k, const ScenarioConfig &cfg,
                                const std::vector<double> &steps = {1e-3, 1e-4, 1e-5}) {
  const CMatrix G = grad_gbar(F, p, rho, cs.phi[k], k, cfg);
  auto phi = [&](double t) { return interference_log(F + t * D, p, rho, cs.phi[k], k, cfg); };
  return fd_gradient_check(phi, trace_product(G, D), steps);
}

} // namespace rms_swipt

#endif // RMS_SWIPT_VALIDATE_HPP
