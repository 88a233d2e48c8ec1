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

#ifndef RMS_SWIPT_ROBUST_HPP
#define RMS_SWIPT_ROBUST_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "energy.hpp"
#include "linalg.hpp"
#include "scenario.hpp"

namespace rms_swipt {

/// Inverse error function on (-1, 1).
inline double erf_inv(double y) {
  if (!(std::abs(y) < 1.0)) throw std::domain_error("erf_inv: argument must lie in (-1, 1)");
  if (y == 0.0) return 0.0;
  // Giles' single-precision rational form as the starting point.
  double w = -std::log((1.0 - y) * (1.0 + y));
  double x;
  if (w < 5.0) {
    w -= 2.5;
    double p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
    x = p * y;
  } else {
    w = std::sqrt(w) - 3.0;
    double p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
    x = p * y;
  }
  // Halley polish on erf(x) - y.
  const double two_over_sqrt_pi = 1.1283791670955126;
  for (int it = 0; it < 3; ++it) {
    const double err = std::erf(x) - y;
    const double d = two_over_sqrt_pi * std::exp(-x * x);
    if (d == 0.0) break;
    const double step = err / d;
    x -= step / (1.0 + x * step);
  }
  return x;
}

/// Deterministic stand-ins for both outage constraints of one user.
struct UserConstraint {
  double tilde_scale = 0.0; ///< rho_k (p_k - gamma sum_{i!=k} p_i)
  double hat_scale = 0.0;   ///< (1 - rho_k) sum_i p_i
  CMatrix phi_tilde;        ///< tilde_scale * Phi_k
  CMatrix phi_hat;          ///< hat_scale * Phi_k
  double sigma_e = 0.0;
  double beta_e = 0.0;
  double c = 0.0;
  double phi = 0.0;
  double id_coeff = 0.0;
  double eh_coeff = 0.0;
};

struct RobustConstraintSet {
  std::vector<UserConstraint> users;
  int size() const { return static_cast<int>(users.size()); }
  const UserConstraint &operator[](int k) const { return users.at(static_cast<std::size_t>(k)); }
};

inline double outage_coeff(double target) { return std::sqrt(2.0) * erf_inv(1.0 - 2.0 * target); }

inline RobustConstraintSet build_constraints(const std::vector<CMatrix> &phi, const RVector &p, const RVector &rho,
                                             const ScenarioConfig &cfg) {
  const int K = static_cast<int>(phi.size());
  if (p.size() != K || rho.size() != K) throw std::invalid_argument("build_constraints: size mismatch");
  for (int k = 0; k < K; ++k) {
    if (!(p(k) >= 0.0)) throw std::invalid_argument("build_constraints: powers must be non-negative");
    if (!(rho(k) >= 0.0 && rho(k) <= 1.0)) throw std::invalid_argument("build_constraints: rho must lie in [0, 1]");
  }
  const double g = cfg.sinr_threshold;
  const double sphi = cfg.error_stddev();
  const double ptot = p.sum();
  const double psq = p.squaredNorm();
  RobustConstraintSet out;
  out.users.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const UserParams &u = cfg.user(k);
    UserConstraint &uc = out.users[static_cast<std::size_t>(k)];
    const double others = ptot - p(k);
    const double others_sq = psq - p(k) * p(k);
    uc.tilde_scale = rho(k) * (p(k) - g * others);
    uc.hat_scale = (1.0 - rho(k)) * ptot;
    uc.phi_tilde = uc.tilde_scale * phi[k];
    uc.phi_hat = uc.hat_scale * phi[k];
    uc.sigma_e = rho(k) * sphi * std::sqrt(p(k) * p(k) + g * g * std::max(others_sq, 0.0));
    uc.beta_e = (1.0 - rho(k)) * sphi * std::sqrt(psq);
    uc.c = rho(k) * g * u.antenna_noise + g * u.id_noise_value();
    uc.phi = harvest_inverse(cfg.energy_threshold, u.eh) - (1.0 - rho(k)) * u.antenna_noise;
    uc.id_coeff = outage_coeff(u.id_outage_target);
    uc.eh_coeff = outage_coeff(u.eh_outage_target);
  }
  return out;
}

inline double id_margin(const CMatrix &F, const RobustConstraintSet &rcs, int k) {
  const UserConstraint &u = rcs[k];
  return trace_product(u.phi_tilde, F) - u.c - u.id_coeff * u.sigma_e * frobenius_norm(F);
}

inline double eh_margin(const CMatrix &F, const RobustConstraintSet &rcs, int k) {
  const UserConstraint &u = rcs[k];
  return trace_product(u.phi_hat, F) - u.phi - u.eh_coeff * u.beta_e * frobenius_norm(F);
}

namespace detail {
inline double gaussian_outage(double mean_excess, double sd) {
  if (sd == 0.0) return mean_excess > 0.0 ? 0.0 : (mean_excess < 0.0 ? 1.0 : 0.5);
  return 0.5 * std::erfc(mean_excess / (std::sqrt(2.0) * sd));
}
} // namespace detail

inline double analytic_id_outage(const CMatrix &F, const RobustConstraintSet &rcs, int k) {
  const double fn = frobenius_norm(F);
  if (!(fn > 0.0)) throw std::domain_error("analytic_id_outage: F must be nonzero");
  const UserConstraint &u = rcs[k];
  return detail::gaussian_outage(trace_product(u.phi_tilde, F) - u.c, u.sigma_e * fn);
}

inline double analytic_eh_outage(const CMatrix &F, const RobustConstraintSet &rcs, int k) {
  const double fn = frobenius_norm(F);
  if (!(fn > 0.0)) throw std::domain_error("analytic_eh_outage: F must be nonzero");
  const UserConstraint &u = rcs[k];
  return detail::gaussian_outage(trace_product(u.phi_hat, F) - u.phi, u.beta_e * fn);
}

} // namespace rms_swipt

#endif // RMS_SWIPT_ROBUST_HPP
