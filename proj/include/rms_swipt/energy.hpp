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

#ifndef RMS_SWIPT_ENERGY_HPP
#define RMS_SWIPT_ENERGY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rms_swipt {

/// Logistic energy-harvesting circuit.
struct EhParams {
  double max_harvest = 0.024; ///< watts
  double a = 150.0;           ///< 1/watts
  double b = 0.024;           ///< watts

  double x() const {
    const double e = std::exp(-a * b);
    return 1.0 / (1.0 + e);
  }
  double y() const { return max_harvest * std::exp(-a * b); }

  void validate() const {
    if (!(max_harvest > 0.0) || !(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("EhParams: max_harvest, a and b must be positive");
  }
};

namespace detail {
inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}
} // namespace detail

/// Harvested power for RF input power p_in (watts).
inline double harvest(double p_in, const EhParams &eh) {
  if (!(p_in >= 0.0)) throw std::domain_error("harvest: input power must be non-negative");
  // max/X * logistic(a(p-b)) - Y, rewritten as a difference of logistics so
  // that Psi(0) == 0 holds without cancellation.
  const double z = eh.a * (p_in - eh.b);
  const double s = detail::logistic(z);
  const double s0 = detail::logistic(-eh.a * eh.b);
  const double out = eh.max_harvest * (s - s0) / (1.0 - s0);
  return std::min(std::max(out, 0.0), std::nextafter(eh.max_harvest, 0.0));
}

/// Derivative of harvest() with respect to the input power.
inline double harvest_slope(double p_in, const EhParams &eh) {
  const double s = detail::logistic(eh.a * (p_in - eh.b));
  const double s0 = detail::logistic(-eh.a * eh.b);
  return eh.max_harvest * eh.a * s * (1.0 - s) / (1.0 - s0);
}

/// RF input power that yields harvested power `energy`.
inline double harvest_inverse(double energy, const EhParams &eh) {
  if (energy < 0.0)
    throw std::domain_error("harvest_inverse: energy " + std::to_string(energy) + " is below 0");
  if (energy >= eh.max_harvest)
    throw std::domain_error("harvest_inverse: energy " + std::to_string(energy) +
                            " is not below the saturation level " + std::to_string(eh.max_harvest));
  if (energy == 0.0) return 0.0;

  // logistic(a(p-b)) = s with s = s0 + (energy/max)(1 - s0). Taking logits
  // relative to p = 0 keeps full precision for small inputs.
  const double s0 = detail::logistic(-eh.a * eh.b);
  const double r = energy / eh.max_harvest;
  const double log_ratio_s = std::log1p(r * (1.0 - s0) / s0);
  const double log_ratio_1ms = std::log1p(-r);
  double p = (log_ratio_s - log_ratio_1ms) / eh.a;

  const bool accurate = std::isfinite(p) && p >= 0.0 &&
                        std::abs(harvest(p, eh) - energy) <= 1e-12 * eh.max_harvest;
  if (accurate) return p;

  // Bisection on the monotone transfer function.
  double lo = 0.0, hi = std::max(eh.b, 1e-12);
  while (harvest(hi, eh) < energy) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::domain_error("harvest_inverse: no bracket found");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (harvest(mid, eh) < energy ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace rms_swipt

#endif // RMS_SWIPT_ENERGY_HPP
