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

#ifndef RMS_SWIPT_ORACLES_HPP
#define RMS_SWIPT_ORACLES_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

#include "linalg.hpp"
#include "solver.hpp"

// Brute-force reference solvers for small instances of the block problems.
// They share nothing with the barrier method beyond the problem data.

namespace rms_swipt {

struct OracleResult {
  bool feasible = false;
  double objective = -std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Largest constraint violation of x, each row scaled by its coefficient size.
template <class Domain> double max_violation(const ConicProblem<Domain> &pr, const typename Domain::Point &x) {
  double worst = 0.0;
  for (const auto &c : pr.constraints) {
    const double scale = coeff_norm(c.coeff, pr.domain) + std::abs(c.bound);
    const double v = apply_coeff(c.coeff, x) - c.bound;
    worst = std::max(worst, scale > 0.0 ? v / scale : v);
  }
  for (const auto &c : pr.cones) {
    const double rhs = c.kappa * cone_norm<Domain>(c, x);
    const double lhs = apply_coeff(c.coeff, x) + c.offset;
    const double scale = std::abs(apply_coeff(c.coeff, x)) + std::abs(c.offset) + rhs;
    const double v = rhs - lhs;
    worst = std::max(worst, scale > 0.0 ? v / scale : v);
  }
  return worst;
}

namespace detail {

inline CMatrix clip_diagonal(CMatrix x, double bound) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, i) = std::min(x(i, i).real(), bound);
  return x;
}

// Dykstra projection onto {X >= 0, X_nn <= 1}.
inline CMatrix project_psd_unit_diag(const CMatrix &y, int iterations = 200) {
  CMatrix x = y;
  CMatrix p = CMatrix::Zero(y.rows(), y.cols());
  CMatrix q = p;
  for (int it = 0; it < iterations; ++it) {
    const CMatrix a = project_psd(x + p);
    p = x + p - a;
    const CMatrix b = clip_diagonal(a + q, 1.0);
    q = a + q - b;
    const double change = (b - x).norm();
    x = b;
    if (change <= 1e-14 * std::max(1.0, x.norm())) break;
  }
  return project_psd(x);
}

inline CMatrix p4_gradient(const ConicProblem<PsdDomain> &pr, const CMatrix &x) {
  const int n = pr.domain.order;
  CMatrix g = pr.linear.to_matrix(n);
  for (const auto &l : pr.logs) g += (l.weight / (l.coeff.apply(x) + l.offset)) * l.coeff.to_matrix(n);
  return g;
}

} // namespace detail

/// Projected-gradient ascent with backtracking on problems whose only
/// binding constraints are X >= 0 and diag(X) <= 1. The caller checks that
/// the remaining constraints hold at the returned point.
inline OracleResult projected_gradient_psd(const ConicProblem<PsdDomain> &pr, CMatrix &x, int max_iterations = 20000) {
  const int n = pr.domain.order;
  x = 0.5 * CMatrix::Identity(n, n);
  double f = objective_value(pr, x);
  double step = 1.0;
  OracleResult r;
  int quiet = 0;
  for (int it = 0; it < max_iterations; ++it) {
    r.iterations = it + 1;
    const CMatrix g = detail::p4_gradient(pr, x);
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const CMatrix y = detail::project_psd_unit_diag(x + step * g);
      const CMatrix d = y - x;
      const double fy = objective_value(pr, y);
      if (std::isfinite(fy) && fy >= f + inner(g, d) - d.squaredNorm() / (2.0 * step) - 1e-15 * std::abs(f)) {
        const double gain = fy - f;
        x = y;
        f = fy;
        moved = true;
        step *= 1.5;
        quiet = gain <= 1e-13 * std::max(1.0, std::abs(f)) ? quiet + 1 : 0;
        break;
      }
      step *= 0.5;
    }
    if (!moved || quiet >= 20) break;
  }
  r.feasible = true;
  r.objective = f;
  return r;
}

/// Nested grid refinement over {p >= 0, p_1 + p_2 <= p_max} for two-variable problems.
inline OracleResult grid_search_2d(const ConicProblem<VectorDomain> &pr, double p_max, RVector &best,
                                   int points = 201, int levels = 40) {
  if (pr.domain.size != 2) throw std::invalid_argument("grid_search_2d: problem must have two variables");
  OracleResult r;
  double lo0 = 0.0, hi0 = p_max, lo1 = 0.0, hi1 = p_max;
  best = RVector::Zero(2);
  for (int level = 0; level < levels; ++level) {
    bool found = false;
    double fbest = -std::numeric_limits<double>::infinity();
    RVector cand(2);
    for (int i = 0; i < points; ++i)
      for (int j = 0; j < points; ++j) {
        cand << lo0 + (hi0 - lo0) * i / (points - 1), lo1 + (hi1 - lo1) * j / (points - 1);
        if (max_violation(pr, cand) > 1e-12) continue;
        const double f = objective_value(pr, cand);
        if (f > fbest) {
          fbest = f;
          best = cand;
          found = true;
        }
      }
    ++r.iterations;
    if (!found) {
      if (level == 0) return r;
      break;
    }
    r.feasible = true;
    r.objective = std::max(r.objective, fbest);
    const double w0 = 2.0 * (hi0 - lo0) / (points - 1), w1 = 2.0 * (hi1 - lo1) / (points - 1);
    lo0 = std::max(0.0, best(0) - w0);
    hi0 = best(0) + w0;
    lo1 = std::max(0.0, best(1) - w1);
    hi1 = best(1) + w1;
    if (w0 < 1e-15 * p_max && w1 < 1e-15 * p_max) break;
  }
  return r;
}

/// Golden-section search on problems separable in the coordinates: every log
/// term, linear constraint and the linear objective touch one variable each.
inline OracleResult golden_section_separable(const ConicProblem<VectorDomain> &pr, RVector &x) {
  const int n = pr.domain.size;
  if (!pr.cones.empty()) throw std::invalid_argument("golden_section_separable: cones are not supported");
  auto single = [&](const RVector &a) {
    int idx = -1;
    for (int i = 0; i < n; ++i)
      if (a(i) != 0.0) {
        if (idx >= 0) throw std::invalid_argument("golden_section_separable: coupled coefficient");
        idx = i;
      }
    return idx;
  };
  std::vector<double> lo(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
  std::vector<double> hi(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  OracleResult r;
  for (const auto &c : pr.constraints) {
    const int i = single(c.coeff);
    if (i < 0) {
      if (c.bound < 0.0) return r;
      continue;
    }
    const double a = c.coeff(i);
    if (a > 0.0) hi[static_cast<std::size_t>(i)] = std::min(hi[static_cast<std::size_t>(i)], c.bound / a);
    else lo[static_cast<std::size_t>(i)] = std::max(lo[static_cast<std::size_t>(i)], c.bound / a);
  }
  std::vector<std::vector<const typename ConicProblem<VectorDomain>::LogTerm *>> logs(static_cast<std::size_t>(n));
  double constant = pr.constant;
  for (const auto &l : pr.logs) {
    const int i = single(l.coeff);
    if (i < 0) {
      if (!(l.offset > 0.0)) return r;
      constant += l.weight * std::log(l.offset);
    } else {
      logs[static_cast<std::size_t>(i)].push_back(&l);
    }
  }
  x = RVector::Zero(n);
  double total = constant;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < n; ++i) {
    const std::size_t u = static_cast<std::size_t>(i);
    if (!std::isfinite(lo[u]) || !std::isfinite(hi[u])) throw std::invalid_argument("golden_section_separable: unbounded variable");
    if (lo[u] > hi[u]) return r;
    const double lin = pr.linear.size() == 0 ? 0.0 : pr.linear(i);
    auto g = [&](double t) {
      double v = lin * t;
      for (const auto *l : logs[u]) {
        const double arg = l->coeff(i) * t + l->offset;
        if (!(arg > 0.0)) return -std::numeric_limits<double>::infinity();
        v += l->weight * std::log(arg);
      }
      return v;
    };
    double a = lo[u], b = hi[u];
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
      if (gc < gd) {
        a = c;
        c = d;
        gc = gd;
        d = a + phi * (b - a);
        gd = g(d);
      } else {
        b = d;
        d = c;
        gd = gc;
        c = b - phi * (b - a);
        gc = g(c);
      }
      r.iterations = std::max(r.iterations, it + 1);
    }
    // The optimum may sit on an end point of the interval.
    double bestt = 0.5 * (a + b), bestg = g(bestt);
    for (double t : {lo[u], hi[u]})
      if (g(t) > bestg) {
        bestg = g(t);
        bestt = t;
      }
    if (!std::isfinite(bestg)) return r;
    x(i) = bestt;
    total += bestg;
  }
  r.feasible = true;
  r.objective = total;
  return r;
}

} // namespace rms_swipt

#endif // RMS_SWIPT_ORACLES_HPP
