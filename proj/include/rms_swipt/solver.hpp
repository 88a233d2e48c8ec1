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

#ifndef RMS_SWIPT_SOLVER_HPP
#define RMS_SWIPT_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace rms_swipt {

enum class LinearSolve { automatic, dense, woodbury };

struct SolverTolerances {
  double feas_tol = 1e-7;
  double obj_tol = 1e-8;
  int max_iters = 400; ///< Newton steps over both phases
  double barrier_growth = 20.0;
  LinearSolve linear_solve = LinearSolve::automatic;
};

/// Hermitian coefficient alpha I + sum_j s_j v_j v_j^H + D, acting on X as tr(A X).
struct HermitianCoeff {
  double identity = 0.0;
  std::vector<std::pair<double, CVector>> outer;
  CMatrix dense; ///< empty when absent

  HermitianCoeff &add_identity(double a) {
    identity += a;
    return *this;
  }
  HermitianCoeff &add_outer(double s, const CVector &v) {
    if (s != 0.0) outer.emplace_back(s, v);
    return *this;
  }
  HermitianCoeff &add_dense(const CMatrix &d) {
    if (dense.size() == 0) dense = d;
    else dense += d;
    return *this;
  }
  HermitianCoeff &add(const HermitianCoeff &o, double f = 1.0) {
    identity += f * o.identity;
    for (const auto &t : o.outer) add_outer(f * t.first, t.second);
    if (o.dense.size() != 0) add_dense(f * o.dense);
    return *this;
  }
  HermitianCoeff &scale(double f) {
    identity *= f;
    for (auto &t : outer) t.first *= f;
    if (dense.size() != 0) dense *= f;
    return *this;
  }

  CMatrix to_matrix(Eigen::Index n) const {
    CMatrix a = identity * CMatrix::Identity(n, n);
    for (const auto &t : outer) a.noalias() += t.first * (t.second * t.second.adjoint());
    if (dense.size() != 0) a += dense;
    return a;
  }

  double apply(const CMatrix &x) const {
    double v = identity * x.diagonal().real().sum();
    for (const auto &t : outer) v += t.first * t.second.dot(x * t.second).real();
    if (dense.size() != 0) v += inner(dense, x);
    return v;
  }
};

/// Variable is an N x N Hermitian PSD matrix.
struct PsdDomain {
  using Point = CMatrix;
  using Coeff = HermitianCoeff;
  int order = 1;
  Eigen::Index dim() const { return svec_size(order); }
};

/// Variable is a real vector; sign and box limits are ordinary linear constraints.
struct VectorDomain {
  using Point = RVector;
  using Coeff = RVector;
  int size = 1;
  Eigen::Index dim() const { return size; }
};

/// maximize  sum_j w_j log(a_j.x + b_j) + c.x + const
/// s.t.      a.x <= bound                      (linear)
///           a.x + b >= kappa ||M x + d||      (cone; empty M is the identity)
template <class Domain> struct ConicProblem {
  using Coeff = typename Domain::Coeff;
  using Point = typename Domain::Point;

  struct LogTerm {
    Coeff coeff;
    double offset = 0.0;
    double weight = 1.0;
  };
  struct LinearConstraint {
    Coeff coeff;
    double bound = 0.0;
  };
  struct NormCone {
    Coeff coeff;
    double offset = 0.0;
    double kappa = 0.0;
    RMatrix map;  ///< vector domain only
    RVector shift;
  };

  Domain domain;
  std::vector<LogTerm> logs;
  Coeff linear{};
  double constant = 0.0;
  std::vector<LinearConstraint> constraints;
  std::vector<NormCone> cones;

  int num_constraints() const { return static_cast<int>(constraints.size() + cones.size()); }
};

enum class SolveStatus { optimal, max_iters, infeasible, numerical_error };

inline const char *to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::optimal: return "optimal";
  case SolveStatus::max_iters: return "max_iters";
  case SolveStatus::infeasible: return "infeasible";
  case SolveStatus::numerical_error: return "numerical_error";
  }
  return "unknown";
}

template <class Domain> struct ConicSolution {
  typename Domain::Point value;
  double objective = -std::numeric_limits<double>::infinity();
  /// Violation per constraint (linear first, then cones) on normalized data.
  std::vector<double> residuals;
  SolveStatus status = SolveStatus::numerical_error;
  int iterations = 0;
  int phase1_iterations = 0;
  double gap = std::numeric_limits<double>::infinity();
  int offending = -1;
  std::string message;

  double max_residual() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, r);
    return m;
  }
  bool usable(double feas_tol) const {
    return status != SolveStatus::infeasible && std::isfinite(objective) && max_residual() <= feas_tol;
  }
};

// ---- evaluation helpers ----------------------------------------------------

inline double apply_coeff(const HermitianCoeff &a, const CMatrix &x) { return a.apply(x); }
inline double apply_coeff(const RVector &a, const RVector &x) { return a.size() == 0 ? 0.0 : a.dot(x); }

inline double coeff_norm(const HermitianCoeff &a, const PsdDomain &d) { return a.to_matrix(d.order).norm(); }
inline double coeff_norm(const RVector &a, const VectorDomain &) { return a.size() == 0 ? 0.0 : a.norm(); }

template <class Domain>
double cone_norm(const typename ConicProblem<Domain>::NormCone &c, const typename Domain::Point &x) {
  if constexpr (std::is_same_v<Domain, PsdDomain>) {
    return frobenius_norm(x);
  } else {
    RVector r = c.map.size() == 0 ? RVector(x) : RVector(c.map * x);
    if (c.shift.size() != 0) r += c.shift;
    return r.norm();
  }
}

template <class Domain> double objective_value(const ConicProblem<Domain> &pr, const typename Domain::Point &x) {
  double f = pr.constant + apply_coeff(pr.linear, x);
  for (const auto &l : pr.logs) {
    const double arg = apply_coeff(l.coeff, x) + l.offset;
    if (!(arg > 0.0)) return -std::numeric_limits<double>::infinity();
    f += l.weight * std::log(arg);
  }
  return f;
}

namespace detail {

/// H = diag(d) + sum_j c_j v_j v_j^T (+ dense), solved densely or by Woodbury.
struct NewtonSystem {
  RVector diag;
  std::vector<RVector> vecs;
  std::vector<double> coefs;
  RMatrix dense_add;

  explicit NewtonSystem(Eigen::Index n) : diag(RVector::Zero(n)) {}

  static long &fallbacks() {
    static long count = 0;
    return count;
  }

  void add_rank_one(double c, RVector v) {
    if (c == 0.0 || !std::isfinite(c)) return;
    coefs.push_back(c);
    vecs.push_back(std::move(v));
  }

  RVector apply(const RVector &x) const {
    RVector y = diag.cwiseProduct(x);
    for (std::size_t j = 0; j < vecs.size(); ++j) y.noalias() += (coefs[j] * vecs[j].dot(x)) * vecs[j];
    if (dense_add.size() != 0) y.noalias() += dense_add * x;
    return y;
  }

  bool use_dense(LinearSolve mode) const {
    if (mode == LinearSolve::dense) return true;
    if (dense_add.size() != 0 || (diag.array() <= 0.0).any()) return true;
    if (mode == LinearSolve::woodbury) return false;
    const Eigen::Index n = diag.size();
    return n <= 160 || static_cast<Eigen::Index>(vecs.size()) * 3 >= n;
  }

  bool solve(const RVector &rhs, RVector &x, LinearSolve mode) const {
    const Eigen::Index n = diag.size();
    if (use_dense(mode)) {
      RMatrix h = RMatrix(diag.asDiagonal());
      if (dense_add.size() != 0) h += dense_add;
      for (std::size_t j = 0; j < vecs.size(); ++j) h.noalias() += coefs[j] * (vecs[j] * vecs[j].transpose());
      Eigen::LDLT<RMatrix> ldlt(h);
      if (ldlt.info() != Eigen::Success) return false;
      x = ldlt.solve(rhs);
      return x.allFinite();
    }
    // D^{-1/2} H D^{-1/2} = I + Q M Q^T with Q an orthonormal basis of the
    // scaled rank-one vectors, so H^{-1} splits into the complement of Q
    // (unit curvature) and a small dense block; no large terms cancel.
    // Columns ordered by decreasing weight keep the small block graded.
    const auto r = static_cast<Eigen::Index>(vecs.size());
    const RVector dis = diag.cwiseSqrt().cwiseInverse();
    std::vector<std::size_t> order(vecs.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(coefs[a]) > std::abs(coefs[b]); });
    RMatrix u(n, r);
    RVector c(r);
    for (Eigen::Index j = 0; j < r; ++j) {
      const auto js = order[static_cast<std::size_t>(j)];
      u.col(j) = dis.cwiseProduct(vecs[js]);
      const double nrm = u.col(j).norm();
      if (nrm > 0.0) u.col(j) /= nrm;
      c(j) = coefs[js] * nrm * nrm;
    }
    Eigen::HouseholderQR<RMatrix> qr(u);
    const RMatrix q = qr.householderQ() * RMatrix::Identity(n, r);
    const RMatrix rt = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    RMatrix m = rt * c.asDiagonal() * rt.transpose();
    m.diagonal().array() += 1.0;
    Eigen::LDLT<RMatrix> small(m);
    if (small.info() != Eigen::Success) return false;
    auto base = [&](const RVector &b) -> RVector {
      const RVector bt = dis.cwiseProduct(b);
      const RVector qb = q.transpose() * bt;
      RVector y = bt - q * qb;
      y.noalias() += q * small.solve(qb);
      return dis.cwiseProduct(y);
    };
    x = base(rhs);
    const double rn = rhs.norm();
    double resn = 0.0;
    for (int it = 0; it < 3; ++it) {
      const RVector res = rhs - apply(x);
      resn = res.norm();
      if (resn <= 1e-12 * rn) break;
      x += base(res);
    }
    if (!(resn <= 1e-9 * rn) && mode == LinearSolve::automatic) {
      ++fallbacks();
      return solve(rhs, x, LinearSolve::dense);
    }
    return x.allFinite();
  }
};

template <class Domain> class BarrierSolver {
public:
  using Problem = ConicProblem<Domain>;
  using Point = typename Domain::Point;
  using Coeff = typename Domain::Coeff;
  using Solution = ConicSolution<Domain>;
  static constexpr bool kPsd = std::is_same_v<Domain, PsdDomain>;

  BarrierSolver(const Problem &pr, const SolverTolerances &tol) : pr_(pr), tol_(tol), n_(pr.domain.dim()) {}

  Solution run(const Point &init, bool feasibility_only = false) {
    Solution sol;
    if (!normalize(sol)) return finish(sol, init_point(init), SolveStatus::infeasible);
    Point x = init_point(init);
    double s = 0.0;
    if (!strictly_feasible(x, 1e-9)) {
      s = initial_relaxation(x);
      const int before = iters_;
      const bool ok = phase_one(x, s, sol);
      sol.phase1_iterations = iters_ - before;
      if (!ok) return finish(sol, x, sol.status);
    }
    if (feasibility_only) return finish(sol, x, SolveStatus::optimal);
    phase_two(x, sol);
    return finish(sol, x, sol.status);
  }

private:
  enum class Kind { log, slack };
  struct Row {
    Kind kind;
    Coeff coeff;
    double offset;
    double weight;
    int source;
  };
  struct Cone {
    Coeff coeff;
    double offset;
    double kappa;
    RMatrix map;
    RVector shift;
    int source;
  };

  // Per-iterate data in local coordinates.
  struct Local {
    RVector lam;  // PSD: eigenvalues of X
    CMatrix w;    // PSD: X = W W^H
    std::vector<RVector> g;
    std::vector<double> v;
    std::vector<RVector> gu;
    std::vector<double> u;
    std::vector<RVector> gz; // gradient of z/2, z = ||M x + d||^2
    std::vector<double> z;
    std::vector<RMatrix> hz; // vector domain: M^T M
    RVector hz_diag;         // PSD domain: shared identity-map metric
    RVector gc;
  };

  static constexpr double kPhaseOneExit = 1e-2;
  static constexpr double kMaxStep = 16.0;

  const Problem &pr_;
  SolverTolerances tol_;
  Eigen::Index n_;
  std::vector<Row> rows_;
  std::vector<Cone> cones_;
  Coeff linear_{};
  double constant_ = 0.0;
  int iters_ = 0;

  // ---- setup -------------------------------------------------------------

  bool normalize(Solution &sol) {
    linear_ = pr_.linear;
    if constexpr (!kPsd) {
      if (linear_.size() == 0) linear_ = RVector::Zero(n_);
    }
    constant_ = pr_.constant;
    for (std::size_t j = 0; j < pr_.logs.size(); ++j) {
      const auto &l = pr_.logs[j];
      const double nrm = coeff_norm(l.coeff, pr_.domain);
      if (nrm == 0.0) {
        if (!(l.offset > 0.0)) {
          sol.message = "log term " + std::to_string(j) + " has a non-positive constant argument";
          return false;
        }
        constant_ += l.weight * std::log(l.offset);
        continue;
      }
      Coeff a = l.coeff;
      scale(a, 1.0 / nrm);
      constant_ += l.weight * std::log(nrm);
      rows_.push_back({Kind::log, std::move(a), l.offset / nrm, l.weight, static_cast<int>(j)});
    }
    for (std::size_t j = 0; j < pr_.constraints.size(); ++j) {
      const auto &c = pr_.constraints[j];
      const double nrm = coeff_norm(c.coeff, pr_.domain);
      if (nrm == 0.0) {
        if (c.bound < 0.0) {
          sol.offending = static_cast<int>(j);
          sol.message = "linear constraint " + std::to_string(j) + " is a constant violation";
          return false;
        }
        continue;
      }
      Coeff a = c.coeff;
      scale(a, -1.0 / nrm);
      rows_.push_back({Kind::slack, std::move(a), c.bound / nrm, 1.0, static_cast<int>(j)});
    }
    const int off = static_cast<int>(pr_.constraints.size());
    for (std::size_t j = 0; j < pr_.cones.size(); ++j) {
      const auto &c = pr_.cones[j];
      if (c.kappa < 0.0 || !std::isfinite(c.kappa)) throw std::invalid_argument("cone kappa must be finite and >= 0");
      if constexpr (kPsd) {
        if (c.map.size() != 0 || c.shift.size() != 0)
          throw std::invalid_argument("PSD cones support only the Frobenius norm of X");
      }
      const double an = coeff_norm(c.coeff, pr_.domain);
      double mn = 1.0;
      if constexpr (!kPsd) {
        if (c.map.size() != 0) mn = c.map.norm();
      }
      const double nrm = an + c.kappa * mn;
      if (nrm == 0.0) {
        if (c.offset < 0.0) {
          sol.offending = off + static_cast<int>(j);
          sol.message = "cone " + std::to_string(j) + " is a constant violation";
          return false;
        }
        continue;
      }
      Cone k{c.coeff, c.offset / nrm, c.kappa / nrm, c.map, c.shift, off + static_cast<int>(j)};
      scale(k.coeff, 1.0 / nrm);
      if (k.kappa == 0.0) {
        // Plain half-space.
        rows_.push_back({Kind::slack, std::move(k.coeff), k.offset, 1.0, k.source});
        continue;
      }
      cones_.push_back(std::move(k));
    }
    return true;
  }

  static void scale(HermitianCoeff &a, double f) { a.scale(f); }
  static void scale(RVector &a, double f) { a *= f; }

  Point init_point(const Point &init) const {
    if constexpr (kPsd) {
      const int N = pr_.domain.order;
      if (init.rows() != N || init.cols() != N) return CMatrix::Identity(N, N) * 0.5;
      return hermitian_part(init);
    } else {
      if (init.size() != n_) return RVector::Zero(n_);
      return init;
    }
  }

  int degree(bool phase1) const {
    int m = 0;
    for (const Row &r : rows_)
      if (phase1 || r.kind == Kind::slack) ++m;
    m += 2 * static_cast<int>(cones_.size());
    if constexpr (kPsd) m += pr_.domain.order;
    if (phase1) m += 1;
    return std::max(m, 1);
  }

  // ---- local model ---------------------------------------------------------

  RVector local_gradient(const Local &loc, const HermitianCoeff &a) const {
    RVector g = RVector::Zero(n_);
    const int N = pr_.domain.order;
    if (a.identity != 0.0) g.head(N) += a.identity * loc.lam;
    for (const auto &t : a.outer) add_svec_outer(g, loc.w.adjoint() * t.second, t.first);
    if (a.dense.size() != 0) g += svec(loc.w.adjoint() * a.dense * loc.w);
    return g;
  }
  RVector local_gradient(const Local &, const RVector &a) const { return a; }

  double value_of(const Local &loc, const RVector &g, const Point &x, const Coeff &a) const {
    if constexpr (kPsd) {
      (void)x;
      (void)a;
      return g.head(pr_.domain.order).sum();
    } else {
      (void)loc;
      (void)g;
      return a.dot(x);
    }
  }

  bool build_local(const Point &x, Local &loc) const {
    if constexpr (kPsd) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
      if (es.info() != Eigen::Success) return false;
      loc.lam = es.eigenvalues();
      if (!(loc.lam.minCoeff() > 0.0)) return false;
      loc.w = es.eigenvectors() * loc.lam.cwiseSqrt().asDiagonal();
      loc.hz_diag = svec_outer_weights(loc.lam);
    }
    loc.g.resize(rows_.size());
    loc.v.resize(rows_.size());
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      loc.g[j] = local_gradient(loc, rows_[j].coeff);
      loc.v[j] = value_of(loc, loc.g[j], x, rows_[j].coeff) + rows_[j].offset;
    }
    loc.gu.resize(cones_.size());
    loc.u.resize(cones_.size());
    loc.gz.resize(cones_.size());
    loc.z.resize(cones_.size());
    if constexpr (!kPsd) loc.hz.resize(cones_.size());
    for (std::size_t j = 0; j < cones_.size(); ++j) {
      const Cone &c = cones_[j];
      loc.gu[j] = local_gradient(loc, c.coeff);
      loc.u[j] = value_of(loc, loc.gu[j], x, c.coeff) + c.offset;
      if constexpr (kPsd) {
        const RVector l2 = loc.lam.cwiseAbs2();
        loc.gz[j] = svec_diagonal(l2);
        loc.z[j] = l2.sum();
      } else {
        RVector r = c.map.size() == 0 ? RVector(x) : RVector(c.map * x);
        if (c.shift.size() != 0) r += c.shift;
        loc.z[j] = r.squaredNorm();
        if (c.map.size() == 0) {
          loc.gz[j] = r;
          loc.hz[j] = RMatrix::Identity(n_, n_);
        } else {
          loc.gz[j] = c.map.transpose() * r;
          loc.hz[j] = c.map.transpose() * c.map;
        }
      }
    }
    loc.gc = local_gradient(loc, linear_);
    return true;
  }

  bool strictly_feasible(const Point &x, double margin) const {
    Local loc;
    if (!build_local(x, loc)) return false;
    // A nearly singular start (e.g. a rank-one warm start) loses definiteness
    // to rounding on the first step; such points go through phase one.
    if constexpr (kPsd)
      if (!(loc.lam.minCoeff() > 1e-10 * loc.lam.maxCoeff())) return false;
    for (std::size_t j = 0; j < rows_.size(); ++j)
      if (!(loc.v[j] > margin)) return false;
    for (std::size_t j = 0; j < cones_.size(); ++j)
      if (!(loc.u[j] - cones_[j].kappa * std::sqrt(loc.z[j]) > margin)) return false;
    return true;
  }

  double initial_relaxation(Point &x) const {
    if constexpr (kPsd) {
      const int N = pr_.domain.order;
      const RVector ev = hermitian_eigenvalues(x);
      const double sc = std::max(1e-3, std::abs(x.diagonal().real().sum()) / N);
      const double shift = std::max(0.0, -ev.minCoeff()) + 1e-2 * sc;
      x += shift * CMatrix::Identity(N, N);
    }
    Local loc;
    build_local(x, loc);
    double worst = 0.0;
    for (double v : loc.v) worst = std::max(worst, -v);
    for (std::size_t j = 0; j < cones_.size(); ++j)
      worst = std::max(worst, cones_[j].kappa * std::sqrt(loc.z[j]) - loc.u[j]);
    return worst + 0.1 * (1.0 + worst);
  }

  // u^2 - k^2 z evaluated without cancellation near the cone boundary.
  static double cone_q(double u, double kappa, double z) {
    const double r = kappa * std::sqrt(std::max(z, 0.0));
    return (u - r) * (u + r);
  }

  // Smallest tau > 0 with a tau^2 + b tau + c = 0 given c > 0; +inf if none.
  static double first_positive_root(double a, double b, double c) {
    const double inf = std::numeric_limits<double>::infinity();
    if (a == 0.0) return b < 0.0 ? -c / b : inf;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return inf;
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    double best = inf;
    for (double r : {qq / a, qq != 0.0 ? c / qq : inf})
      if (r > 0.0 && r < best) best = r;
    return best;
  }

  // ---- Newton machinery --------------------------------------------------------

  // Assembles gradient and Hessian of t*obj + barrier at (x, s). In phase one
  // the local vector carries s as its last coordinate.
  void assemble(const Local &loc, double t, bool phase1, double s, RVector &grad, NewtonSystem &hs) const {
    const Eigen::Index nl = n_ + (phase1 ? 1 : 0);
    grad = RVector::Zero(nl);
    hs = NewtonSystem(nl);
    auto ext = [&](const RVector &g, double sc) {
      RVector e(nl);
      e.head(n_) = g;
      if (phase1) e(n_) = sc;
      return e;
    };
    if constexpr (kPsd) {
      grad.head(pr_.domain.order).array() -= 1.0;
      hs.diag.head(n_).array() += 1.0;
    }
    if (phase1) {
      grad(n_) += t;
      const double den = 1.0 + s;
      grad(n_) -= 1.0 / den;
      hs.diag(n_) += 1.0 / (den * den);
    } else {
      grad.head(n_) -= t * loc.gc;
    }
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const Row &r = rows_[j];
      if (phase1) {
        const double v = loc.v[j] + s;
        RVector e = ext(loc.g[j], 1.0);
        grad -= e / v;
        hs.add_rank_one(1.0 / (v * v), std::move(e));
      } else if (r.kind == Kind::log) {
        const double v = loc.v[j];
        const double c = t * r.weight;
        grad.head(n_) -= (c / v) * loc.g[j];
        hs.add_rank_one(c / (v * v), ext(loc.g[j], 0.0));
      } else {
        const double v = loc.v[j];
        grad.head(n_) -= loc.g[j] / v;
        hs.add_rank_one(1.0 / (v * v), ext(loc.g[j], 0.0));
      }
    }
    for (std::size_t j = 0; j < cones_.size(); ++j) {
      const double k2 = cones_[j].kappa * cones_[j].kappa;
      const double u = loc.u[j] + (phase1 ? s : 0.0);
      const double q = cone_q(u, cones_[j].kappa, loc.z[j]);
      const RVector gu = ext(loc.gu[j], 1.0);
      const RVector gq = 2.0 * u * gu - 2.0 * k2 * ext(loc.gz[j], 0.0);
      grad -= gq / q;
      hs.add_rank_one(1.0 / (q * q), gq);
      hs.add_rank_one(-2.0 / q, gu);
      if constexpr (kPsd) {
        hs.diag.head(n_) += (2.0 * k2 / q) * loc.hz_diag;
      } else {
        if (hs.dense_add.size() == 0) hs.dense_add = RMatrix::Zero(nl, nl);
        hs.dense_add.topLeftCorner(n_, n_) += (2.0 * k2 / q) * loc.hz[j];
      }
    }
  }

  // Change of the barrier objective along a local direction, +inf when the
  // trial point leaves the domain.
  struct LineData {
    std::vector<double> dv;
    std::vector<double> du, dz1, dz2;
    RVector mu; // PSD: eigenvalues of the local direction
    double dc = 0.0;
    double ds = 0.0;
  };

  LineData line_data(const Local &loc, const RVector &d, bool phase1) const {
    LineData ld;
    const auto dx = d.head(n_);
    ld.ds = phase1 ? d(n_) : 0.0;
    ld.dv.resize(rows_.size());
    for (std::size_t j = 0; j < rows_.size(); ++j) ld.dv[j] = loc.g[j].dot(dx) + (phase1 ? ld.ds : 0.0);
    ld.du.resize(cones_.size());
    ld.dz1.resize(cones_.size());
    ld.dz2.resize(cones_.size());
    for (std::size_t j = 0; j < cones_.size(); ++j) {
      ld.du[j] = loc.gu[j].dot(dx) + (phase1 ? ld.ds : 0.0);
      ld.dz1[j] = loc.gz[j].dot(dx);
      if constexpr (kPsd) ld.dz2[j] = dx.dot(loc.hz_diag.cwiseProduct(dx));
      else ld.dz2[j] = dx.dot(loc.hz[j] * dx);
    }
    ld.dc = loc.gc.dot(dx);
    if constexpr (kPsd) ld.mu = hermitian_eigenvalues(smat(RVector(dx)));
    return ld;
  }

  double max_step(const Local &loc, const LineData &ld, bool phase1, double s) const {
    double tmax = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const double v = loc.v[j] + (phase1 ? s : 0.0);
      if (ld.dv[j] < 0.0) tmax = std::min(tmax, -v / ld.dv[j]);
    }
    for (std::size_t j = 0; j < cones_.size(); ++j) {
      const double u = loc.u[j] + (phase1 ? s : 0.0);
      if (ld.du[j] < 0.0) tmax = std::min(tmax, -u / ld.du[j]);
      // first positive root of q(tau) = a tau^2 + b tau + q0
      const double k2 = cones_[j].kappa * cones_[j].kappa;
      const double q0 = cone_q(u, cones_[j].kappa, loc.z[j]);
      const double a = ld.du[j] * ld.du[j] - k2 * ld.dz2[j];
      const double b = 2.0 * (u * ld.du[j] - k2 * ld.dz1[j]);
      const double root = first_positive_root(a, b, q0);
      if (root > 0.0) tmax = std::min(tmax, root);
    }
    if (phase1 && ld.ds < 0.0) tmax = std::min(tmax, -(1.0 + s) / ld.ds);
    if constexpr (kPsd) {
      const double mn = ld.mu.minCoeff();
      if (mn < 0.0) tmax = std::min(tmax, -1.0 / mn);
    }
    return tmax;
  }

  double delta_psi(const Local &loc, const LineData &ld, double tau, double t, bool phase1, double s) const {
    const double inf = std::numeric_limits<double>::infinity();
    double acc = 0.0;
    if (phase1) {
      acc += t * tau * ld.ds;
      const double r = tau * ld.ds / (1.0 + s);
      if (!(r > -1.0)) return inf;
      acc -= std::log1p(r);
    } else {
      acc -= t * tau * ld.dc;
    }
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const double v = loc.v[j] + (phase1 ? s : 0.0);
      const double r = tau * ld.dv[j] / v;
      if (!(r > -1.0)) return inf;
      const double w = (!phase1 && rows_[j].kind == Kind::log) ? t * rows_[j].weight : 1.0;
      acc -= w * std::log1p(r);
    }
    for (std::size_t j = 0; j < cones_.size(); ++j) {
      const double k2 = cones_[j].kappa * cones_[j].kappa;
      const double u = loc.u[j] + (phase1 ? s : 0.0);
      const double q = cone_q(u, cones_[j].kappa, loc.z[j]);
      const double u1 = u + tau * ld.du[j];
      if (!(u1 > 0.0)) return inf;
      const double z1 = loc.z[j] + 2.0 * tau * ld.dz1[j] + tau * tau * ld.dz2[j];
      const double q1 = cone_q(u1, cones_[j].kappa, z1);
      if (!(q1 > 0.0)) return inf;
      const double dq =
          2.0 * u * ld.du[j] * tau + ld.du[j] * ld.du[j] * tau * tau - k2 * (2.0 * tau * ld.dz1[j] + tau * tau * ld.dz2[j]);
      const double r = dq / q;
      acc -= std::abs(r) < 1e-3 ? std::log1p(r) : std::log(q1 / q);
    }
    if constexpr (kPsd) {
      for (Eigen::Index i = 0; i < ld.mu.size(); ++i) {
        const double r = tau * ld.mu(i);
        if (!(r > -1.0)) return inf;
        acc -= std::log1p(r);
      }
    }
    return acc;
  }

  // Derivative of delta_psi in tau (valid inside the domain).
  double dpsi(const Local &loc, const LineData &ld, double tau, double t, bool phase1, double s) const {
    double acc = 0.0;
    if (phase1) acc += t * ld.ds - ld.ds / (1.0 + s + tau * ld.ds);
    else acc -= t * ld.dc;
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const double v = loc.v[j] + (phase1 ? s : 0.0);
      const double w = (!phase1 && rows_[j].kind == Kind::log) ? t * rows_[j].weight : 1.0;
      acc -= w * ld.dv[j] / (v + tau * ld.dv[j]);
    }
    for (std::size_t j = 0; j < cones_.size(); ++j) {
      const double k2 = cones_[j].kappa * cones_[j].kappa;
      const double u = loc.u[j] + (phase1 ? s : 0.0) + tau * ld.du[j];
      const double z = loc.z[j] + 2.0 * tau * ld.dz1[j] + tau * tau * ld.dz2[j];
      const double q = cone_q(u, cones_[j].kappa, z);
      const double dq = 2.0 * u * ld.du[j] - k2 * (2.0 * ld.dz1[j] + 2.0 * tau * ld.dz2[j]);
      acc -= dq / q;
    }
    if constexpr (kPsd) {
      for (Eigen::Index i = 0; i < ld.mu.size(); ++i) acc -= ld.mu(i) / (1.0 + tau * ld.mu(i));
    }
    return acc;
  }

  // Minimizes the convex restriction of the barrier objective on
  // [0, min(kMaxStep, 0.995 tmax)] by bisection on its derivative.
  double exact_step(const Local &loc, const LineData &ld, double tmax, double t, bool phase1, double s) const {
    double hi = std::min(kMaxStep, 0.995 * tmax);
    if (!(hi > 0.0)) return 0.0;
    if (dpsi(loc, ld, hi, t, phase1, s) <= 0.0) return hi;
    double lo = 0.0;
    for (int it = 0; it < 40 && hi - lo > 1e-6 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (dpsi(loc, ld, mid, t, phase1, s) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  void move(Point &x, const Local &loc, const RVector &d, double tau) const {
    if constexpr (kPsd) {
      const CMatrix step = loc.w * smat(RVector(d.head(n_))) * loc.w.adjoint();
      x = hermitian_part(x + tau * step);
    } else {
      (void)loc;
      x += tau * d.head(n_);
    }
  }

  enum class CenterResult { centered, stalled, budget, numerical };

  // Newton centering of t*obj + barrier; s is the phase-one relaxation.
  CenterResult center(Point &x, double &s, double t, bool phase1, double decrement_tol) {
    int stalls = 0;
    while (true) {
      if (iters_ >= tol_.max_iters) return CenterResult::budget;
      Local loc;
      if (!build_local(x, loc)) return CenterResult::numerical;
      RVector grad;
      NewtonSystem hs(0);
      assemble(loc, t, phase1, s, grad, hs);
      RVector d;
      if (!hs.solve(-grad, d, tol_.linear_solve)) return CenterResult::numerical;
      const double lam2 = -grad.dot(d);
      ++iters_;
      if (!(lam2 >= 0.0)) return CenterResult::numerical;
      if (lam2 * 0.5 <= decrement_tol) return CenterResult::centered;
      const LineData ld = line_data(loc, d, phase1);
      const double tmax = max_step(loc, ld, phase1, s);
      double tau = exact_step(loc, ld, tmax, t, phase1, s);
      const double slope = grad.dot(d);
      bool accepted = false;
      while (tau > 1e-14) {
        const double dp = delta_psi(loc, ld, tau, t, phase1, s);
        if (dp <= 0.01 * tau * slope) {
          accepted = true;
          break;
        }
        tau *= 0.5;
      }
      if (!accepted) {
        if (++stalls >= 2) return CenterResult::stalled;
        continue;
      }
      move(x, loc, d, tau);
      if (phase1) {
        s += tau * d(n_);
        if (s <= -kPhaseOneExit) return CenterResult::centered;
      }
    }
  }

  bool phase_one(Point &x, double &s, Solution &sol) {
    const int m = degree(true);
    double t = m / (1.0 + s);
    while (true) {
      const CenterResult cr = center(x, s, t, true, 1e-5);
      const double gap = m / t;
      if (s < 0.0 && (gap <= 0.5 * std::abs(s) || s <= -kPhaseOneExit || cr == CenterResult::stalled)) return true;
      if (cr == CenterResult::budget) {
        sol.status = SolveStatus::infeasible;
        sol.message = "no strictly feasible point found within the iteration budget";
        return false;
      }
      if (cr == CenterResult::numerical) {
        sol.status = SolveStatus::numerical_error;
        sol.message = "numerical breakdown while searching for a feasible point";
        return false;
      }
      if (s - gap > 0.0 || (gap < 1e-13 && s >= -1e-13) || cr == CenterResult::stalled) {
        sol.status = SolveStatus::infeasible;
        sol.message = "constraints admit no strictly feasible point";
        return false;
      }
      t *= tol_.barrier_growth;
    }
  }

  void phase_two(Point &x, Solution &sol) {
    const int m = degree(false);
    double t = 1.0;
    double unused = 0.0;
    while (true) {
      const CenterResult cr = center(x, unused, t, false, 1e-5);
      sol.gap = m / t;
      if (cr == CenterResult::numerical) {
        sol.status = SolveStatus::numerical_error;
        sol.message = "numerical breakdown in Newton step";
        return;
      }
      if (cr == CenterResult::budget) {
        sol.status = SolveStatus::max_iters;
        sol.message = "iteration budget exhausted";
        return;
      }
      const double target = tol_.obj_tol * std::max(1.0, std::abs(objective_value(pr_, x)));
      if (sol.gap <= target || cr == CenterResult::stalled) {
        const CenterResult fin = cr == CenterResult::stalled ? cr : center(x, unused, t, false, 1e-10);
        if (fin == CenterResult::numerical) {
          sol.status = SolveStatus::numerical_error;
          sol.message = "numerical breakdown in Newton step";
        } else if (sol.gap <= target) {
          sol.status = SolveStatus::optimal;
        } else if (sol.gap <= std::sqrt(tol_.obj_tol) * std::max(1.0, std::abs(objective_value(pr_, x)))) {
          sol.status = SolveStatus::optimal;
          sol.message = "line search stalled near the optimum";
        } else {
          sol.status = SolveStatus::numerical_error;
          sol.message = "line search stalled";
        }
        return;
      }
      t *= tol_.barrier_growth;
    }
  }

  Solution &finish(Solution &sol, const Point &x, SolveStatus st) {
    sol.value = x;
    sol.status = st;
    sol.iterations = iters_;
    sol.objective = objective_value(pr_, x);
    sol.residuals.assign(static_cast<std::size_t>(pr_.num_constraints()), 0.0);
    for (std::size_t j = 0; j < pr_.constraints.size(); ++j) {
      const auto &c = pr_.constraints[j];
      const double nrm = std::max(coeff_norm(c.coeff, pr_.domain), 1e-300);
      sol.residuals[j] = std::max(0.0, (apply_coeff(c.coeff, x) - c.bound) / nrm);
    }
    for (std::size_t j = 0; j < pr_.cones.size(); ++j) {
      const auto &c = pr_.cones[j];
      double mn = 1.0;
      if constexpr (!kPsd) {
        if (c.map.size() != 0) mn = c.map.norm();
      }
      const double nrm = std::max(coeff_norm(c.coeff, pr_.domain) + c.kappa * mn, 1e-300);
      const double viol = c.kappa * cone_norm<Domain>(c, x) - apply_coeff(c.coeff, x) - c.offset;
      sol.residuals[pr_.constraints.size() + j] = std::max(0.0, viol / nrm);
    }
    if (sol.status == SolveStatus::infeasible && sol.offending < 0) {
      double worst = -1.0;
      for (std::size_t j = 0; j < sol.residuals.size(); ++j)
        if (sol.residuals[j] > worst) {
          worst = sol.residuals[j];
          sol.offending = static_cast<int>(j);
        }
    }
    if (sol.status == SolveStatus::optimal && sol.max_residual() > tol_.feas_tol) {
      sol.status = SolveStatus::numerical_error;
      sol.message = "final point violates a constraint beyond feas_tol";
    }
    return sol;
  }
};

} // namespace detail

/// Maximizes the problem from `init` (any point; a strictly feasible one
/// skips the feasibility phase).
template <class Domain>
ConicSolution<Domain> solve(const ConicProblem<Domain> &problem, const typename Domain::Point &init,
                            const SolverTolerances &tol = {}) {
  detail::BarrierSolver<Domain> bs(problem, tol);
  return bs.run(init);
}

/// Strictly feasible point of the constraint set, ignoring the objective.
/// On failure the returned value is the most nearly feasible point found.
template <class Domain>
ConicSolution<Domain> find_feasible(const ConicProblem<Domain> &problem, const typename Domain::Point &init,
                                    const SolverTolerances &tol = {}) {
  detail::BarrierSolver<Domain> bs(problem, tol);
  return bs.run(init, true);
}

// ---- problem dump ----------------------------------------------------------

namespace detail {
inline void dump_coeff(std::ostream &os, const HermitianCoeff &a, int order) {
  const CMatrix m = a.to_matrix(order);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << (j ? "," : "") << m(i, j).real() << ',' << m(i, j).imag();
    os << '\n';
  }
}
inline void dump_coeff(std::ostream &os, const RVector &a, int) {
  for (Eigen::Index i = 0; i < a.size(); ++i) os << (i ? "," : "") << a(i);
  os << '\n';
}
template <class Domain> int order_of(const Domain &d) {
  if constexpr (std::is_same_v<Domain, PsdDomain>) return d.order;
  else return d.size;
}
} // namespace detail

/// Plain-text dump; matrices are row-major with interleaved real,imag columns.
template <class Domain> void dump_problem(const ConicProblem<Domain> &pr, std::ostream &os) {
  const int ord = detail::order_of(pr.domain);
  os.precision(17);
  os << "domain " << (std::is_same_v<Domain, PsdDomain> ? "psd " : "vector ") << ord << '\n';
  os << "constant " << pr.constant << "\nlinear\n";
  detail::dump_coeff(os, pr.linear, ord);
  for (std::size_t j = 0; j < pr.logs.size(); ++j) {
    os << "log " << j << " weight " << pr.logs[j].weight << " offset " << pr.logs[j].offset << '\n';
    detail::dump_coeff(os, pr.logs[j].coeff, ord);
  }
  for (std::size_t j = 0; j < pr.constraints.size(); ++j) {
    os << "linear_le " << j << " bound " << pr.constraints[j].bound << '\n';
    detail::dump_coeff(os, pr.constraints[j].coeff, ord);
  }
  for (std::size_t j = 0; j < pr.cones.size(); ++j) {
    const auto &c = pr.cones[j];
    os << "cone " << j << " offset " << c.offset << " kappa " << c.kappa << '\n';
    detail::dump_coeff(os, c.coeff, ord);
    if (c.map.size() != 0) {
      os << "map\n";
      for (Eigen::Index i = 0; i < c.map.rows(); ++i) detail::dump_coeff(os, RVector(c.map.row(i).transpose()), ord);
    }
    if (c.shift.size() != 0) {
      os << "shift\n";
      detail::dump_coeff(os, c.shift, ord);
    }
  }
}

} // namespace rms_swipt

#endif // RMS_SWIPT_SOLVER_HPP
