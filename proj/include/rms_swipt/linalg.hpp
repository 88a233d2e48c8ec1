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

#ifndef RMS_SWIPT_LINALG_HPP
#define RMS_SWIPT_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace rms_swipt {

using cplx = std::complex<double>;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

/// Real inner product <A, B> = Re tr(A B^H); equals tr(AB) for Hermitian operands.
inline double inner(const CMatrix &a, const CMatrix &b) {
  return (a.array() * b.array().conjugate()).real().sum();
}

/// tr(A X) for Hermitian A, X.
inline double trace_product(const CMatrix &a, const CMatrix &x) { return inner(a, x); }

inline double frobenius_norm(const CMatrix &x) { return x.norm(); }

inline CMatrix hermitian_part(const CMatrix &x) { return 0.5 * (x + x.adjoint()); }

inline bool is_hermitian(const CMatrix &x, double tol = 1e-12) {
  if (x.rows() != x.cols()) return false;
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  return (x - x.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Rotates v so that its largest-magnitude entry (lowest index on ties) is real positive.
inline void fix_phase(CVector &v) {
  if (v.size() == 0) return;
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v[best]) / best_abs;
}

struct DominantEigen {
  double value = 0.0;
  CVector vector;
  /// Top two eigenvalues coincide to within the degeneracy tolerance.
  bool degenerate = false;
};

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector under the
/// canonical phase convention.
inline DominantEigen dominant_eigen(const CMatrix &x, double degeneracy_tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x));
  if (es.info() != Eigen::Success) throw std::runtime_error("dominant_eigen: eigensolver failed");
  const Eigen::Index n = x.rows();
  DominantEigen out;
  out.value = es.eigenvalues()[n - 1];
  out.vector = es.eigenvectors().col(n - 1);
  fix_phase(out.vector);
  if (n > 1) {
    const double gap = es.eigenvalues()[n - 1] - es.eigenvalues()[n - 2];
    out.degenerate = gap <= degeneracy_tol * std::max(1.0, std::abs(out.value));
  }
  return out;
}

inline RVector hermitian_eigenvalues(const CMatrix &x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
inline double spectral_norm(const CMatrix &x) {
  const RVector ev = hermitian_eigenvalues(x);
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

// Orthonormal real coordinates of the space of N x N Hermitian matrices:
// diagonal entries first, then sqrt(2) Re / sqrt(2) Im of each strictly upper
// entry in row-major order. With this layout svec(A).dot(svec(B)) == tr(AB).

inline Eigen::Index svec_size(Eigen::Index order) { return order * order; }

inline RVector svec(const CMatrix &x) {
  const Eigen::Index n = x.rows();
  RVector v(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) v[k++] = x(i, i).real();
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      v[k++] = r2 * x(i, j).real();
      v[k++] = r2 * x(i, j).imag();
    }
  return v;
}

inline CMatrix smat(const RVector &v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) throw std::invalid_argument("smat: length is not a perfect square");
  CMatrix x(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) x(i, i) = v[k++];
  const double r2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx z(r2 * v[k], r2 * v[k + 1]);
      k += 2;
      x(i, j) = z;
      x(j, i) = std::conj(z);
    }
  return x;
}

/// svec of the diagonal matrix diag(d).
inline RVector svec_diagonal(const RVector &d) {
  const Eigen::Index n = d.size();
  RVector v = RVector::Zero(n * n);
  v.head(n) = d;
  return v;
}

/// Per-coordinate products d_i d_j matching the svec layout.
inline RVector svec_outer_weights(const RVector &d) {
  const Eigen::Index n = d.size();
  RVector w(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) w[k++] = d[i] * d[i];
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      w[k++] = d[i] * d[j];
      w[k++] = d[i] * d[j];
    }
  return w;
}

/// Adds s * svec(v v^H) to out.
inline void add_svec_outer(RVector &out, const CVector &v, double s) {
  const Eigen::Index n = v.size();
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out[k++] += s * std::norm(v[i]);
  const double r2 = s * std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx z = v[i] * std::conj(v[j]);
      out[k++] += r2 * z.real();
      out[k++] += r2 * z.imag();
    }
}

/// Negative eigenvalues clipped to zero.
inline CMatrix project_psd(const CMatrix &x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x));
  if (es.info() != Eigen::Success) throw std::runtime_error("project_psd: eigensolver failed");
  const RVector lam = es.eigenvalues().cwiseMax(0.0);
  const CMatrix v = es.eigenvectors();
  return hermitian_part(v * lam.asDiagonal() * v.adjoint());
}

} // namespace rms_swipt

#endif // RMS_SWIPT_LINALG_HPP
