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

#ifndef RMS_SWIPT_CHANNEL_HPP
#define RMS_SWIPT_CHANNEL_HPP

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "linalg.hpp"
#include "scenario.hpp"

namespace rms_swipt {

using NormalDist = boost::random::normal_distribution<double>;

/// UPA steering vector, x-ramp Kronecker z-ramp, element (nx, nz) at index nx*N_z + nz.
inline CVector upa_steering(const UserGeometry &g, int nx, int nz, double d, double lambda) {
  if (nx < 1 || nz < 1) throw std::invalid_argument("upa_steering: array dimensions must be >= 1");
  const double k = 2.0 * kPi / lambda * d * std::sin(g.aod_vertical);
  const double ux = k * std::cos(g.aod_horizontal);
  const double uz = k * std::sin(g.aod_horizontal);
  CVector a(nx * nz);
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz)
      a(ix * nz + iz) = std::polar(1.0, -(ux * ix + uz * iz));
  return a;
}

inline double large_scale_gain(const UserGeometry &g, const ScenarioConfig &c) {
  return c.reference_gain * std::pow(g.distance / c.reference_distance, -c.pathloss_exponent);
}

/// Standard complex Gaussian entry, CN(0,1).
inline cplx complex_normal(Rng &rng, NormalDist &nd) {
  const double s = std::sqrt(0.5);
  const double re = nd(rng);
  const double im = nd(rng);
  return {s * re, s * im};
}

inline CVector rician_channel(const UserGeometry &g, const ScenarioConfig &c, Rng &rng) {
  if (!(g.distance > 0.0)) throw std::domain_error("rician_channel: distance must be positive");
  const int n = c.num_elements();
  const CVector los = upa_steering(g, c.elements_x, c.elements_z, c.element_spacing, c.wavelength);
  NormalDist nd;
  CVector nlos(n);
  for (int i = 0; i < n; ++i) nlos(i) = complex_normal(rng, nd);
  double w_los = 1.0, w_nlos = 0.0;
  if (std::isfinite(c.rician_factor)) {
    w_los = std::sqrt(c.rician_factor / (c.rician_factor + 1.0));
    w_nlos = std::sqrt(1.0 / (c.rician_factor + 1.0));
  }
  return std::sqrt(large_scale_gain(g, c)) * (w_los * los + w_nlos * nlos);
}

inline CMatrix covariance(const CVector &h) { return h * h.adjoint(); }

/// Draws the entries of a Hermitian error matrix in a fixed order and hands
/// each (row, col, value) with row <= col to `sink`. The diagonal is real
/// N(0, var); each upper entry has real and imaginary parts N(0, var/2).
template <class Sink> void draw_error_entries(int n, double stddev, Rng &rng, NormalDist &nd, Sink &&sink) {
  const double s_off = stddev * std::sqrt(0.5);
  for (int i = 0; i < n; ++i) {
    sink(i, i, cplx(stddev * nd(rng), 0.0));
    for (int j = i + 1; j < n; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      sink(i, j, cplx(s_off * re, s_off * im));
    }
  }
}

inline CMatrix sample_error_matrix(int n, double variance, Rng &rng) {
  if (!(variance >= 0.0)) throw std::invalid_argument("sample_error_matrix: variance must be non-negative");
  NormalDist nd;
  CMatrix x(n, n);
  draw_error_entries(n, std::sqrt(variance), rng, nd, [&](int i, int j, cplx v) {
    x(i, j) = v;
    x(j, i) = std::conj(v);
  });
  return x;
}

/// Precomputed weights turning an error draw into tr(X F) without forming X.
class ErrorTraceSampler {
public:
  ErrorTraceSampler(const CMatrix &f, double variance) : n_(static_cast<int>(f.rows())), sd_(std::sqrt(variance)) {
    diag_.resize(n_);
    upper_.reserve(static_cast<std::size_t>(n_ * (n_ - 1)));
    for (int i = 0; i < n_; ++i) {
      diag_[i] = f(i, i).real();
      for (int j = i + 1; j < n_; ++j) {
        // X_ij F_ji + X_ji F_ij = 2 Re(X_ij F_ji)
        upper_.push_back(2.0 * f(j, i).real());
        upper_.push_back(-2.0 * f(j, i).imag());
      }
    }
  }

  /// Same stream consumption as sample_error_matrix(n, variance, rng).
  double operator()(Rng &rng, NormalDist &nd) const {
    const double s_off = sd_ * std::sqrt(0.5);
    double acc_d = 0.0, acc_o = 0.0;
    std::size_t t = 0;
    for (int i = 0; i < n_; ++i) {
      acc_d += diag_[i] * nd(rng);
      for (int j = i + 1; j < n_; ++j) {
        const double re = nd(rng);
        const double im = nd(rng);
        acc_o += upper_[t] * re + upper_[t + 1] * im;
        t += 2;
      }
    }
    return sd_ * acc_d + s_off * acc_o;
  }

private:
  int n_;
  double sd_;
  std::vector<double> diag_;
  std::vector<double> upper_;
};

struct ChannelSet {
  std::vector<UserGeometry> geometry;
  std::vector<CVector> h;
  std::vector<CMatrix> phi;
  double error_variance = 0.0;

  int num_users() const { return static_cast<int>(h.size()); }
  int num_elements() const { return h.empty() ? 0 : static_cast<int>(h.front().size()); }
};

inline ChannelSet make_channel_set(std::vector<UserGeometry> geometry, const ScenarioConfig &c, Rng &rng) {
  ChannelSet cs;
  cs.geometry = std::move(geometry);
  cs.error_variance = c.error_variance;
  for (const UserGeometry &g : cs.geometry) {
    cs.h.push_back(rician_channel(g, c, rng));
    cs.phi.push_back(covariance(cs.h.back()));
  }
  return cs;
}

/// Geometry and channels for repetition `rep` of a config; identical for
/// every algorithm evaluated at that repetition.
inline ChannelSet draw_scenario(const ScenarioConfig &c, std::uint64_t rep = 0) {
  c.validate();
  Rng geo = make_rng(c.rng_seed, rep, 1);
  Rng fad = make_rng(c.rng_seed, rep, 2);
  return make_channel_set(sample_user_positions(c, geo), c, fad);
}

inline void write_channel_csv(const ChannelSet &cs, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write channel dump '" + path + "'");
  out.precision(17);
  out << "user,element,re,im\n";
  for (int k = 0; k < cs.num_users(); ++k)
    for (int n = 0; n < cs.num_elements(); ++n)
      out << k << ',' << n << ',' << cs.h[k](n).real() << ',' << cs.h[k](n).imag() << '\n';
}

} // namespace rms_swipt

#endif // RMS_SWIPT_CHANNEL_HPP
