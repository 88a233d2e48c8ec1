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

#ifndef RMS_SWIPT_SCENARIO_HPP
#define RMS_SWIPT_SCENARIO_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "energy.hpp"
#include "linalg.hpp"
#include "solver.hpp"

namespace rms_swipt {

using Vec3 = std::array<double, 3>;
using Rng = std::mt19937_64;

/// Per-user noise levels, outage targets and harvesting circuit.
struct UserParams {
  double antenna_noise = 1e-8;          ///< sigma_k^2, watts
  std::optional<double> id_noise;       ///< delta_k^2, watts; defaults to antenna_noise
  double id_outage_target = 0.1;        ///< zeta_k
  double eh_outage_target = 0.1;        ///< epsilon_k
  EhParams eh;

  double id_noise_value() const { return id_noise ? *id_noise : antenna_noise; }
};

struct ScenarioConfig {
  int num_users = 4;
  int elements_x = 4;
  int elements_z = 4;
  double wavelength = 0.1;
  double element_spacing = 0.05;
  Vec3 transceiver_position{0.0, 0.0, 15.0};
  Vec3 user_disk_center{0.0, 0.0, 0.0};
  double user_disk_radius = 50.0;

  double pathloss_exponent = 3.0;
  double reference_gain = 0.01;
  double reference_distance = 1.0;
  double rician_factor = 1.9952623149688795; // 3 dB

  double max_power = 1.0;
  double sinr_threshold = 1e-3;
  double energy_threshold = 1e-7;
  double error_variance = 1e-15;

  UserParams default_user;
  std::vector<UserParams> users; ///< empty, or one entry per user

  double convergence_threshold = 1e-3;
  int max_ao_iterations = 50;
  double penalty_init = 1e-2;
  double penalty_growth = 5.0;
  double penalty_max = 1e6;
  double rank_tol = 1e-6; ///< relative to tr(F)
  int max_penalty_steps = 40;
  SolverTolerances solver;

  std::uint64_t rng_seed = 1;

  int num_elements() const { return elements_x * elements_z; }
  const UserParams &user(int k) const {
    return users.empty() ? default_user : users.at(static_cast<std::size_t>(k));
  }
  double error_stddev() const { return std::sqrt(error_variance); }

  void validate() const {
    auto fail = [](const std::string &m) { throw std::invalid_argument("ScenarioConfig: " + m); };
    if (num_users < 1) fail("num_users must be >= 1");
    if (elements_x < 1 || elements_z < 1) fail("elements_x and elements_z must be >= 1");
    if (!(max_power > 0.0)) fail("max_power must be positive");
    if (!(wavelength > 0.0) || !(element_spacing > 0.0)) fail("wavelength and element_spacing must be positive");
    if (!(user_disk_radius >= 0.0)) fail("user_disk_radius must be non-negative");
    if (!(pathloss_exponent > 0.0) || !(reference_gain > 0.0) || !(reference_distance > 0.0))
      fail("path-loss parameters must be positive");
    if (!(rician_factor >= 0.0)) fail("rician_factor must be non-negative");
    if (!(sinr_threshold >= 0.0) || !(energy_threshold >= 0.0)) fail("thresholds must be non-negative");
    if (!(error_variance >= 0.0)) fail("error_variance must be non-negative");
    if (!users.empty() && static_cast<int>(users.size()) != num_users)
      fail("users must be empty or list one entry per user");
    for (int k = 0; k < num_users; ++k) {
      const UserParams &u = user(k);
      const std::string tag = "user " + std::to_string(k) + ": ";
      u.eh.validate();
      if (!(u.antenna_noise >= 0.0)) fail(tag + "antenna_noise must be non-negative");
      if (!(u.id_noise_value() > 0.0)) fail(tag + "id_noise must be positive");
      if (!(u.id_outage_target > 0.0 && u.id_outage_target < 0.5)) fail(tag + "id_outage_target must lie in (0, 0.5)");
      if (!(u.eh_outage_target > 0.0 && u.eh_outage_target < 0.5)) fail(tag + "eh_outage_target must lie in (0, 0.5)");
      if (!(energy_threshold < u.eh.max_harvest)) fail(tag + "energy_threshold must be below max_harvest");
    }
    if (!(convergence_threshold > 0.0) || max_ao_iterations < 1) fail("invalid AO stopping rule");
    if (!(penalty_init >= 0.0) || !(penalty_growth >= 1.0) || !(penalty_max >= penalty_init))
      fail("invalid penalty schedule");
    if (!(rank_tol > 0.0)) fail("rank_tol must be positive");
    if (!(solver.feas_tol > 0.0) || !(solver.obj_tol > 0.0) || solver.max_iters < 1 ||
        !(solver.barrier_growth > 1.0))
      fail("invalid solver tolerances");
  }
};

// ---- JSON ------------------------------------------------------------------

namespace detail {
template <class T> void get_opt(const nlohmann::json &j, const char *key, T &out) {
  if (j.contains(key)) j.at(key).get_to(out);
}
} // namespace detail

inline void to_json(nlohmann::json &j, const EhParams &e) {
  j = {{"max_harvest", e.max_harvest}, {"a", e.a}, {"b", e.b}};
}
inline void from_json(const nlohmann::json &j, EhParams &e) {
  detail::get_opt(j, "max_harvest", e.max_harvest);
  detail::get_opt(j, "a", e.a);
  detail::get_opt(j, "b", e.b);
}

inline void to_json(nlohmann::json &j, const UserParams &u) {
  j = {{"antenna_noise", u.antenna_noise},
       {"id_outage_target", u.id_outage_target},
       {"eh_outage_target", u.eh_outage_target},
       {"eh", u.eh}};
  j["id_noise"] = u.id_noise ? nlohmann::json(*u.id_noise) : nlohmann::json(nullptr);
}
inline void from_json(const nlohmann::json &j, UserParams &u) {
  detail::get_opt(j, "antenna_noise", u.antenna_noise);
  if (j.contains("id_noise")) {
    if (j.at("id_noise").is_null()) u.id_noise.reset();
    else u.id_noise = j.at("id_noise").get<double>();
  }
  detail::get_opt(j, "id_outage_target", u.id_outage_target);
  detail::get_opt(j, "eh_outage_target", u.eh_outage_target);
  detail::get_opt(j, "eh", u.eh);
}

inline void to_json(nlohmann::json &j, const SolverTolerances &s) {
  j = {{"feas_tol", s.feas_tol}, {"obj_tol", s.obj_tol}, {"max_iters", s.max_iters},
       {"barrier_growth", s.barrier_growth}};
}
inline void from_json(const nlohmann::json &j, SolverTolerances &s) {
  detail::get_opt(j, "feas_tol", s.feas_tol);
  detail::get_opt(j, "obj_tol", s.obj_tol);
  detail::get_opt(j, "max_iters", s.max_iters);
  detail::get_opt(j, "barrier_growth", s.barrier_growth);
}

inline void to_json(nlohmann::json &j, const ScenarioConfig &c) {
  j = nlohmann::json::object();
  j["num_users"] = c.num_users;
  j["elements_x"] = c.elements_x;
  j["elements_z"] = c.elements_z;
  j["wavelength"] = c.wavelength;
  j["element_spacing"] = c.element_spacing;
  j["transceiver_position"] = c.transceiver_position;
  j["user_disk_center"] = c.user_disk_center;
  j["user_disk_radius"] = c.user_disk_radius;
  j["pathloss_exponent"] = c.pathloss_exponent;
  j["reference_gain"] = c.reference_gain;
  j["reference_distance"] = c.reference_distance;
  j["rician_factor"] = c.rician_factor;
  j["max_power"] = c.max_power;
  j["sinr_threshold"] = c.sinr_threshold;
  j["energy_threshold"] = c.energy_threshold;
  j["error_variance"] = c.error_variance;
  j["default_user"] = c.default_user;
  j["users"] = c.users;
  j["convergence_threshold"] = c.convergence_threshold;
  j["max_ao_iterations"] = c.max_ao_iterations;
  j["penalty_init"] = c.penalty_init;
  j["penalty_growth"] = c.penalty_growth;
  j["penalty_max"] = c.penalty_max;
  j["rank_tol"] = c.rank_tol;
  j["max_penalty_steps"] = c.max_penalty_steps;
  j["solver"] = c.solver;
  j["rng_seed"] = c.rng_seed;
}

inline void from_json(const nlohmann::json &j, ScenarioConfig &c) {
  if (!j.is_object()) throw std::invalid_argument("ScenarioConfig: JSON root must be an object");
  static const char *known[] = {"num_users", "elements_x", "elements_z", "wavelength", "element_spacing",
                                "transceiver_position", "user_disk_center", "user_disk_radius",
                                "pathloss_exponent", "reference_gain", "reference_distance", "rician_factor",
                                "max_power", "sinr_threshold", "energy_threshold", "error_variance",
                                "default_user", "users", "convergence_threshold", "max_ao_iterations",
                                "penalty_init", "penalty_growth", "penalty_max", "rank_tol",
                                "max_penalty_steps", "solver", "rng_seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char *k : known) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument("ScenarioConfig: unknown key '" + it.key() + "'");
  }
  using detail::get_opt;
  get_opt(j, "num_users", c.num_users);
  get_opt(j, "elements_x", c.elements_x);
  get_opt(j, "elements_z", c.elements_z);
  get_opt(j, "wavelength", c.wavelength);
  get_opt(j, "element_spacing", c.element_spacing);
  get_opt(j, "transceiver_position", c.transceiver_position);
  get_opt(j, "user_disk_center", c.user_disk_center);
  get_opt(j, "user_disk_radius", c.user_disk_radius);
  get_opt(j, "pathloss_exponent", c.pathloss_exponent);
  get_opt(j, "reference_gain", c.reference_gain);
  get_opt(j, "reference_distance", c.reference_distance);
  get_opt(j, "rician_factor", c.rician_factor);
  get_opt(j, "max_power", c.max_power);
  get_opt(j, "sinr_threshold", c.sinr_threshold);
  get_opt(j, "energy_threshold", c.energy_threshold);
  get_opt(j, "error_variance", c.error_variance);
  get_opt(j, "default_user", c.default_user);
  if (j.contains("users")) {
    c.users.clear();
    for (const auto &u : j.at("users")) {
      UserParams p = c.default_user;
      from_json(u, p);
      c.users.push_back(p);
    }
  }
  get_opt(j, "convergence_threshold", c.convergence_threshold);
  get_opt(j, "max_ao_iterations", c.max_ao_iterations);
  get_opt(j, "penalty_init", c.penalty_init);
  get_opt(j, "penalty_growth", c.penalty_growth);
  get_opt(j, "penalty_max", c.penalty_max);
  get_opt(j, "rank_tol", c.rank_tol);
  get_opt(j, "max_penalty_steps", c.max_penalty_steps);
  get_opt(j, "solver", c.solver);
  get_opt(j, "rng_seed", c.rng_seed);
}

/// Applies "dotted.key=value" overrides on top of an existing config. The
/// value is parsed as JSON when possible and kept as a string otherwise.
inline ScenarioConfig apply_overrides(const ScenarioConfig &base, const std::vector<std::string> &overrides) {
  nlohmann::json j = base;
  for (const std::string &ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("override '" + ov + "' is not of the form key=value");
    std::string path = "/" + ov.substr(0, eq);
    for (char &ch : path)
      if (ch == '.') ch = '/';
    const std::string text = ov.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    const nlohmann::json::json_pointer ptr(path);
    if (!j.contains(ptr) && !j.contains(ptr.parent_pointer()))
      throw std::invalid_argument("override '" + ov + "' names an unknown key");
    j[ptr] = value;
  }
  ScenarioConfig out;
  j.get_to(out);
  return out;
}

inline ScenarioConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error &e) {
    throw std::invalid_argument("config file '" + path + "': " + e.what());
  }
  ScenarioConfig c;
  j.get_to(c);
  return c;
}

inline void save_config(const ScenarioConfig &c, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file '" + path + "'");
  out << nlohmann::json(c).dump(2) << '\n';
}

/// FNV-1a over the canonical JSON dump; stable across platforms.
inline std::uint64_t config_hash(const ScenarioConfig &c) {
  const std::string s = nlohmann::json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

// ---- seeding and geometry ----------------------------------------------------

/// Independent generator for (base seed, repetition, stream).
inline Rng make_rng(std::uint64_t seed, std::uint64_t repetition = 0, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(repetition), static_cast<std::uint32_t>(repetition >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

/// Uniform draw in [0, 1) built from the top 53 bits, so results do not
/// depend on the standard library's distribution implementation.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct UserGeometry {
  Vec3 position{};
  double distance = 0.0;
  double aod_vertical = 0.0;   ///< measured from the array normal (nadir)
  double aod_horizontal = 0.0; ///< azimuth in the array plane
};

inline UserGeometry make_geometry(const Vec3 &transceiver, const Vec3 &user) {
  UserGeometry g;
  g.position = user;
  const double dx = user[0] - transceiver[0];
  const double dy = user[1] - transceiver[1];
  const double dz = transceiver[2] - user[2];
  g.distance = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (!(g.distance > 0.0)) throw std::domain_error("user coincides with the transceiver");
  g.aod_vertical = std::acos(std::clamp(dz / g.distance, -1.0, 1.0));
  g.aod_horizontal = std::atan2(dy, dx);
  return g;
}

inline std::vector<UserGeometry> sample_user_positions(const ScenarioConfig &c, Rng &rng) {
  std::vector<UserGeometry> out;
  out.reserve(static_cast<std::size_t>(c.num_users));
  for (int k = 0; k < c.num_users; ++k) {
    const double r = c.user_disk_radius * std::sqrt(uniform01(rng));
    const double a = 2.0 * kPi * uniform01(rng);
    const Vec3 pos{c.user_disk_center[0] + r * std::cos(a), c.user_disk_center[1] + r * std::sin(a),
                   c.user_disk_center[2]};
    out.push_back(make_geometry(c.transceiver_position, pos));
  }
  return out;
}

} // namespace rms_swipt

#endif // RMS_SWIPT_SCENARIO_HPP
