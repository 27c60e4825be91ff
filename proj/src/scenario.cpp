// Copyright 2026 The RigidGrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rigidgrasp/scenario.hpp"

#include <cmath>
#include <fstream>

namespace rg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError("scenario config: " + where + ": " + what);
}

double get_num(const json& j, const std::string& key, double fallback, const std::string& ctx) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_number()) fail(ctx + "." + key, "expected a number");
  return j.at(key).get<double>();
}

std::optional<double> get_opt(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) fail(ctx + "." + key, "expected a number");
  return j.at(key).get<double>();
}

Vec3 get_vec3(const json& j, const std::string& key, const Vec3& fallback, const std::string& ctx) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3) fail(ctx + "." + key, "expected an array of 3 numbers");
  return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

std::vector<double> get_array(const json& j, const std::string& key,
                              const std::vector<double>& fallback, const std::string& ctx) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array()) fail(ctx + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(e.get<double>());
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(const json& j) {
  ScenarioConfig sc;
  sc.raw = j;
  if (!j.contains("schema_version")) fail("schema_version", "missing field");
  sc.schema_version = j.at("schema_version").get<int>();
  if (sc.schema_version != 1) {
    fail("schema_version", "unsupported version " + std::to_string(sc.schema_version));
  }
  sc.name = j.value("name", std::string("unnamed"));
  sc.seed = j.value("seed", uint64_t{0});

  if (j.contains("hand")) {
    const auto& h = j.at("hand");
    sc.hand.fingers = static_cast<int>(get_num(h, "fingers", 4, "hand"));
    sc.hand.base_radius = get_num(h, "base_radius_m", 0.08, "hand");
    sc.hand.link_lengths = get_array(h, "link_lengths_m", sc.hand.link_lengths, "hand");
    sc.hand.joint_lower = get_array(h, "joint_lower_rad", sc.hand.joint_lower, "hand");
    sc.hand.joint_upper = get_array(h, "joint_upper_rad", sc.hand.joint_upper, "hand");
    sc.hand.link_masses = get_array(h, "link_masses_kg", sc.hand.link_masses, "hand");
    sc.hand.rotor_inertia = get_num(h, "rotor_inertia", 1e-4, "hand");
    sc.hand.uniform_joint_inertia = get_num(h, "uniform_joint_inertia", 0.0, "hand");
  }

  if (!j.contains("object")) fail("object", "missing section");
  {
    const auto& o = j.at("object");
    const std::string shape = o.value("shape", std::string("cylinder"));
    if (shape == "cylinder") {
      sc.object.shape = ObjectShape::kCylinder;
    } else if (shape == "ellipsoid") {
      sc.object.shape = ObjectShape::kEllipsoid;
    } else if (shape == "none") {
      sc.object.shape = ObjectShape::kNone;
    } else {
      fail("object.shape", "unknown shape '" + shape + "'");
    }
    sc.object.size = get_vec3(o, "size_m", sc.object.size, "object");
    sc.object.mass = get_num(o, "mass_kg", 0.0, "object");
    sc.object.center = get_vec3(o, "center_m", sc.object.center, "object");
  }

  if (j.contains("grasp")) {
    const auto& g = j.at("grasp");
    sc.grasp.azimuth_deg = get_array(g, "contact_azimuth_deg", sc.grasp.azimuth_deg, "grasp");
    sc.grasp.height = get_opt(g, "contact_height_m", "grasp");
    if (g.contains("edges") && !g.at("edges").is_null()) {
      if (g.at("edges").is_string()) {
        if (g.at("edges").get<std::string>() != "complete") {
          fail("grasp.edges", "expected \"complete\" or an explicit pair list");
        }
        sc.grasp.complete_edges = true;
      } else {
        sc.grasp.complete_edges = false;
        for (const auto& e : g.at("edges")) {
          if (!e.is_array() || e.size() != 2) fail("grasp.edges", "expected pairs [i, j]");
          sc.grasp.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
      }
    }
  }

  if (j.contains("yarn")) {
    const auto& y = j.at("yarn");
    sc.yarn.square_side = get_num(y, "square_side_m", sc.yarn.square_side, "yarn");
    sc.yarn.height = get_num(y, "height_m", sc.yarn.height, "yarn");
    sc.yarn.camber = get_num(y, "camber_m", sc.yarn.camber, "yarn");
    sc.yarn.step = get_num(y, "step_m", sc.yarn.step, "yarn");
  }

  if (j.contains("friction")) {
    const auto& f = j.at("friction");
    sc.friction.mu = get_num(f, "mu", 0.6, "friction");
    sc.friction.f_n_min = get_num(f, "f_n_min_N", 0.1, "friction");
    sc.friction.f_n_max = get_num(f, "f_n_max_N", 1.0, "friction");
    sc.friction.validate();
  }

  sc.gains.mm_per_N = get_vec3(j, "compliance_gains_mm_per_N", Vec3(2, 2, 5), "");
  sc.gains.meters_per_unit = get_num(j, "compliance_unit_scale_m", 1e-3, "");
  sc.gains.validate();

  if (j.contains("mapper")) {
    const auto& m = j.at("mapper");
    const auto l1 = get_array(m, "lambda1", {30, 30, 30, 0.01, 0.01, 0.01}, "mapper");
    if (l1.size() != 6) fail("mapper.lambda1", "expected 6 weights");
    for (int k = 0; k < 6; ++k) sc.mapper.lambda1(k) = l1[k];
    const auto l2 = get_array(m, "lambda2", {0.1, 0.1, 0.1}, "mapper");
    if (l2.size() != 3) fail("mapper.lambda2", "expected 3 weights");
    for (int k = 0; k < 3; ++k) sc.mapper.lambda2(k) = l2[k];
    sc.mapper.epsilon_m = get_num(m, "epsilon_m", 1e-9, "mapper");
    sc.mapper.delta_m = get_num(m, "delta_m", 1e-3, "mapper");
    sc.mapper.horizon = static_cast<int>(get_num(m, "horizon", 2, "mapper"));
    sc.mapper.max_iterations = static_cast<int>(get_num(m, "max_iterations", 20, "mapper"));
    sc.mapper.validate();
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    sc.solver.tol = get_num(s, "tol", 1e-8, "solver");
    sc.solver.feas_tol = get_num(s, "feas_tol", 1e-8, "solver");
    sc.solver.max_iter = static_cast<int>(get_num(s, "max_iter", 200, "solver"));
  }

  if (!j.contains("waypoints_m") || !j.at("waypoints_m").is_array() ||
      j.at("waypoints_m").empty()) {
    fail("waypoints_m", "at least one waypoint required");
  }
  for (const auto& w : j.at("waypoints_m")) {
    if (!w.is_array() || w.size() != 3) fail("waypoints_m", "each waypoint must be [x, y, z]");
    sc.waypoints.emplace_back(w[0].get<double>(), w[1].get<double>(), w[2].get<double>());
  }
  if (j.contains("waypoint_yaw_rad")) {
    for (const auto& y : j.at("waypoint_yaw_rad")) sc.waypoint_yaw.push_back(y.get<double>());
    if (sc.waypoint_yaw.size() != sc.waypoints.size()) {
      fail("waypoint_yaw_rad", "must match waypoints_m length");
    }
  }

  sc.gravity_dir = get_vec3(j, "gravity_dir", Vec3(0, 0, -1), "");
  if (sc.gravity_dir.norm() < 1e-9) fail("gravity_dir", "must be a nonzero direction");
  sc.gravity_dir.normalize();

  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    sc.planner.mass = get_opt(p, "mass_kg", "planner");
    sc.planner.mu = get_opt(p, "mu", "planner");
  }
  if (j.contains("plant")) {
    const auto& p = j.at("plant");
    sc.plant.mass = get_opt(p, "mass_kg", "plant");
    sc.plant.mu = get_opt(p, "mu", "plant");
    if (p.contains("stiffness_N_per_mm") && !p.at("stiffness_N_per_mm").is_null()) {
      sc.plant.stiffness_N_per_mm = get_vec3(p, "stiffness_N_per_mm", Vec3::Zero(), "plant");
    }
    sc.plant.deformation_threshold = get_opt(p, "deformation_threshold_N", "plant");
    sc.plant.deformation_threshold_per_kg = get_opt(p, "deformation_threshold_N_per_kg", "plant");
    sc.plant.noise_pos_std = get_num(p, "noise_pos_std_m", 0.0, "plant");
    sc.plant.noise_rot_std = get_num(p, "noise_rot_std_rad", 0.0, "plant");
  }
  return sc;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("scenario file " + path + ": " + e.what());
  }
  return parse_scenario(j);
}

void set_json_path(json& j, const std::string& dotted_path, double value) {
  json* cur = &j;
  size_t start = 0;
  while (true) {
    const size_t dot = dotted_path.find('.', start);
    const std::string key = dotted_path.substr(start, dot - start);
    if (key.empty()) throw ParseError("empty component in parameter path '" + dotted_path + "'");
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    cur = &((*cur)[key]);
    start = dot + 1;
  }
}

HandModel build_hand(const HandConfig& hc) {
  HandModel model;
  const int m = hc.fingers;
  const int n = static_cast<int>(hc.link_lengths.size());
  if (static_cast<int>(hc.joint_lower.size()) != n ||
      static_cast<int>(hc.joint_upper.size()) != n ||
      static_cast<int>(hc.link_masses.size()) != n) {
    throw ParseError("hand config: per-joint arrays must all have the same length");
  }
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * M_PI * i / m;
    KinematicChain chain;
    chain.base.p = Vec3(hc.base_radius * std::cos(theta), hc.base_radius * std::sin(theta), 0.0);
    chain.base.R = Eigen::AngleAxisd(theta + M_PI, Vec3::UnitZ()).toRotationMatrix();
    chain.axes.push_back(Vec3::UnitZ());
    for (int k = 1; k < n; ++k) chain.axes.push_back(Vec3::UnitY());
    for (double l : hc.link_lengths) chain.link_offsets.push_back(Vec3(l, 0, 0));
    model.fingers.push_back(chain);
    VecX masses(n);
    for (int k = 0; k < n; ++k) masses(k) = hc.link_masses[k];
    model.link_masses.push_back(masses);
  }
  model.joint_lower.resize(m * n);
  model.joint_upper.resize(m * n);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n; ++k) {
      model.joint_lower(i * n + k) = hc.joint_lower[k];
      model.joint_upper(i * n + k) = hc.joint_upper[k];
    }
  }
  model.rotor_inertia = hc.rotor_inertia;
  model.uniform_joint_inertia = hc.uniform_joint_inertia;
  model.validate();
  return model;
}

void initial_contacts(const ScenarioConfig& sc, MatX3* points, MatX3* normals) {
  const int m = static_cast<int>(sc.grasp.azimuth_deg.size());
  if (m < 3) throw ParseError("grasp.contact_azimuth_deg: at least 3 contacts required");
  points->resize(m, 3);
  normals->resize(m, 3);
  const Vec3 c = sc.object.center;
  const double height = sc.grasp.height.value_or(c.z());
  for (int i = 0; i < m; ++i) {
    const double th = sc.grasp.azimuth_deg[i] * M_PI / 180.0;
    const double ct = std::cos(th), st = std::sin(th);
    if (sc.object.shape == ObjectShape::kCylinder) {
      const double r = sc.object.size.x();
      points->row(i) = Vec3(c.x() + r * ct, c.y() + r * st, height).transpose();
      normals->row(i) = Vec3(ct, st, 0).transpose();
    } else if (sc.object.shape == ObjectShape::kEllipsoid) {
      const double a = sc.object.size.x(), b = sc.object.size.y();
      points->row(i) = Vec3(c.x() + a * ct, c.y() + b * st, c.z()).transpose();
      normals->row(i) = Vec3(ct / a, st / b, 0).normalized().transpose();
    } else {
      throw ParseError("initial_contacts: yarn scenarios have no object surface");
    }
  }
}

MatX3 yarn_corners(const YarnConfig& yc) {
  MatX3 tips(4, 3);
  const double halfside = yc.square_side / 2.0;
  for (int i = 0; i < 4; ++i) {
    const double az = (45.0 + 90.0 * i) * M_PI / 180.0;
    const double r = halfside * std::sqrt(2.0);
    const double dz = (i % 2 == 0) ? yc.camber : -yc.camber;
    tips.row(i) = Vec3(r * std::cos(az), r * std::sin(az), yc.height + dz).transpose();
  }
  return tips;
}

PlantConfig build_plant_config(const ScenarioConfig& sc) {
  PlantConfig cfg;
  cfg.shape = sc.object.shape;
  cfg.half_extents = sc.object.size;
  cfg.mass = sc.plant.mass.value_or(sc.object.mass);
  cfg.gravity_dir = sc.gravity_dir;
  cfg.mu = sc.plant.mu.value_or(sc.friction.mu);
  if (sc.plant.stiffness_N_per_mm) {
    cfg.stiffness = 1e3 * (*sc.plant.stiffness_N_per_mm);
  } else {
    // Reciprocal of the compliance gains.
    cfg.stiffness = (sc.gains.mm_per_N * sc.gains.meters_per_unit).cwiseInverse();
  }
  if (sc.plant.deformation_threshold_per_kg) {
    cfg.deformation_threshold = *sc.plant.deformation_threshold_per_kg * cfg.mass;
  } else {
    cfg.deformation_threshold = sc.plant.deformation_threshold.value_or(1.25 * sc.friction.f_n_max);
  }
  cfg.noise_pos_std = sc.plant.noise_pos_std;
  cfg.noise_rot_std = sc.plant.noise_rot_std;
  return cfg;
}

FrictionParams planner_friction(const ScenarioConfig& sc) {
  FrictionParams fp = sc.friction;
  if (sc.planner.mu) fp.mu = *sc.planner.mu;
  fp.validate();
  return fp;
}

double planner_mass(const ScenarioConfig& sc) { return sc.planner.mass.value_or(sc.object.mass); }

ContactFramework load_framework_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open framework file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("framework file " + path + ": " + e.what());
  }
  if (!j.contains("points_m")) throw ParseError("framework file: missing points_m");
  const auto& pts = j.at("points_m");
  const int m = static_cast<int>(pts.size());
  VecX stacked(3 * m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < 3; ++k) stacked(3 * i + k) = pts[i][k].get<double>();
  }
  if (j.contains("edges") && !j.at("edges").is_null()) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    return ContactFramework(m, stacked, edges);
  }
  return ContactFramework::complete(stacked);
}

Snapshot load_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open snapshot file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("snapshot file " + path + ": " + e.what());
  }
  Snapshot snap;
  if (!j.contains("contact_points_m") || !j.contains("normals")) {
    throw ParseError("snapshot file: contact_points_m and normals are required");
  }
  const auto& pts = j.at("contact_points_m");
  const auto& nrm = j.at("normals");
  const int m = static_cast<int>(pts.size());
  snap.grasp.points.resize(m, 3);
  snap.grasp.normals.resize(m, 3);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < 3; ++k) {
      snap.grasp.points(i, k) = pts[i][k].get<double>();
      snap.grasp.normals(i, k) = nrm[i][k].get<double>();
    }
    snap.grasp.normals.row(i).normalize();
  }
  snap.grasp.object_cm = get_vec3(j, "object_cm_m", Vec3::Zero(), "snapshot");
  snap.grasp.mass = get_num(j, "mass_kg", 0.0, "snapshot");
  snap.grasp.validate();

  VecX stacked(3 * m);
  for (int i = 0; i < m; ++i) stacked.segment<3>(3 * i) = snap.grasp.points.row(i).transpose();
  snap.framework = ContactFramework::complete(stacked);

  if (j.contains("friction")) {
    const auto& f = j.at("friction");
    snap.friction.mu = get_num(f, "mu", 0.6, "snapshot.friction");
    snap.friction.f_n_min = get_num(f, "f_n_min_N", 0.1, "snapshot.friction");
    snap.friction.f_n_max = get_num(f, "f_n_max_N", 1.0, "snapshot.friction");
  }
  snap.friction.validate();

  const Vec3 gdir = get_vec3(j, "gravity_dir", Vec3(0, 0, -1), "snapshot").normalized();
  snap.gravity_wrench.setZero();
  snap.gravity_wrench.head<3>() = snap.grasp.mass * 9.81 * gdir;

  snap.task_inertia = MatX::Identity(3 * m, 3 * m);
  snap.contact_velocity = VecX::Zero(3 * m);
  snap.alpha = VecX::Zero(3 * m);
  if (j.contains("contact_velocity")) {
    const auto v = get_array(j, "contact_velocity", {}, "snapshot");
    if (static_cast<int>(v.size()) != 3 * m) throw ParseError("snapshot: contact_velocity size");
    for (int i = 0; i < 3 * m; ++i) snap.contact_velocity(i) = v[i];
  }
  if (j.contains("alpha")) {
    const auto a = get_array(j, "alpha", {}, "snapshot");
    if (static_cast<int>(a.size()) != 3 * m) throw ParseError("snapshot: alpha size");
    for (int i = 0; i < 3 * m; ++i) snap.alpha(i) = a[i];
  }
  return snap;
}

}  // namespace rg
