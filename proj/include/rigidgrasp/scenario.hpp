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

// Declarative scenario configuration (JSON, schema_version 1): hand
// geometry, object, initial grasp, friction/compliance parameters, mapper
// weights, waypoints and plant overrides. See docs/schema.md.

#ifndef RIGIDGRASP_SCENARIO_HPP_
#define RIGIDGRASP_SCENARIO_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rigidgrasp/grasp.hpp"
#include "rigidgrasp/hand.hpp"
#include "rigidgrasp/motion_mapper.hpp"
#include "rigidgrasp/plant.hpp"
#include "rigidgrasp/rigidity.hpp"

namespace rg {

struct HandConfig {
  int fingers = 4;
  double base_radius = 0.08;
  std::vector<double> link_lengths = {0.05, 0.05, 0.04, 0.035};
  std::vector<double> joint_lower = {-1.2, -2.2, -2.2, -2.2};  // per finger
  std::vector<double> joint_upper = {1.2, 2.2, 2.2, 2.2};
  std::vector<double> link_masses = {0.040, 0.035, 0.030, 0.020};
  double rotor_inertia = 1e-4;
  double uniform_joint_inertia = 0.0;
};

struct ObjectConfig {
  ObjectShape shape = ObjectShape::kCylinder;
  Vec3 size = Vec3(0.03, 0.03, 0.05);  // cylinder: r, r, half height; ellipsoid: semi-axes
  double mass = 0.0;
  Vec3 center = Vec3(0.0, 0.0, 0.09);
};

struct GraspConfig {
  std::vector<double> azimuth_deg = {0.0, 90.0, 180.0, 270.0};
  std::optional<double> height;  // world z of the contact ring; default: object center
  bool complete_edges = true;
  std::vector<std::pair<int, int>> edges;  // used when complete_edges is false
};

struct YarnConfig {
  double square_side = 0.06;
  double height = 0.07;
  double camber = 0.0015;  // alternating out-of-plane offset keeping K4 generic
  double step = 0.002;     // per-step centroid travel, m
};

struct PlannerOverrides {
  std::optional<double> mass;  // kg assumed by the planner
  std::optional<double> mu;
};

struct PlantOverrides {
  std::optional<double> mass;
  std::optional<double> mu;
  std::optional<Vec3> stiffness_N_per_mm;  // default: reciprocal compliance gains
  std::optional<double> deformation_threshold;         // N
  std::optional<double> deformation_threshold_per_kg;  // N/kg, scales with plant mass
  double noise_pos_std = 0.0;
  double noise_rot_std = 0.0;
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string name;
  uint64_t seed = 0;
  HandConfig hand;
  ObjectConfig object;
  GraspConfig grasp;
  YarnConfig yarn;
  FrictionParams friction;
  ComplianceGains gains;
  MapperConfig mapper;
  NlpOptions solver;
  std::vector<Vec3> waypoints;
  std::vector<double> waypoint_yaw;  // rad, optional, zero when absent
  Vec3 gravity_dir = Vec3(0, 0, -1);
  PlannerOverrides planner;
  PlantOverrides plant;
  nlohmann::json raw;

  bool is_yarn() const { return object.shape == ObjectShape::kNone; }
};

ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario_file(const std::string& path);

/// Sets a dotted-path field ("plant.mass_kg") in a JSON document.
void set_json_path(nlohmann::json& j, const std::string& dotted_path, double value);

HandModel build_hand(const HandConfig& hc);

/// Initial contact ring derived from the object geometry and grasp section.
void initial_contacts(const ScenarioConfig& sc, MatX3* points, MatX3* normals);

/// Fingertip square of the yarn scenario.
MatX3 yarn_corners(const YarnConfig& yc);

PlantConfig build_plant_config(const ScenarioConfig& sc);
FrictionParams planner_friction(const ScenarioConfig& sc);
double planner_mass(const ScenarioConfig& sc);

/// Standalone framework file for `check-rigidity`: {"points_m": [[x,y,z],...],
/// "edges": [[i,j],...] (optional, default complete)}.
ContactFramework load_framework_file(const std::string& path);

/// One-shot planner snapshot for `plan-forces`.
struct Snapshot {
  GraspState grasp;
  ContactFramework framework;
  FrictionParams friction;
  Vec6 gravity_wrench = Vec6::Zero();
  MatX task_inertia;  // identity when the file gives no hand state
  VecX contact_velocity;
  VecX alpha;
};

Snapshot load_snapshot_file(const std::string& path);

}  // namespace rg

#endif  // RIGIDGRASP_SCENARIO_HPP_
