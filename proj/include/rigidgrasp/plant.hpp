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

// Quasi-static compliant-contact plant standing in for the physical hand,
// object and camera. Fingertips are penalty springs against the object
// surface (normal spring from penetration, tangential stick spring with a
// Coulomb cap); each step solves the object pose for zero net wrench and
// reports slip/deformation/drop conditions.

#ifndef RIGIDGRASP_PLANT_HPP_
#define RIGIDGRASP_PLANT_HPP_

#include <random>
#include <vector>

#include "rigidgrasp/grasp.hpp"
#include "rigidgrasp/hand.hpp"
#include "rigidgrasp/types.hpp"

namespace rg {

enum class ObjectShape { kCylinder, kEllipsoid, kNone };

struct PlantConfig {
  ObjectShape shape = ObjectShape::kCylinder;
  // Cylinder: (radius, radius, half height); ellipsoid: semi-axes. Meters.
  Vec3 half_extents = Vec3(0.03, 0.03, 0.05);
  double mass = 0.0;  // kg
  Vec3 gravity_dir = Vec3(0, 0, -1);
  double gravity_accel = 9.81;
  Vec3 stiffness = Vec3(500.0, 500.0, 200.0);  // local (x, y, z = normal), N/m
  double mu = 0.65;
  double deformation_threshold = 1.0;  // N, normal force that damages the object
  double noise_pos_std = 0.0;          // m
  double noise_rot_std = 0.0;          // rad
  double wrench_tol = 1e-9;
  int max_equilibrium_iter = 500;
};

struct ContactPoint {
  Vec3 contact_obj;  // grasp-time contact point, object frame
  Vec3 normal_obj;   // grasp-time outward normal, object frame
  Mat3 frame_obj;    // grasp-time contact frame, object frame
  Vec3 anchor_obj;   // tangential-spring anchor, object frame
  bool active = false;
  double penetration = 0.0;  // m
  Vec3 force = Vec3::Zero(); // applied on the object, world frame
  bool slipping = false;
};

struct PlantState {
  Pose pose;                      // object pose, world
  MatX3 tips;                     // fingertip positions, world
  std::vector<ContactPoint> contacts;
  bool slip = false;
  bool deformation = false;
  bool dropped = false;
  double wrench_residual = 0.0;
  int equilibrium_iterations = 0;
};

struct FailureReport {
  bool slip = false;
  bool deformation = false;
  bool dropped = false;
  std::vector<int> slip_fingers;
  std::vector<int> deformation_fingers;
  std::vector<double> slip_margin;         // mu*f_n - |f_t| per finger
  std::vector<double> deformation_margin;  // threshold - f_n per finger

  bool any() const { return slip || deformation || dropped; }
  std::string describe() const;
};

/// Deterministic Gaussian stream (Box-Muller over mt19937_64); used instead
/// of std::normal_distribution so logs replay identically across platforms.
class NoiseRng {
 public:
  explicit NoiseRng(uint64_t seed) : gen_(seed) {}
  double gaussian();
  Vec3 gaussian3() { return Vec3(gaussian(), gaussian(), gaussian()); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Initial plant state: object at `initial_pose`, contacts anchored at the
/// grasp points (object frame), fingertips at the contact points.
PlantState make_plant_state(const PlantConfig& cfg, const Pose& initial_pose,
                            const MatX3& contact_points_world, const MatX3& normals_world);

/// Advances the plant: fingertips move to FK(q_cmd), then the object pose is
/// solved for zero net wrench. Slip/deformation/drop conditions are flagged
/// on the returned state. Throws ConvergenceError when equilibrium cannot be
/// found and no slip explains it.
PlantState plant_step(const PlantState& state, const JointState& q_cmd, const HandModel& model,
                      const PlantConfig& cfg);

/// Noisy pose observation; exact when both noise stds are zero.
Pose observe(const PlantState& state, const PlantConfig& cfg, NoiseRng& rng);

/// Failure audit of a plant state against the plant's friction coefficient
/// and deformation threshold.
FailureReport check_failures(const PlantState& state, const PlantConfig& cfg);

/// Total spring energy stored in the contacts, J.
double spring_energy(const PlantState& state, const PlantConfig& cfg);

}  // namespace rg

#endif  // RIGIDGRASP_PLANT_HPP_
