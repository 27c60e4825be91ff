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

// Force-to-position mapping: virtual target points encode the planned
// contact forces through per-axis compliance gains, and a joint trajectory
// optimization tracks those targets while pulling the object pose toward its
// waypoint.

#ifndef RIGIDGRASP_MOTION_MAPPER_HPP_
#define RIGIDGRASP_MOTION_MAPPER_HPP_

#include <vector>

#include "rigidgrasp/hand.hpp"
#include "rigidgrasp/optimizer.hpp"
#include "rigidgrasp/so3.hpp"
#include "rigidgrasp/types.hpp"

namespace rg {

/// Per-axis virtual compliance in the local contact frame, mm per N.
struct ComplianceGains {
  Vec3 mm_per_N = Vec3(2.0, 2.0, 5.0);
  double meters_per_unit = 1e-3;  // unit scale of the gains

  void validate() const {
    if ((mm_per_N.array() <= 0.0).any()) throw DomainError("compliance gains must be positive");
    if (meters_per_unit <= 0.0) throw DomainError("compliance unit scale must be positive");
  }
};

struct MapperConfig {
  Vec6 lambda1 = (Vec6() << 30, 30, 30, 0.01, 0.01, 0.01).finished();
  Vec3 lambda2 = Vec3(0.1, 0.1, 0.1);
  double epsilon_m = 1e-9;  // fingertip-to-target slack of the tracking constraint
  double delta_m = 1e-3;    // waypoint convergence threshold
  int horizon = 2;          // T
  int max_iterations = 20;  // MPC iterations per waypoint

  void validate() const {
    if (epsilon_m <= 0.0 || delta_m <= 0.0) throw DomainError("epsilon and delta must be positive");
    if (horizon < 1) throw DomainError("horizon must be >= 1");
    if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  }
};

struct VirtualTargets {
  MatX3 x_cd;               // m x 3 virtual target points, world frame
  std::vector<Mat3> R_d;    // desired fingertip orientations
};

/// Penetration vector in the local contact frame, same unit as the gains
/// (mm by default): D = diag(c) * f_local.
Vec3 penetration_distance(const ComplianceGains& gains, const Vec3& f_local_N);

/// World-frame penetration in meters for a world-frame contact force.
Vec3 penetration_world(const ComplianceGains& gains, const Mat3& frame, const Vec3& f_world_N);

/// Virtual target points x_cd = x_c + D (both world frame, meters); desired
/// orientations are the provided contact frames.
VirtualTargets virtual_targets(const MatX3& x_c, const MatX3& d_world,
                               const std::vector<Mat3>& frames);

/// Rotation logarithm (axis-angle vector, norm in [0, pi]). Throws
/// DomainError when the input is not a rotation matrix to 1e-8.
inline Vec3 so3_log(const Mat3& rotation) { return so3::log(rotation, 1e-8); }

struct TrajectorySolution {
  MatX q;               // horizon x (m*n); row t-1 is q_t
  Pose terminal_pose;   // object-pose variable at t = T
  double max_target_residual = 0.0;  // max fingertip-to-target distance, m
  SolveReport report;
};

/// Joint trajectory optimization. Decision variables are the horizon joint
/// vectors plus a 6-DOF terminal object-pose increment; virtual targets ride
/// rigidly with the interpolated pose, fingertips are tied to them by
/// equality constraints (the paper-level tracking tolerance is far below
/// solver precision), and joint limits are hard box bounds. Throws
/// InfeasibleError when no feasible trajectory exists.
TrajectorySolution solve_joint_trajectory(const HandModel& model, const JointState& q0,
                                          const VirtualTargets& vt, const Pose& object_current,
                                          const Pose& object_target, const MapperConfig& cfg,
                                          const MatX* warm_start = nullptr,
                                          const NlpOptions* solver_options = nullptr);

/// The NLP behind solve_joint_trajectory (variables: horizon joints followed
/// by the 6-DOF pose increment), with x0 at the stacked q0. Exposed so its
/// analytic derivatives can be audited against finite differences.
NlpProblem build_trajectory_nlp(const HandModel& model, const JointState& q0,
                                const VirtualTargets& vt, const Pose& object_current,
                                const Pose& object_target, const MapperConfig& cfg);

}  // namespace rg

#endif  // RIGIDGRASP_MOTION_MAPPER_HPP_
