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

// Kinematic and inertial model of an m-finger hand: forward kinematics,
// the stacked block-diagonal hand Jacobian, joint-space inertia and the
// task-space inertia seen at the fingertips.

#ifndef RIGIDGRASP_HAND_HPP_
#define RIGIDGRASP_HAND_HPP_

#include <vector>

#include "rigidgrasp/types.hpp"

namespace rg {

/// Serial revolute chain. Joint j rotates about axes[j] (expressed in the
/// frame reached after the preceding links), followed by the fixed link
/// translation link_offsets[j]. The last offset places the fingertip.
struct KinematicChain {
  Pose base;                       // palm frame -> joint-1 frame at q = 0
  std::vector<Vec3> axes;          // unit joint axes
  std::vector<Vec3> link_offsets;  // per-joint link translation, meters
  Mat3 tip_rot = Mat3::Identity(); // fixed fingertip-frame alignment

  int dof() const { return static_cast<int>(axes.size()); }
  void validate() const;
};

struct HandModel {
  std::vector<KinematicChain> fingers;
  VecX joint_lower;  // size m*n, rad
  VecX joint_upper;
  std::vector<VecX> link_masses;    // per finger, kg, point mass at each link end
  double rotor_inertia = 1e-4;      // added to every diagonal of M(q), kg m^2
  double uniform_joint_inertia = 0; // if > 0, M(q) = uniform_joint_inertia * I

  int num_fingers() const { return static_cast<int>(fingers.size()); }
  int joints_per_finger() const { return fingers.empty() ? 0 : fingers.front().dof(); }
  int total_joints() const { return num_fingers() * joints_per_finger(); }

  void validate() const;
};

struct JointState {
  VecX q;
  VecX q_dot;

  explicit JointState(VecX q_in) : q(std::move(q_in)), q_dot(VecX::Zero(q.size())) {}
  JointState(VecX q_in, VecX qd) : q(std::move(q_in)), q_dot(std::move(qd)) {}
};

/// Tip pose plus position/rotation Jacobian blocks of one finger.
struct FingerKinematics {
  Pose tip;
  MatX jac_pos;  // 3 x n
  MatX jac_rot;  // 3 x n
};

/// Default hand used by the shipped scenarios: `m` identical 4-joint fingers
/// (one yaw, three pitch) arranged symmetrically around the palm at
/// `base_radius`, sized to close around a ~6 cm object.
HandModel make_default_hand(int m = 4, double base_radius = 0.08);

/// Fingertip poses in the palm frame. Throws DomainError naming the first
/// out-of-limits joint.
std::vector<Pose> forward_kinematics(const HandModel& model, const JointState& state);

/// Kinematics of a single chain; no joint-limit check.
FingerKinematics chain_kinematics(const KinematicChain& chain, const Eigen::Ref<const VecX>& q);

/// Per-finger tip pose and Jacobians at q, limits checked.
std::vector<FingerKinematics> finger_kinematics(const HandModel& model, const JointState& state);

/// Stacked hand Jacobian, 3m x mn, block diagonal across fingers.
MatX hand_jacobian(const HandModel& model, const JointState& state);

/// Joint-space inertia M(q): per-link point masses plus rotor inertia,
/// block diagonal across fingers.
MatX joint_inertia(const HandModel& model, const JointState& state);

/// Task-space inertia M_c = pinv(J_h)^T M(q) pinv(J_h). Throws
/// SingularityError when the smallest singular value of J_h drops below
/// `sigma_min_tol`.
MatX task_inertia(const HandModel& model, const JointState& state, double sigma_min_tol = 1e-6);

/// Damped-least-squares fingertip IK used at scenario setup: moves each
/// finger's tip to targets.row(i), staying within joint limits. Returns the
/// joint vector; throws ConvergenceError if the residual cannot be driven
/// below `tol`.
VecX ik_fingertips(const HandModel& model, const VecX& q_init, const MatX3& targets,
                   double tol = 1e-10, int max_iter = 400);

}  // namespace rg

#endif  // RIGIDGRASP_HAND_HPP_
