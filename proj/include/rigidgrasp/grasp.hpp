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

// Grasp matrix, local contact frames and friction-cone checks for
// frictional point contacts.

#ifndef RIGIDGRASP_GRASP_HPP_
#define RIGIDGRASP_GRASP_HPP_

#include <vector>

#include "rigidgrasp/types.hpp"

namespace rg {

struct GraspState {
  MatX3 points;    // m x 3 contact points, world frame
  MatX3 normals;   // m x 3 outward surface normals, unit
  Vec3 object_cm = Vec3::Zero();
  Pose object_pose;
  double mass = 0.0;  // kg

  int num_contacts() const { return static_cast<int>(points.rows()); }
  void validate() const;
};

struct FrictionParams {
  double mu = 0.6;
  double f_n_min = 0.0;  // N
  double f_n_max = 1.0;  // N

  void validate() const;
};

/// Per-finger friction-cone report for a force expressed in its local
/// contact frame (z = inward normal).
struct ConeMargin {
  double tangential = 0.0;   // sqrt(fx^2 + fy^2), N
  double normal = 0.0;       // f_z, N
  double mu_fz = 0.0;        // friction capacity mu * f_z, N
  double ratio = 0.0;        // tangential / (mu f_z); +inf when f_z <= 0
  bool cone_violated = false;
  bool below_min = false;
  bool above_max = false;

  bool ok() const { return !cone_violated && !below_min && !above_max; }
};

/// Grasp matrix G (6 x 3m): block i maps a world-frame contact force to the
/// object wrench [f; (p_i - p_o) x f] about the object CM.
MatX grasp_matrix(const GraspState& gs);

/// Deterministic local contact frame for an outward unit normal: third
/// column is the inward normal -n, first two a Gram-Schmidt completion
/// against a fixed reference axis (switched away from the branch pole).
Mat3 contact_frame(const Vec3& n);

/// Frames for every contact of a grasp.
std::vector<Mat3> contact_frames(const GraspState& gs);

/// Cone/bound margins for a local-frame contact force.
ConeMargin cone_margin(const Vec3& f_local, const FrictionParams& fp);

/// Splits a stacked world-frame contact force into per-finger inward-normal
/// components and tangential magnitudes.
void decompose_force(const VecX& f_world, const std::vector<Mat3>& frames, VecX& f_perp,
                     VecX& f_par);

/// World-frame force of finger i -> local contact frame components.
inline Vec3 world_to_local(const Mat3& frame, const Vec3& f_world) {
  return frame.transpose() * f_world;
}

}  // namespace rg

#endif  // RIGIDGRASP_GRASP_HPP_
