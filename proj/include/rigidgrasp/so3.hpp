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

// Rotation-vector exponential/logarithm and the SO(3) left Jacobian, used by
// the trajectory objective and the pose interpolation of the MPC loop.

#ifndef RIGIDGRASP_SO3_HPP_
#define RIGIDGRASP_SO3_HPP_

#include "rigidgrasp/types.hpp"

namespace rg::so3 {

/// exp: rotation vector (axis * angle) -> rotation matrix (Rodrigues).
Mat3 exp(const Vec3& w);

/// log: rotation matrix -> rotation vector with angle in [0, pi].
/// Validates orthonormality and det(R)=+1 to `ortho_tol`.
Vec3 log(const Mat3& R, double ortho_tol = 1e-8);

/// Left Jacobian J_l(w): exp((w + d)^) ~ exp((J_l(w) d)^) exp(w^).
Mat3 left_jacobian(const Vec3& w);

/// Inverse of the left Jacobian.
Mat3 left_jacobian_inv(const Vec3& w);

/// Right Jacobian, J_r(w) = J_l(-w).
inline Mat3 right_jacobian(const Vec3& w) { return left_jacobian(-w); }

/// True when R is orthonormal with unit determinant to `tol`.
bool is_rotation(const Mat3& R, double tol = 1e-8);

}  // namespace rg::so3

#endif  // RIGIDGRASP_SO3_HPP_
