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

#include "rigidgrasp/so3.hpp"

#include <cmath>

namespace rg::so3 {

namespace {
constexpr double kSmallAngle = 1e-8;
}

Mat3 exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = skew(w);
  if (theta < kSmallAngle) {
    // Second-order series; exact to machine precision below the cutoff.
    return Mat3::Identity() + W + 0.5 * W * W;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * W + b * W * W;
}

bool is_rotation(const Mat3& R, double tol) {
  const double ortho = (R.transpose() * R - Mat3::Identity()).norm();
  return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Vec3 log(const Mat3& R, double ortho_tol) {
  if (!is_rotation(R, ortho_tol)) {
    throw DomainError("so3::log: input is not a rotation matrix (orthonormality/det check failed)");
  }
  const double cos_theta = std::min(1.0, std::max(-1.0, (R.trace() - 1.0) / 2.0));
  const double theta = std::acos(cos_theta);
  if (theta < kSmallAngle) {
    // R ~ I + W; antisymmetric part recovers w.
    return Vec3((R(2, 1) - R(1, 2)) / 2.0, (R(0, 2) - R(2, 0)) / 2.0, (R(1, 0) - R(0, 1)) / 2.0);
  }
  if (theta > M_PI - 1e-6) {
    // Near pi the antisymmetric part degenerates; take the axis from the
    // symmetric part, nn^T = (R + I)/2 at theta = pi, and the angle from
    // asin of the antisymmetric remainder (acos is ill-conditioned here).
    const Mat3 S = (R + R.transpose() + 2.0 * Mat3::Identity()) / 4.0;
    int k;
    S.diagonal().maxCoeff(&k);
    Vec3 n = S.col(k) / std::sqrt(std::max(S(k, k), 1e-16));
    n.normalize();
    const Vec3 asym((R(2, 1) - R(1, 2)), (R(0, 2) - R(2, 0)), (R(1, 0) - R(0, 1)));
    if (asym.dot(n) < 0.0) n = -n;
    const double sin_theta = std::min(1.0, asym.norm() / 2.0);
    return (M_PI - std::asin(sin_theta)) * n;
  }
  const Vec3 asym((R(2, 1) - R(1, 2)), (R(0, 2) - R(2, 0)), (R(1, 0) - R(0, 1)));
  return theta / (2.0 * std::sin(theta)) * asym;
}

Mat3 left_jacobian(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = skew(w);
  if (theta < kSmallAngle) {
    return Mat3::Identity() + 0.5 * W + W * W / 6.0;
  }
  const double t2 = theta * theta;
  const double a = (1.0 - std::cos(theta)) / t2;
  const double b = (theta - std::sin(theta)) / (t2 * theta);
  return Mat3::Identity() + a * W + b * W * W;
}

Mat3 left_jacobian_inv(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = skew(w);
  if (theta < kSmallAngle) {
    return Mat3::Identity() - 0.5 * W + W * W / 12.0;
  }
  const double half = theta / 2.0;
  const double cot_term = (1.0 - half / std::tan(half)) / (theta * theta);
  return Mat3::Identity() - 0.5 * W + cot_term * W * W;
}

}  // namespace rg::so3
