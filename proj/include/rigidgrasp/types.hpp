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

#ifndef RIGIDGRASP_TYPES_HPP_
#define RIGIDGRASP_TYPES_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rg {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using MatX = Eigen::MatrixXd;
using MatX3 = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or precondition violation (bad joint value, zero normal, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be invertible (or full rank) is numerically singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Linear system is rank-deficient beyond the pseudoinverse tolerance.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// No point satisfies the constraint set.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Iterative scheme failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or log file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Rigid transform (rotation + translation).
struct Pose {
  Vec3 p = Vec3::Zero();
  Mat3 R = Mat3::Identity();

  Vec3 apply(const Vec3& x) const { return p + R * x; }

  Pose compose(const Pose& other) const { return Pose{p + R * other.p, R * other.R}; }

  Pose inverse() const {
    Pose inv;
    inv.R = R.transpose();
    inv.p = -inv.R * p;
    return inv;
  }

  static Pose Identity() { return Pose{}; }
};

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(),
      v.z(), 0, -v.x(),
      -v.y(), v.x(), 0;
  return s;
}

}  // namespace rg

#endif  // RIGIDGRASP_TYPES_HPP_
