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

#include <doctest.h>

#include "test_util.hpp"

using namespace rg;

TEST_CASE("exp/log identity and quarter turn") {
  CHECK(so3::log(Mat3::Identity()).norm() == doctest::Approx(0.0).epsilon(1e-14));
  const Vec3 w(0, 0, M_PI / 2);
  const Mat3 R = so3::exp(w);
  CHECK((R * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-12);
  CHECK((so3::log(R) - w).norm() < 1e-12);
}

TEST_CASE("exp/log round trip on random rotations") {
  test::Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const Mat3 R = rng.rotation();
    CHECK(so3::log(R.transpose() * R).norm() < 1e-10);
    const Mat3 R2 = so3::exp(so3::log(R));
    CHECK((R2 - R).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("log rejects non-rotations") {
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = 1.2;
  CHECK_THROWS_AS(so3::log(bad), DomainError);
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  CHECK_THROWS_AS(so3::log(reflect), DomainError);
}

TEST_CASE("log near pi") {
  test::Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    const Vec3 axis = rng.unit3();
    const double angle = M_PI - rng.uniform(0.0, 1e-7);
    const Mat3 R = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    const Vec3 w = so3::log(R);
    CHECK((so3::exp(w) - R).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("left jacobian matches finite differences") {
  test::Rng rng(13);
  const double h = 1e-7;
  for (int k = 0; k < 40; ++k) {
    const Vec3 w = rng.vec3(-2.0, 2.0);
    const Mat3 Jl = so3::left_jacobian(w);
    CHECK((so3::left_jacobian_inv(w) * Jl - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    // exp((w + d)^) ~ exp((J_l d)^) exp(w^)
    for (int c = 0; c < 3; ++c) {
      Vec3 d = Vec3::Zero();
      d(c) = h;
      const Mat3 lhs = so3::exp(w + d) * so3::exp(w).transpose();
      const Vec3 fd = so3::log(lhs) / h;
      CHECK((fd - Jl.col(c)).norm() < 1e-5);
    }
  }
}
