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

#include "rigidgrasp/motion_mapper.hpp"

#include <doctest.h>

#include "rigidgrasp/grasp.hpp"
#include "test_util.hpp"

using namespace rg;

namespace {

struct GraspFixture {
  HandModel model;
  VecX q0;
  MatX3 contacts;
  std::vector<Mat3> frames;
  Pose object;
};

// Default hand holding the 3 cm ring at z = 0.09, tips exactly on the ring.
GraspFixture make_fixture() {
  GraspFixture fx;
  fx.model = make_default_hand();
  fx.contacts.resize(4, 3);
  MatX3 normals(4, 3);
  for (int i = 0; i < 4; ++i) {
    const double th = M_PI / 2 * i;
    fx.contacts.row(i) = Vec3(0.03 * std::cos(th), 0.03 * std::sin(th), 0.09).transpose();
    normals.row(i) = Vec3(std::cos(th), std::sin(th), 0).transpose();
  }
  VecX seed = VecX::Zero(16);
  for (int i = 0; i < 4; ++i) {
    seed(i * 4 + 1) = -1.0;
    seed(i * 4 + 2) = 0.8;
    seed(i * 4 + 3) = 0.8;
  }
  fx.q0 = ik_fingertips(fx.model, seed, fx.contacts);
  for (int i = 0; i < 4; ++i) {
    fx.frames.push_back(contact_frame(normals.row(i).transpose()));
    const auto fk = chain_kinematics(fx.model.fingers[i], fx.q0.segment(i * 4, 4));
    fx.model.fingers[i].tip_rot = fk.tip.R.transpose() * fx.frames[i];
  }
  fx.object.p = Vec3(0, 0, 0.09);
  return fx;
}

}  // namespace

TEST_CASE("penetration distance") {
  ComplianceGains gains;
  gains.mm_per_N = Vec3(2, 2, 5);

  CHECK((penetration_distance(gains, Vec3(0, 0, 1)) - Vec3(0, 0, 5)).norm() == 0.0);
  CHECK(penetration_distance(gains, Vec3::Zero()).norm() == 0.0);

  test::Rng rng(71);
  for (int k = 0; k < 20; ++k) {
    const Vec3 f = rng.vec3(-2, 2);
    CHECK((penetration_distance(gains, 2 * f) - 2 * penetration_distance(gains, f)).norm() <
          1e-14);
  }
  ComplianceGains bad;
  bad.mm_per_N = Vec3(1, -1, 1);
  CHECK_THROWS_AS(penetration_distance(bad, Vec3::Ones()), DomainError);
}

TEST_CASE("penetration in world frame acts along the inward normal") {
  ComplianceGains gains;
  gains.mm_per_N = Vec3(2, 2, 5);
  const Vec3 n(1, 0, 0);  // outward
  const Mat3 frame = contact_frame(n);
  // A pure inward normal force of 1 N penetrates 5 mm inward.
  const Vec3 f_world = -n;
  const Vec3 d = penetration_world(gains, frame, f_world);
  CHECK((d - (-n * 0.005)).norm() < 1e-12);
}

TEST_CASE("virtual targets") {
  GraspFixture fx = make_fixture();
  MatX3 D = MatX3::Zero(4, 3);

  SUBCASE("zero penetration keeps the contacts") {
    const auto vt = virtual_targets(fx.contacts, D, fx.frames);
    CHECK((vt.x_cd - fx.contacts).norm() == 0.0);
    CHECK(vt.R_d.size() == 4);
  }

  SUBCASE("targets sit inside the surface and round trip") {
    for (int i = 0; i < 4; ++i) {
      const Vec3 n = -fx.frames[i].col(2);  // outward
      D.row(i) = (-0.005 * n).transpose();  // 5 mm inward
    }
    const auto vt = virtual_targets(fx.contacts, D, fx.frames);
    for (int i = 0; i < 4; ++i) {
      const double r = (vt.x_cd.row(i).transpose() - fx.object.p).head<2>().norm();
      CHECK(r == doctest::Approx(0.025).epsilon(1e-9));  // 5 mm inside the 3 cm ring
    }
    CHECK(((vt.x_cd - D) - fx.contacts).norm() < 1e-15);
  }
}

TEST_CASE("so3_log rejects non-rotations and round trips") {
  CHECK(so3_log(Mat3::Identity()).norm() == 0.0);
  CHECK((so3_log(so3::exp(Vec3(0, 0, M_PI / 2))) - Vec3(0, 0, M_PI / 2)).norm() < 1e-12);
  Mat3 bad = 1.1 * Mat3::Identity();
  CHECK_THROWS_AS(so3_log(bad), DomainError);
}

TEST_CASE("trajectory fixed point: targets at the current tips") {
  GraspFixture fx = make_fixture();
  MapperConfig cfg;
  const auto tips = forward_kinematics(fx.model, JointState(fx.q0));
  MatX3 x_cd(4, 3);
  std::vector<Mat3> R_d;
  for (int i = 0; i < 4; ++i) {
    x_cd.row(i) = tips[i].p.transpose();
    R_d.push_back(tips[i].R);
  }
  const VirtualTargets vt{x_cd, R_d};
  const auto sol =
      solve_joint_trajectory(fx.model, JointState(fx.q0), vt, fx.object, fx.object, cfg);
  REQUIRE(sol.report.ok());
  CHECK(sol.report.objective < 1e-8);
  for (int t = 0; t < cfg.horizon; ++t) {
    CHECK((sol.q.row(t).transpose() - fx.q0).lpNorm<Eigen::Infinity>() < 1e-6);
  }
  CHECK(sol.max_target_residual < 1e-8);
}

TEST_CASE("trajectory reaches a cup waypoint") {
  GraspFixture fx = make_fixture();
  MapperConfig cfg;
  cfg.max_iterations = 1;
  const auto vt = virtual_targets(fx.contacts, MatX3::Zero(4, 3), fx.frames);
  Pose target = fx.object;
  target.p += Vec3(0, 0.03, 0.03);

  const auto sol =
      solve_joint_trajectory(fx.model, JointState(fx.q0), vt, fx.object, target, cfg);
  REQUIRE(sol.report.status != SolveStatus::kNumericError);
  // Tracking equalities hold to solver precision (paper-level epsilon is
  // far below the fk precision; the solver enforces them as equalities).
  CHECK(sol.max_target_residual <= 1e-8 + cfg.epsilon_m);
  // The terminal pose variable reaches the waypoint.
  CHECK((sol.terminal_pose.p - target.p).norm() < 1e-4);
  // Joint limits are hard bounds.
  for (int t = 0; t < cfg.horizon; ++t) {
    CHECK((sol.q.row(t).transpose().array() >= fx.model.joint_lower.array() - 1e-12).all());
    CHECK((sol.q.row(t).transpose().array() <= fx.model.joint_upper.array() + 1e-12).all());
  }
}

TEST_CASE("trajectory objective/constraint gradients match finite differences") {
  GraspFixture fx = make_fixture();
  MapperConfig cfg;
  const auto vt = virtual_targets(fx.contacts, MatX3::Zero(4, 3), fx.frames);
  Pose target = fx.object;
  target.p += Vec3(0.01, 0.02, 0.015);
  target.R = so3::exp(Vec3(0.02, -0.01, 0.03));
  NlpProblem prob = build_trajectory_nlp(fx.model, JointState(fx.q0), vt, fx.object, target, cfg);

  test::Rng rng(72);
  for (int k = 0; k < 20; ++k) {
    VecX z = prob.x0;
    z += 0.05 * rng.vector(z.size());
    z.head(32) = z.head(32).cwiseMax(prob.lower.head(32)).cwiseMin(prob.upper.head(32));
    CHECK(max_gradient_error(prob, z) <= 1e-4);
  }
}

TEST_CASE("unreachable virtual targets raise InfeasibleError") {
  GraspFixture fx = make_fixture();
  MapperConfig cfg;
  MatX3 far = fx.contacts;
  far.col(2).array() += 1.0;  // one meter up: outside the workspace
  const auto vt = virtual_targets(far, MatX3::Zero(4, 3), fx.frames);
  CHECK_THROWS_AS(
      solve_joint_trajectory(fx.model, JointState(fx.q0), vt, fx.object, fx.object, cfg),
      InfeasibleError);
}

TEST_CASE("mapper config validation") {
  MapperConfig cfg;
  cfg.epsilon_m = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = MapperConfig{};
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}
