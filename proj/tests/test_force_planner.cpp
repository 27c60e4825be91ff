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

#include "rigidgrasp/force_planner.hpp"

#include <doctest.h>

#include "rigidgrasp/linalg.hpp"
#include "test_util.hpp"

using namespace rg;

namespace {

// Four symmetric side contacts on a 3 cm cylinder, like the cup grasp.
GraspState cup_grasp(double mass = 0.053) {
  GraspState gs;
  gs.points.resize(4, 3);
  gs.normals.resize(4, 3);
  for (int i = 0; i < 4; ++i) {
    const double th = M_PI / 2 * i;
    gs.points.row(i) = Vec3(0.03 * std::cos(th), 0.03 * std::sin(th), 0.09).transpose();
    gs.normals.row(i) = Vec3(std::cos(th), std::sin(th), 0).transpose();
  }
  gs.object_cm = Vec3(0, 0, 0.09);
  gs.mass = mass;
  return gs;
}

VecX stack_rows(const MatX3& pts) {
  VecX out(3 * pts.rows());
  for (int i = 0; i < pts.rows(); ++i) out.segment<3>(3 * i) = pts.row(i).transpose();
  return out;
}

Vec6 gravity_wrench(double mass) {
  Vec6 g = Vec6::Zero();
  g(2) = -mass * 9.81;
  return g;
}

// Independent route to the minimum-norm balancing force, using Eigen's
// rank-revealing decomposition instead of the library pinv.
VecX min_norm_oracle(const MatX& G, const Vec6& g_o) {
  Eigen::CompleteOrthogonalDecomposition<MatX> cod(G);
  return cod.solve(VecX(-g_o));
}

}  // namespace

TEST_CASE("operational force: zero gravity gives zero force") {
  const GraspState gs = cup_grasp();
  const MatX G = grasp_matrix(gs);
  CHECK(operational_force(G, Vec6::Zero()).norm() < 1e-14);
}

TEST_CASE("operational force balances a 53 g cup") {
  const GraspState gs = cup_grasp(0.053);
  const MatX G = grasp_matrix(gs);
  const Vec6 g_o = gravity_wrench(0.053);  // ~0.52 N downward
  const VecX f = operational_force(G, g_o);

  CHECK((G * f + g_o).lpNorm<Eigen::Infinity>() < 1e-10);
  double fz_total = 0.0;
  for (int i = 0; i < 4; ++i) fz_total += f(3 * i + 2);
  CHECK(fz_total == doctest::Approx(0.053 * 9.81).epsilon(1e-9));
  // Symmetric split across the four fingers.
  for (int i = 1; i < 4; ++i) {
    CHECK(f(3 * i + 2) == doctest::Approx(f(2)).epsilon(1e-9));
  }
  // Matches the independent minimum-norm oracle.
  CHECK((f - min_norm_oracle(G, g_o)).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("operational force is minimum norm") {
  test::Rng rng(61);
  const GraspState gs = cup_grasp(0.06);
  const MatX G = grasp_matrix(gs);
  const Vec6 g_o = gravity_wrench(0.06);
  const VecX f = operational_force(G, g_o);
  // Any null-space perturbation only increases the norm.
  const MatX Gp = pinv(G);
  for (int k = 0; k < 50; ++k) {
    const VecX raw = rng.vector(12);
    const VecX null_dir = raw - Gp * (G * raw);
    const VecX f2 = f + null_dir;
    CHECK((G * f2 + g_o).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK(f2.norm() >= f.norm() - 1e-12);
  }
}

TEST_CASE("operational force rejects degenerate grasps") {
  GraspState gs;
  gs.points.resize(3, 3);
  gs.normals.resize(3, 3);
  for (int i = 0; i < 3; ++i) {
    gs.points.row(i) = Vec3(0.01 * i, 0, 0).transpose();  // collinear
    gs.normals.row(i) = Vec3(0, 0, 1).transpose();
  }
  gs.object_cm = Vec3::Zero();
  const MatX G = grasp_matrix(gs);
  CHECK_THROWS_AS(operational_force(G, gravity_wrench(0.01)), RankDeficiencyError);
}

TEST_CASE("rigidity internal force: static and rigid-consistent motions vanish") {
  const GraspState gs = cup_grasp();
  const auto F = ContactFramework::complete(gs.points);
  const MatX R = rigidity_matrix(F);
  const MatX M_c = MatX::Identity(12, 12);

  CHECK(rigidity_internal_force(R, rigidity_matrix_rate(F, VecX::Zero(12)), M_c, VecX::Zero(12),
                                VecX::Zero(12))
            .norm() < 1e-12);

  // Uniform translation: R alpha = 0 and R_dot = 0.
  VecX alpha(12);
  for (int i = 0; i < 4; ++i) alpha.segment<3>(3 * i) = Vec3(0.1, -0.2, 0.3);
  const VecX f = rigidity_internal_force(R, rigidity_matrix_rate(F, VecX::Zero(12)), M_c,
                                         VecX::Zero(12), alpha);
  CHECK(f.norm() < 1e-12);
}

TEST_CASE("rigidity internal force equals the QP route") {
  test::Rng rng(62);
  int checked = 0;
  for (int k = 0; k < 30; ++k) {
    const int m = 4 + k % 3;
    const MatX3 pts = rng.generic_points(m);
    const auto F = ContactFramework::complete(pts);
    if (!is_infinitesimally_rigid(F).is_rigid) continue;
    const MatX R = rigidity_matrix(F);
    const MatX M_c = rng.spd(3 * m, 1.0);
    const VecX v_c = rng.vector(3 * m, -0.1, 0.1);
    const VecX alpha = rng.vector(3 * m);
    const MatX R_dot = rigidity_matrix_rate(F, v_c);

    const VecX f_closed = rigidity_internal_force(R, R_dot, M_c, v_c, alpha);

    // QP route: minimize (vdot - alpha)' M_c (vdot - alpha) subject to
    // R vdot = -R_dot v_c, then f = M_c (alpha - vdot).
    EqQP qp;
    qp.H = 2.0 * M_c;
    qp.g = -2.0 * (M_c * alpha);
    qp.A = R;
    qp.b = -R_dot * v_c;
    const auto rep = solve_eq_qp(qp, 1e-9);
    const VecX f_qp = M_c * (alpha - rep.x);

    const double rel = (f_closed - f_qp).norm() / std::max(1.0, f_qp.norm());
    CHECK(rel <= 1e-6);

    // Null-space purity against the grasp matrix at these contacts.
    GraspState gs;
    gs.points = pts;
    gs.normals.resize(m, 3);
    for (int i = 0; i < m; ++i) gs.normals.row(i) = rng.unit3().transpose();
    gs.object_cm = Vec3::Zero();
    CHECK((grasp_matrix(gs) * f_closed).lpNorm<Eigen::Infinity>() <
          1e-8 * std::max(1.0, f_closed.norm()));
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("rigidity internal force requires positive definite M_c") {
  const GraspState gs = cup_grasp();
  const auto F = ContactFramework::complete(gs.points);
  const MatX R = rigidity_matrix(F);
  MatX bad = MatX::Identity(12, 12);
  bad(5, 5) = -1.0;
  CHECK_THROWS_AS(
      rigidity_internal_force(R, rigidity_matrix_rate(F, VecX::Zero(12)), bad, VecX::Zero(12),
                              VecX::Ones(12)),
      SingularityError);
}

TEST_CASE("rigidity internal force is invariant to rigid components of alpha") {
  test::Rng rng(63);
  const GraspState gs = cup_grasp();
  const auto F = ContactFramework::complete(gs.points);
  const MatX R = rigidity_matrix(F);
  const MatX M_c = rng.spd(12, 1.0);
  const VecX v_c = rng.vector(12, -0.05, 0.05);
  const MatX R_dot = rigidity_matrix_rate(F, v_c);
  const VecX alpha = rng.vector(12);

  const VecX f0 = rigidity_internal_force(R, R_dot, M_c, v_c, alpha);
  // Add a rigid velocity field (translation + rotation): R alpha unchanged.
  VecX rigid(12);
  const Vec3 t = rng.vec3(), w = rng.vec3();
  for (int i = 0; i < 4; ++i) {
    rigid.segment<3>(3 * i) = t + w.cross(Vec3(gs.points.row(i).transpose()));
  }
  CHECK((R * rigid).lpNorm<Eigen::Infinity>() < 1e-12);
  const VecX f1 = rigidity_internal_force(R, R_dot, M_c, v_c, alpha + rigid);
  CHECK((f0 - f1).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("friction NLP: skip path when the preliminary force is safe") {
  const GraspState gs = cup_grasp(0.0);
  PlannerInputs in;
  in.grasp = gs;
  in.framework = ContactFramework::complete(gs.points);
  in.friction = FrictionParams{0.65, 0.0, 1.0};  // f_n_min = 0: nothing to hold
  in.gravity_wrench = Vec6::Zero();
  in.task_inertia = MatX::Identity(12, 12);
  in.contact_velocity = VecX::Zero(12);
  in.alpha = VecX::Zero(12);
  const ForcePlan plan = plan_contact_forces(in);
  CHECK_FALSE(plan.nlp_used);
  CHECK(plan.f_c.norm() < 1e-12);
  for (const auto& cm : plan.margins) CHECK(cm.ok());
}

TEST_CASE("friction NLP: squeeze raises normals into range") {
  const GraspState gs = cup_grasp(0.053);
  const MatX G = grasp_matrix(gs);
  const auto frames = contact_frames(gs);
  const FrictionParams fp{0.65, 0.1, 2.0};
  const Vec6 g_o = gravity_wrench(gs.mass);
  const VecX f_pre = operational_force(G, g_o);

  // The operational force alone leaves the normal components below f_n_min.
  VecX fperp_pre, fpar_pre;
  decompose_force(f_pre, frames, fperp_pre, fpar_pre);
  CHECK(fperp_pre.minCoeff() < fp.f_n_min);

  const VecX f_mu = friction_internal_force(f_pre, G, frames, fp);
  CHECK((G * f_mu).lpNorm<Eigen::Infinity>() < 1e-8);

  const VecX f_c = f_pre + f_mu;
  // All six constraint groups of the program, checked directly.
  VecX fperp, fpar;
  decompose_force(f_c, frames, fperp, fpar);
  for (int i = 0; i < 4; ++i) {
    CHECK(fperp(i) >= -1e-6);                       // compressive
    CHECK(fperp(i) >= fp.f_n_min - 1e-6);           // lower bound
    CHECK(fperp(i) <= fp.f_n_max + 1e-6);           // upper bound
    CHECK(fpar(i) <= fp.mu * fperp(i) + 1e-6);      // cone
  }
  CHECK((f_c - (f_pre + f_mu)).norm() == 0.0);      // decomposition identity
  CHECK((G * f_c + g_o).lpNorm<Eigen::Infinity>() < 1e-8);  // wrench balance
}

TEST_CASE("friction NLP: symmetric grasp yields a symmetric squeeze at the bound") {
  const GraspState gs = cup_grasp(0.053);
  const MatX G = grasp_matrix(gs);
  const auto frames = contact_frames(gs);
  const FrictionParams fp{0.65, 0.1, 2.0};
  const VecX f_pre = operational_force(G, gravity_wrench(gs.mass));

  const VecX f_mu = friction_internal_force(f_pre, G, frames, fp);
  VecX fperp, fpar;
  decompose_force(f_pre + f_mu, frames, fperp, fpar);
  VecX fperp_pre, fpar_pre;
  decompose_force(f_pre, frames, fperp_pre, fpar_pre);

  // 1-DOF oracle: a uniform inward squeeze of magnitude t leaves tangentials
  // unchanged, so the objective sum of (f_par / (mu (f_perp0 + t)))^2 is
  // strictly decreasing in t; bisection on the derivative confirms the
  // optimum sits at the upper normal-force bound.
  const double fperp0 = fperp_pre(0);
  auto dobj = [&](double t) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double p = fperp0 + t;
      d += -fpar_pre(i) * fpar_pre(i) / (fp.mu * fp.mu * p * p * p);
    }
    return d;
  };
  double lo = fp.f_n_min - fperp0, hi = fp.f_n_max - fperp0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (dobj(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  CHECK(lo + fperp0 == doctest::Approx(fp.f_n_max).epsilon(1e-6));

  for (int i = 0; i < 4; ++i) {
    CHECK(fperp(i) == doctest::Approx(fp.f_n_max).epsilon(1e-5));
    CHECK(fperp(i) == doctest::Approx(fperp(0)).epsilon(1e-6));  // equal increments
  }
}

TEST_CASE("friction NLP: infeasible bounds raise InfeasibleError") {
  const GraspState gs = cup_grasp(0.5);  // heavy: needs large tangential support
  const MatX G = grasp_matrix(gs);
  const auto frames = contact_frames(gs);
  // mu * f_n_max cannot reach the required tangential force of ~1.23 N/finger.
  const FrictionParams fp{0.3, 0.05, 0.5};
  const VecX f_pre = operational_force(G, gravity_wrench(gs.mass));
  CHECK_THROWS_AS(friction_internal_force(f_pre, G, frames, fp), InfeasibleError);
}

TEST_CASE("friction NLP requires a positive f_n_min") {
  const GraspState gs = cup_grasp(0.053);
  const MatX G = grasp_matrix(gs);
  const auto frames = contact_frames(gs);
  const VecX f_pre = operational_force(G, gravity_wrench(gs.mass));
  CHECK_THROWS_AS(friction_internal_force(f_pre, G, frames, FrictionParams{0.65, 0.0, 2.0}),
                  DomainError);
}

TEST_CASE("plan_contact_forces: full pipeline on the cup") {
  const GraspState gs = cup_grasp(0.053);
  PlannerInputs in;
  in.grasp = gs;
  in.framework = ContactFramework::complete(gs.points);
  in.friction = FrictionParams{0.65, 0.1, 2.0};
  in.gravity_wrench = gravity_wrench(gs.mass);
  in.task_inertia = MatX::Identity(12, 12);
  in.contact_velocity = VecX::Zero(12);
  in.alpha = VecX::Zero(12);

  const ForcePlan plan = plan_contact_forces(in);
  CHECK(plan.nlp_used);  // gravity alone violates f_n_min
  CHECK((plan.f_c - (plan.f_ope + plan.f_int_R + plan.f_int_mu)).norm() == 0.0);
  const MatX G = grasp_matrix(gs);
  CHECK((G * plan.f_int_R).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK((G * plan.f_int_mu).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK((G * plan.f_c + in.gravity_wrench).lpNorm<Eigen::Infinity>() < 1e-6);
  for (const auto& cm : plan.margins) CHECK(cm.ok());
}

TEST_CASE("plan_contact_forces rejects non-rigid frameworks") {
  const GraspState gs = cup_grasp(0.053);
  // A 4-cycle of edges is too sparse to be rigid.
  PlannerInputs in;
  in.grasp = gs;
  in.framework =
      ContactFramework(4, stack_rows(gs.points), {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  in.friction = FrictionParams{0.65, 0.1, 2.0};
  in.gravity_wrench = gravity_wrench(gs.mass);
  in.task_inertia = MatX::Identity(12, 12);
  in.contact_velocity = VecX::Zero(12);
  in.alpha = VecX::Zero(12);
  CHECK_THROWS_AS(plan_contact_forces(in), DomainError);
}

TEST_CASE("friction NLP gradients match finite differences") {
  test::Rng rng(64);
  const GraspState gs = cup_grasp(0.053);
  const MatX G = grasp_matrix(gs);
  const auto frames = contact_frames(gs);
  const FrictionParams fp{0.65, 0.1, 2.0};
  const VecX f_pre = operational_force(G, gravity_wrench(gs.mass));
  NlpProblem prob = build_friction_nlp(f_pre, G, frames, fp);
  for (int k = 0; k < 20; ++k) {
    // Points with safely nonzero normal components.
    VecX y(12);
    for (int i = 0; i < 4; ++i) {
      y.segment<3>(3 * i) =
          frames[i].col(2) * rng.uniform(0.5, 1.5) + 0.1 * rng.vec3();
    }
    CHECK(max_gradient_error(prob, y) <= 1e-4);
  }
}
