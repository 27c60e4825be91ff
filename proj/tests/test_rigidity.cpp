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

#include "rigidgrasp/rigidity.hpp"

#include <doctest.h>

#include "rigidgrasp/grasp.hpp"
#include "test_util.hpp"

using namespace rg;

namespace {

MatX3 unit_tetrahedron() {
  // Four points with all pairwise distances 1.
  MatX3 pts(4, 3);
  pts.row(0) << 0, 0, 0;
  pts.row(1) << 1, 0, 0;
  pts.row(2) << 0.5, std::sqrt(3.0) / 2.0, 0;
  pts.row(3) << 0.5, std::sqrt(3.0) / 6.0, std::sqrt(6.0) / 3.0;
  return pts;
}

VecX stack(const MatX3& pts) {
  VecX v(3 * pts.rows());
  for (int i = 0; i < pts.rows(); ++i) v.segment<3>(3 * i) = pts.row(i).transpose();
  return v;
}

// Six-dimensional basis of rigid velocity fields on a point set.
std::vector<VecX> rigid_motion_basis(const MatX3& pts) {
  std::vector<VecX> basis;
  const int m = static_cast<int>(pts.rows());
  for (int a = 0; a < 3; ++a) {
    VecX v = VecX::Zero(3 * m);
    for (int i = 0; i < m; ++i) v(3 * i + a) = 1.0;
    basis.push_back(v);
  }
  for (int a = 0; a < 3; ++a) {
    Vec3 w = Vec3::Zero();
    w(a) = 1.0;
    VecX v(3 * m);
    for (int i = 0; i < m; ++i) v.segment<3>(3 * i) = w.cross(pts.row(i).transpose());
    basis.push_back(v);
  }
  return basis;
}

}  // namespace

TEST_CASE("framework construction validates edges") {
  const MatX3 pts = unit_tetrahedron();
  CHECK_THROWS_AS(ContactFramework(4, stack(pts), {{0, 0}}), DomainError);
  CHECK_THROWS_AS(ContactFramework(4, stack(pts), {{0, 4}}), DomainError);
  CHECK_THROWS_AS(ContactFramework(4, stack(pts), {{0, 1}, {1, 0}}), DomainError);
  // Canonical ordering is lexicographic with i < j.
  const ContactFramework F(4, stack(pts), {{3, 1}, {2, 0}, {1, 0}});
  CHECK(F.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 3}});
}

TEST_CASE("rigidity function: two points and degenerate coincidence") {
  VecX p(6);
  p << 0, 0, 0, 1, 0, 0;
  const ContactFramework F(2, p, {{0, 1}});
  CHECK(rigidity_function(F)(0) == doctest::Approx(1.0));

  VecX p0 = VecX::Zero(6);
  const ContactFramework F0(2, p0, {{0, 1}});
  CHECK(rigidity_function(F0)(0) == 0.0);
}

TEST_CASE("rigidity function on the unit tetrahedron") {
  const auto F = ContactFramework::complete(unit_tetrahedron());
  const VecX phi = rigidity_function(F);
  REQUIRE(phi.size() == 6);
  for (int e = 0; e < 6; ++e) CHECK(phi(e) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rigidity matrix: explicit two-point row") {
  VecX p(6);
  p << 0, 0, 0, 1, 0, 0;
  const ContactFramework F(2, p, {{0, 1}});
  const MatX R = rigidity_matrix(F);
  VecX expected(6);
  expected << -2, 0, 0, 2, 0, 0;
  CHECK((R.row(0).transpose() - expected).norm() < 1e-14);
}

TEST_CASE("rigidity matrix annihilates rigid motions") {
  test::Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const MatX3 pts = rng.generic_points(4 + k % 3);
    const auto F = ContactFramework::complete(pts);
    const MatX R = rigidity_matrix(F);
    for (const auto& v : rigid_motion_basis(pts)) {
      CHECK((R * v).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

TEST_CASE("rigidity matrix rows are vertex-block antisymmetric") {
  test::Rng rng(32);
  const MatX3 pts = rng.generic_points(5);
  const auto F = ContactFramework::complete(pts);
  const MatX R = rigidity_matrix(F);
  for (int e = 0; e < F.edge_count(); ++e) {
    const auto [i, j] = F.edges[e];
    CHECK((R.block<1, 3>(e, 3 * i) + R.block<1, 3>(e, 3 * j)).norm() == 0.0);
  }
}

TEST_CASE("rigidity matrix matches finite differences of the rigidity function") {
  test::Rng rng(33);
  const double h = 1e-6;
  for (int k = 0; k < 10; ++k) {
    const MatX3 pts = rng.generic_points(4);
    const auto F = ContactFramework::complete(pts);
    const MatX R = rigidity_matrix(F);
    const VecX p = stack(pts);
    for (int c = 0; c < p.size(); ++c) {
      VecX pp = p, pm = p;
      pp(c) += h;
      pm(c) -= h;
      const VecX fd = (rigidity_function(ContactFramework(4, pp, F.edges)) -
                       rigidity_function(ContactFramework(4, pm, F.edges))) /
                      (2 * h);
      const VecX an = R.col(c);
      CHECK((fd - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
    }
  }
}

TEST_CASE("rigidity matrix rate") {
  test::Rng rng(34);
  const MatX3 pts = rng.generic_points(4);
  const auto F = ContactFramework::complete(pts);

  SUBCASE("zero and uniform-translation velocities give zero rate") {
    CHECK(rigidity_matrix_rate(F, VecX::Zero(12)).norm() == 0.0);
    VecX v(12);
    for (int i = 0; i < 4; ++i) v.segment<3>(3 * i) = Vec3(0.3, -0.2, 0.9);
    CHECK(rigidity_matrix_rate(F, v).norm() == 0.0);
  }

  SUBCASE("matches the directional difference of R") {
    const VecX v = rng.vector(12);
    const double h = 1e-6;
    const VecX p = stack(pts);
    const MatX fd = (rigidity_matrix(ContactFramework(4, p + h * v, F.edges)) -
                     rigidity_matrix(ContactFramework(4, p, F.edges))) /
                    h;
    const MatX an = rigidity_matrix_rate(F, v);
    CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, an.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rank condition on K4 and degenerate cases") {
  const auto eval = is_infinitesimally_rigid(ContactFramework::complete(unit_tetrahedron()));
  CHECK(eval.rank == 6);
  CHECK(eval.is_rigid);

  // Three collinear points: rank 2 < 3 = 3m - 6 for m = 3.
  MatX3 collinear(3, 3);
  collinear.row(0) << 0, 0, 0;
  collinear.row(1) << 1, 0, 0;
  collinear.row(2) << 2, 0, 0;
  const auto bad = is_infinitesimally_rigid(ContactFramework::complete(collinear));
  CHECK(bad.rank == 2);
  CHECK_FALSE(bad.is_rigid);

  // A 4-cycle has too few edges to be rigid in R^3.
  MatX3 pts = unit_tetrahedron();
  const ContactFramework cycle(4, stack(pts), {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const auto weak = is_infinitesimally_rigid(cycle);
  CHECK(weak.rank <= 4);
  CHECK_FALSE(weak.is_rigid);

  // m < 3 is rejected.
  VecX two(6);
  two << 0, 0, 0, 1, 0, 0;
  CHECK_THROWS_AS(is_infinitesimally_rigid(ContactFramework(2, two, {{0, 1}})), DomainError);
}

TEST_CASE("null space of a rigid framework is exactly the rigid motions") {
  test::Rng rng(35);
  for (int k = 0; k < 50; ++k) {
    const int m = 4 + k % 3;
    const MatX3 pts = rng.generic_points(m);
    const auto F = ContactFramework::complete(pts);
    const auto eval = is_infinitesimally_rigid(F);
    REQUIRE(eval.is_rigid);
    CHECK(3 * m - eval.rank == 6);
    for (const auto& v : rigid_motion_basis(pts)) {
      CHECK((eval.R * v).lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, v.norm()));
    }
  }
}

TEST_CASE("cross-module: G R^T y carries zero wrench") {
  test::Rng rng(36);
  for (int k = 0; k < 50; ++k) {
    const int m = 4 + k % 3;
    const MatX3 pts = rng.generic_points(m);
    const auto F = ContactFramework::complete(pts);
    GraspState gs;
    gs.points = pts;
    gs.normals.resize(m, 3);
    for (int i = 0; i < m; ++i) gs.normals.row(i) = rng.unit3().transpose();
    gs.object_cm = rng.vec3(-0.2, 0.2);
    const MatX G = grasp_matrix(gs);
    const MatX Rt = rigidity_matrix(F).transpose();
    for (int t = 0; t < 5; ++t) {
      const VecX y = rng.vector(F.edge_count());
      CHECK((G * (Rt * y)).lpNorm<Eigen::Infinity>() < 1e-10);
    }
  }
}

TEST_CASE("trd") {
  const MatX3 pts = unit_tetrahedron();
  const auto F0 = ContactFramework::complete(pts);

  SUBCASE("identity gives zero") { CHECK(trd(F0, F0) == 0.0); }

  SUBCASE("single edge doubling gives 100%") {
    VecX p(6);
    p << 0, 0, 0, 1, 0, 0;
    VecX p2(6);
    p2 << 0, 0, 0, 2, 0, 0;
    const ContactFramework a(2, p, {{0, 1}});
    const ContactFramework b(2, p2, {{0, 1}});
    CHECK(trd(a, b) == doctest::Approx(100.0));
  }

  SUBCASE("one K4 edge shrunk by 10% gives 10%") {
    // Move vertex 1 along the (0,1) edge direction: only d01 changes among
    // edges incident to 0... shrinking one edge of a tetrahedron moves the
    // others too, so build the deviation directly on distances instead:
    // scale the whole configuration of one edge pair is not isolatable;
    // instead compare against a direct distance-sum oracle.
    MatX3 moved = pts;
    moved.row(1) = pts.row(0) + 0.9 * (pts.row(1) - pts.row(0));
    const auto Ft = ContactFramework::complete(moved);
    double expected = 0.0;
    for (const auto& [i, j] : F0.edges) {
      const double d0 = (pts.row(i) - pts.row(j)).norm();
      const double dt = (moved.row(i) - moved.row(j)).norm();
      expected += std::abs(dt - d0) / d0;
    }
    CHECK(trd(F0, Ft) == doctest::Approx(100.0 * expected).epsilon(1e-12));
    CHECK(trd(F0, Ft) >= 10.0 - 1e-9);  // the shrunk edge alone contributes 10%
  }

  SUBCASE("graph mismatch and zero initial distance are domain errors") {
    const ContactFramework other(4, stack(pts), {{0, 1}});
    CHECK_THROWS_AS(trd(F0, other), DomainError);
    VecX z = VecX::Zero(6);
    const ContactFramework zero(2, z, {{0, 1}});
    CHECK_THROWS_AS(trd(zero, zero), DomainError);
  }
}
