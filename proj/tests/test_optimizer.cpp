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

#include "rigidgrasp/optimizer.hpp"

#include <doctest.h>

#include "rigidgrasp/linalg.hpp"
#include "test_util.hpp"

using namespace rg;

TEST_CASE("eq qp: trivial and projection cases") {
  SUBCASE("H=I, g=0, Ax=0 gives x=0") {
    EqQP p;
    p.H = MatX::Identity(4, 4);
    p.g = VecX::Zero(4);
    p.A = MatX::Random(2, 4);
    p.b = VecX::Zero(2);
    const auto rep = solve_eq_qp(p);
    CHECK(rep.x.norm() < 1e-12);
  }

  SUBCASE("min ||x-a||^2 s.t. Ax=0 is the null-space projection") {
    test::Rng rng(51);
    const MatX A = rng.matrix(2, 5);
    const VecX a = rng.vector(5);
    EqQP p;
    p.H = 2.0 * MatX::Identity(5, 5);
    p.g = -2.0 * a;
    p.A = A;
    p.b = VecX::Zero(2);
    const auto rep = solve_eq_qp(p);
    const VecX expected = a - pinv(A) * (A * a);
    CHECK((rep.x - expected).norm() < 1e-10);
  }
}

TEST_CASE("eq qp: KKT residual on random SPD problems") {
  test::Rng rng(52);
  for (int k = 0; k < 50; ++k) {
    const int n = 3 + k % 6;
    const int m = 1 + k % 3;
    EqQP p;
    p.H = rng.spd(n);
    p.g = rng.vector(n);
    p.A = rng.matrix(m, n);
    p.b = rng.vector(m);
    const auto rep = solve_eq_qp(p);
    const double r1 =
        (p.H * rep.x + p.g + p.A.transpose() * rep.eq_multipliers).lpNorm<Eigen::Infinity>();
    const double r2 = (p.A * rep.x - p.b).lpNorm<Eigen::Infinity>();
    CHECK(r1 <= 1e-10 * std::max(1.0, p.g.lpNorm<Eigen::Infinity>()));
    CHECK(r2 <= 1e-10);
  }
}

TEST_CASE("eq qp: redundant-but-consistent rows are fine, inconsistent rows error") {
  test::Rng rng(53);
  const MatX A0 = rng.matrix(2, 4);
  MatX A(4, 4);
  A << A0, A0;  // duplicated rows
  const VecX b0 = rng.vector(2);
  VecX b(4);
  b << b0, b0;
  EqQP p;
  p.H = rng.spd(4);
  p.g = rng.vector(4);
  p.A = A;
  p.b = b;
  const auto rep = solve_eq_qp(p);
  CHECK((p.A * rep.x - p.b).lpNorm<Eigen::Infinity>() < 1e-10);

  b(3) += 1.0;  // now inconsistent
  p.b = b;
  CHECK_THROWS_AS(solve_eq_qp(p), RankDeficiencyError);
}

TEST_CASE("eq qp rejects asymmetric H") {
  EqQP p;
  p.H = MatX::Identity(3, 3);
  p.H(0, 1) = 0.5;
  p.g = VecX::Zero(3);
  p.A = MatX();
  p.b = VecX();
  CHECK_THROWS_AS(solve_eq_qp(p), DomainError);
}

TEST_CASE("interior-point qp: box-constrained projection") {
  test::Rng rng(54);
  for (int k = 0; k < 20; ++k) {
    const int n = 4;
    const VecX c = rng.vector(n, -2.0, 2.0);
    // min 1/2||x - c||^2 s.t. x >= 0  ->  x = max(c, 0).
    const auto res = detail::solve_qp(MatX::Identity(n, n), -c, MatX(), VecX(),
                                      MatX::Identity(n, n), VecX::Zero(n));
    REQUIRE(res.ok);
    CHECK((res.x - c.cwiseMax(0.0)).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("interior-point qp: equality and inequality mix") {
  // min 1/2 x'x s.t. x0 + x1 = 1, x0 >= 0.8  ->  x = (0.8, 0.2).
  MatX A(1, 2);
  A << 1, 1;
  VecX b(1);
  b << 1;
  MatX C(1, 2);
  C << 1, 0;
  VecX h(1);
  h << 0.8;
  const auto res = detail::solve_qp(MatX::Identity(2, 2), VecX::Zero(2), A, b, C, h);
  REQUIRE(res.ok);
  CHECK(res.x(0) == doctest::Approx(0.8).epsilon(1e-8));
  CHECK(res.x(1) == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(res.z(0) > 0.0);  // active constraint has positive multiplier
}

namespace {

NlpProblem quadratic_bowl() {
  NlpProblem p;
  p.n = 2;
  p.objective = [](const VecX& x, VecX* g) {
    const VecX c = (VecX(2) << 1.0, 2.0).finished();
    if (g) *g = 2.0 * (x - c);
    return (x - c).squaredNorm();
  };
  p.x0 = VecX::Zero(2);
  return p;
}

}  // namespace

TEST_CASE("nlp: unconstrained quadratic") {
  const auto rep = solve_nlp(quadratic_bowl());
  REQUIRE(rep.ok());
  CHECK((rep.x - (VecX(2) << 1.0, 2.0).finished()).norm() < 1e-8);
}

TEST_CASE("nlp: active bound x >= 1 on min x^2") {
  NlpProblem p;
  p.n = 1;
  p.objective = [](const VecX& x, VecX* g) {
    if (g) (*g)(0) = 2.0 * x(0);
    return x(0) * x(0);
  };
  p.lower = VecX::Constant(1, 1.0);
  p.upper = VecX::Constant(1, std::numeric_limits<double>::infinity());
  p.x0 = VecX::Constant(1, 3.0);
  const auto rep = solve_nlp(p);
  REQUIRE(rep.ok());
  CHECK(rep.x(0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("nlp: min x+y on the unit disk") {
  NlpProblem p;
  p.n = 2;
  p.objective = [](const VecX& x, VecX* g) {
    if (g) *g = VecX::Ones(2);
    return x.sum();
  };
  p.ineq_dim = 1;
  p.ineq = [](const VecX& x, VecX& c, MatX* j) {
    c(0) = 1.0 - x.squaredNorm();
    if (j) j->row(0) = -2.0 * x.transpose();
  };
  p.x0 = VecX::Zero(2);
  const auto rep = solve_nlp(p);
  REQUIRE(rep.ok());
  const double s = -std::sqrt(0.5);
  CHECK(std::abs(rep.x(0) - s) < 1e-6);
  CHECK(std::abs(rep.x(1) - s) < 1e-6);
}

TEST_CASE("nlp: nonlinear equality constraint") {
  // min ||x||^2 s.t. x0 + x1 = 1 -> (0.5, 0.5).
  NlpProblem p;
  p.n = 2;
  p.objective = [](const VecX& x, VecX* g) {
    if (g) *g = 2.0 * x;
    return x.squaredNorm();
  };
  p.eq_dim = 1;
  p.eq = [](const VecX& x, VecX& c, MatX* j) {
    c(0) = x.sum() - 1.0;
    if (j) j->row(0) = VecX::Ones(2).transpose();
  };
  p.x0 = (VecX(2) << 2.0, -3.0).finished();
  const auto rep = solve_nlp(p);
  REQUIRE(rep.ok());
  CHECK((rep.x - VecX::Constant(2, 0.5)).norm() < 1e-7);
}

TEST_CASE("nlp: determinism") {
  const auto r1 = solve_nlp(quadratic_bowl());
  const auto r2 = solve_nlp(quadratic_bowl());
  CHECK(r1.x == r2.x);  // bitwise
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("nlp: NaN objective reports a numeric error") {
  NlpProblem p;
  p.n = 1;
  p.objective = [](const VecX&, VecX* g) {
    if (g) (*g)(0) = std::numeric_limits<double>::quiet_NaN();
    return std::numeric_limits<double>::quiet_NaN();
  };
  p.x0 = VecX::Zero(1);
  const auto rep = solve_nlp(p);
  CHECK(rep.status == SolveStatus::kNumericError);
}

TEST_CASE("nlp: iteration limit returns the best iterate") {
  NlpProblem p = quadratic_bowl();
  NlpOptions opts;
  opts.max_iter = 1;
  const auto rep = solve_nlp(p, opts);
  CHECK(rep.status == SolveStatus::kIterationLimit);
  CHECK(rep.x.size() == 2);
  // One full Newton-like step on a quadratic already lands at the optimum.
  CHECK(rep.objective <= quadratic_bowl().objective(p.x0, nullptr));
}

TEST_CASE("gradient gate") {
  NlpProblem good = quadratic_bowl();
  NlpOptions opts;
  opts.check_gradients = true;
  CHECK(solve_nlp(good, opts).ok());
  CHECK(max_gradient_error(good, (VecX(2) << 0.3, -0.7).finished()) < 1e-6);

  NlpProblem bad = quadratic_bowl();
  bad.objective = [](const VecX& x, VecX* g) {
    const VecX c = (VecX(2) << 1.0, 2.0).finished();
    if (g) *g = 3.7 * (x - c);  // wrong scale
    return (x - c).squaredNorm();
  };
  CHECK_THROWS_AS(solve_nlp(bad, opts), DomainError);
}
