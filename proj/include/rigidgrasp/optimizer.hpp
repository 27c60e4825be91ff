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

// Constrained-optimization backends for the force planner and the motion
// mapper: an equality-constrained QP solved through its KKT system, and a
// small dense SQP method (BFGS Hessian, L1 merit line search) for smooth
// nonlinear programs with analytic gradients.

#ifndef RIGIDGRASP_OPTIMIZER_HPP_
#define RIGIDGRASP_OPTIMIZER_HPP_

#include <functional>
#include <string>

#include "rigidgrasp/types.hpp"

namespace rg {

/// minimize 1/2 x'Hx + g'x  subject to  Ax = b.
struct EqQP {
  MatX H;
  VecX g;
  MatX A;
  VecX b;
};

enum class SolveStatus { kConverged, kIterationLimit, kInfeasible, kNumericError };

struct SolveReport {
  VecX x;
  double objective = 0.0;
  double max_violation = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::kNumericError;
  VecX eq_multipliers;
  VecX ineq_multipliers;  // includes bound rows (lower first, then upper)
  std::string message;

  bool ok() const { return status == SolveStatus::kConverged; }
};

/// KKT solve of an equality-constrained QP. The linear system is solved with
/// a rank-revealing decomposition, so redundant-but-consistent constraint
/// rows are fine; an inconsistent system raises RankDeficiencyError.
SolveReport solve_eq_qp(const EqQP& p, double residual_tol = 1e-10);

/// Smooth NLP with analytic derivatives:
///   min f(x)  s.t.  c_eq(x) = 0,  c_ineq(x) >= 0,  lower <= x <= upper.
/// Callbacks fill gradients/Jacobians only when the pointer is non-null.
struct NlpProblem {
  int n = 0;
  std::function<double(const VecX& x, VecX* grad)> objective;
  int eq_dim = 0;
  std::function<void(const VecX& x, VecX& c, MatX* jac)> eq;
  int ineq_dim = 0;
  std::function<void(const VecX& x, VecX& c, MatX* jac)> ineq;
  VecX lower;  // empty = unbounded
  VecX upper;
  VecX x0;
};

struct NlpOptions {
  double tol = 1e-8;       // stationarity
  double feas_tol = 1e-8;  // constraint violation
  int max_iter = 200;
  bool check_gradients = false;   // verify analytic gradients at x0 before solving
  double gradient_check_tol = 1e-4;
};

/// SQP solve. Status kIterationLimit returns the best iterate found; NaN
/// from a callback yields kNumericError.
SolveReport solve_nlp(const NlpProblem& p, const NlpOptions& opts = {});

/// Max relative error between analytic derivatives and central finite
/// differences of objective and constraints at x.
double max_gradient_error(const NlpProblem& p, const VecX& x, double fd_step = 1e-6);

namespace detail {

/// Dense primal-dual interior-point QP:
///   min 1/2 x'Hx + g'x  s.t.  A x = b,  C x >= h.
struct QpResult {
  VecX x;
  VecX y;  // equality multipliers
  VecX z;  // inequality multipliers, >= 0
  bool ok = false;
  int iterations = 0;
  double residual = 0.0;
};

QpResult solve_qp(const MatX& H, const VecX& g, const MatX& A, const VecX& b, const MatX& C,
                  const VecX& h, int max_iter = 80, double tol = 1e-11);

}  // namespace detail

}  // namespace rg

#endif  // RIGIDGRASP_OPTIMIZER_HPP_
