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

// Rigidity-based force planner. Splits the total contact force into an
// operational part balancing the external wrench, a rigidity internal force
// enforcing the acceleration-level distance constraints, and (only when the
// preliminary force violates friction or bound constraints) a frictional
// internal force found by a small NLP in the null space of the grasp matrix.

#ifndef RIGIDGRASP_FORCE_PLANNER_HPP_
#define RIGIDGRASP_FORCE_PLANNER_HPP_

#include <vector>

#include "rigidgrasp/grasp.hpp"
#include "rigidgrasp/optimizer.hpp"
#include "rigidgrasp/rigidity.hpp"
#include "rigidgrasp/types.hpp"

namespace rg {

struct ForcePlan {
  VecX f_ope;
  VecX f_int_R;
  VecX f_int_mu;
  VecX f_c;  // f_ope + f_int_R + f_int_mu
  std::vector<ConeMargin> margins;
  bool nlp_used = false;
};

struct PlannerInputs {
  GraspState grasp;
  ContactFramework framework;
  FrictionParams friction;
  Vec6 gravity_wrench = Vec6::Zero();  // g_o acting on the object
  MatX task_inertia;                   // M_c, 3m x 3m
  VecX contact_velocity;               // v_c, 3m
  VecX alpha;                          // unconstrained task acceleration, 3m
  NlpOptions nlp_options;
  VecX warm_start_f_mu;                // optional, 3m
  double safety_tol = 1e-6;            // post-solve cone/bound/wrench tolerance
};

/// Minimum-norm contact force balancing the external wrench: -pinv(G) g_o.
/// Throws RankDeficiencyError if rank(G) < 6.
VecX operational_force(const MatX& G, const Vec6& g_o);

/// Closed-form rigidity internal force
///   R^T (R M_c^{-1} R^T)^+ (R_dot v_c + R alpha).
/// Throws SingularityError when M_c is not positive definite.
VecX rigidity_internal_force(const MatX& R, const MatX& R_dot, const MatX& M_c, const VecX& v_c,
                             const VecX& alpha);

/// Frictional internal force: minimizes the summed squared tangential/normal
/// ratios over the null space of G, subject to compressive contact, friction
/// cones and normal-force bounds on the total force f_pre + f_int_mu.
/// Throws InfeasibleError when no null-space force can satisfy the bounds.
VecX friction_internal_force(const VecX& f_pre, const MatX& G, const std::vector<Mat3>& frames,
                             const FrictionParams& fp, const NlpOptions& opts = {},
                             const VecX& warm_start = VecX());

/// The NLP behind friction_internal_force (variables: f_int_mu). Exposed so
/// its analytic derivatives can be audited against finite differences.
NlpProblem build_friction_nlp(const VecX& f_pre, const MatX& G, const std::vector<Mat3>& frames,
                              const FrictionParams& fp);

/// Full planner pass. The emitted plan always satisfies the friction cones,
/// normal-force bounds and wrench balance within `safety_tol`, or an
/// exception is raised; an unsafe plan is never returned.
ForcePlan plan_contact_forces(const PlannerInputs& in);

/// Constraint audit of a total contact force (used by the planner tests and
/// the plant failure checks).
struct PlanCheck {
  bool ok = true;
  double wrench_residual = 0.0;
  std::vector<ConeMargin> margins;
  std::string summary;  // empty when ok
};

PlanCheck verify_plan(const VecX& f_c, const MatX& G, const Vec6& g_o,
                      const std::vector<Mat3>& frames, const FrictionParams& fp, double tol);

}  // namespace rg

#endif  // RIGIDGRASP_FORCE_PLANNER_HPP_
