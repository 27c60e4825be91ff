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

#include <cmath>
#include <limits>
#include <sstream>

#include "rigidgrasp/linalg.hpp"

namespace rg {

VecX operational_force(const MatX& G, const Vec6& g_o) {
  if (numerical_rank(G, 1e-9) < 6) {
    throw RankDeficiencyError("operational_force: grasp matrix is rank deficient (degenerate "
                              "grasp), cannot balance a full wrench");
  }
  return -pinv(G) * g_o;
}

VecX rigidity_internal_force(const MatX& R, const MatX& R_dot, const MatX& M_c, const VecX& v_c,
                             const VecX& alpha) {
  Eigen::LDLT<MatX> ldlt(M_c);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularityError("rigidity_internal_force: task inertia M_c is not positive definite");
  }
  const MatX Minv_Rt = ldlt.solve(R.transpose());
  const MatX A = R * Minv_Rt;  // R M_c^{-1} R^T
  const VecX rhs = R_dot * v_c + R * alpha;
  return R.transpose() * (pinv(A) * rhs);
}

namespace {

// Local force of finger i for the running total f_pre + y.
inline Vec3 local_force(const VecX& f_pre, const VecX& y, const std::vector<Mat3>& frames, int i) {
  return frames[i].transpose() * (f_pre.segment<3>(3 * i) + y.segment<3>(3 * i));
}

// Picks an initial null-space squeeze that puts every normal component
// strictly inside [f_n_min, f_n_max]. Returns an empty vector when no
// uniform squeeze along the inward normals can do it.
VecX squeeze_initial_point(const VecX& f_pre, const MatX& G, const std::vector<Mat3>& frames,
                           const FrictionParams& fp) {
  const int m = static_cast<int>(frames.size());
  VecX inward(3 * m);
  for (int i = 0; i < m; ++i) inward.segment<3>(3 * i) = frames[i].col(2);
  // Project the stacked inward normals onto null(G).
  const MatX Gp = pinv(G);
  VecX dir = inward - Gp * (G * inward);
  if (dir.norm() < 1e-9) return VecX();
  // Per-finger normal rate along the squeeze direction.
  VecX rate(m), base(m);
  for (int i = 0; i < m; ++i) {
    rate(i) = frames[i].col(2).dot(dir.segment<3>(3 * i));
    base(i) = frames[i].col(2).dot(f_pre.segment<3>(3 * i));
  }
  const double margin = 1e-3 * (fp.f_n_max - fp.f_n_min);
  double t_lo = 0.0, t_hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    if (std::abs(rate(i)) < 1e-12) {
      if (base(i) < fp.f_n_min + margin || base(i) > fp.f_n_max - margin) return VecX();
      continue;
    }
    double lo = (fp.f_n_min + margin - base(i)) / rate(i);
    double hi = (fp.f_n_max - margin - base(i)) / rate(i);
    if (rate(i) < 0.0) std::swap(lo, hi);
    t_lo = std::max(t_lo, lo);
    t_hi = std::min(t_hi, hi);
  }
  if (t_lo > t_hi) return VecX();
  return VecX(0.5 * (t_lo + t_hi) * dir);
}

}  // namespace

NlpProblem build_friction_nlp(const VecX& f_pre, const MatX& G, const std::vector<Mat3>& frames,
                              const FrictionParams& fp) {
  const int m = static_cast<int>(frames.size());
  if (f_pre.size() != 3 * m || G.cols() != 3 * m) {
    throw DomainError("build_friction_nlp: dimension mismatch");
  }
  const double mu2 = fp.mu * fp.mu;

  NlpProblem prob;
  prob.n = 3 * m;
  prob.objective = [f_pre, frames, m, mu2](const VecX& y, VecX* grad) {
    double f = 0.0;
    if (grad) grad->setZero();
    for (int i = 0; i < m; ++i) {
      const Vec3 l = local_force(f_pre, y, frames, i);
      const double t2 = l.x() * l.x() + l.y() * l.y();
      const double p = l.z();
      f += t2 / (2.0 * mu2 * p * p);
      if (grad) {
        const Vec3 dl(l.x() / (mu2 * p * p), l.y() / (mu2 * p * p), -t2 / (mu2 * p * p * p));
        grad->segment<3>(3 * i) += frames[i] * dl;
      }
    }
    return f;
  };
  prob.eq_dim = 6;
  prob.eq = [G](const VecX& y, VecX& c, MatX* jac) {
    c = G * y;
    if (jac) *jac = G;
  };
  // Per finger: compressive, lower bound, upper bound, squared friction cone.
  prob.ineq_dim = 4 * m;
  prob.ineq = [f_pre, frames, fp, m, mu2](const VecX& y, VecX& c, MatX* jac) {
    if (jac) jac->setZero();
    for (int i = 0; i < m; ++i) {
      const Vec3 l = local_force(f_pre, y, frames, i);
      const double t2 = l.x() * l.x() + l.y() * l.y();
      c(4 * i + 0) = l.z();
      c(4 * i + 1) = l.z() - fp.f_n_min;
      c(4 * i + 2) = fp.f_n_max - l.z();
      c(4 * i + 3) = mu2 * l.z() * l.z() - t2;
      if (jac) {
        const Vec3 zdir = frames[i].col(2);
        jac->block<1, 3>(4 * i + 0, 3 * i) = zdir.transpose();
        jac->block<1, 3>(4 * i + 1, 3 * i) = zdir.transpose();
        jac->block<1, 3>(4 * i + 2, 3 * i) = -zdir.transpose();
        const Vec3 dcone_local(-2.0 * l.x(), -2.0 * l.y(), 2.0 * mu2 * l.z());
        jac->block<1, 3>(4 * i + 3, 3 * i) = (frames[i] * dcone_local).transpose();
      }
    }
  };
  prob.x0 = VecX::Zero(3 * m);
  return prob;
}

VecX friction_internal_force(const VecX& f_pre, const MatX& G, const std::vector<Mat3>& frames,
                             const FrictionParams& fp, const NlpOptions& opts,
                             const VecX& warm_start) {
  fp.validate();
  if (fp.f_n_min <= 0.0) {
    // The tangential/normal ratio objective is unbounded as the normal force
    // approaches zero; a strictly positive lower bound is required here.
    throw DomainError("friction_internal_force: f_n_min must be > 0");
  }
  const int m = static_cast<int>(frames.size());
  NlpProblem prob = build_friction_nlp(f_pre, G, frames, fp);

  // Starting point: warm start if its normals are strictly compressive,
  // otherwise a uniform null-space squeeze.
  VecX x0 = VecX::Zero(3 * m);
  auto normals_ok = [&](const VecX& y) {
    for (int i = 0; i < m; ++i) {
      const double p = local_force(f_pre, y, frames, i).z();
      if (p < fp.f_n_min || p > fp.f_n_max) return false;
    }
    return true;
  };
  if (warm_start.size() == 3 * m && normals_ok(warm_start)) {
    x0 = warm_start;
  } else if (!normals_ok(x0)) {
    const VecX squeezed = squeeze_initial_point(f_pre, G, frames, fp);
    if (squeezed.size() == 0) {
      throw InfeasibleError("friction_internal_force: no null-space squeeze keeps all normal "
                            "forces inside [f_n_min, f_n_max]");
    }
    x0 = squeezed;
  }
  prob.x0 = x0;

  const SolveReport report = solve_nlp(prob, opts);
  if (report.status == SolveStatus::kInfeasible || report.status == SolveStatus::kNumericError ||
      report.max_violation > 10.0 * opts.feas_tol) {
    std::ostringstream oss;
    oss << "friction_internal_force: no feasible internal force found (" << report.message
        << "), max constraint violation " << report.max_violation;
    throw InfeasibleError(oss.str());
  }
  return report.x;
}

PlanCheck verify_plan(const VecX& f_c, const MatX& G, const Vec6& g_o,
                      const std::vector<Mat3>& frames, const FrictionParams& fp, double tol) {
  PlanCheck check;
  check.wrench_residual = (G * f_c + g_o).lpNorm<Eigen::Infinity>();
  std::ostringstream oss;
  if (check.wrench_residual > tol) {
    check.ok = false;
    oss << "wrench residual " << check.wrench_residual << " above " << tol << "; ";
  }
  const int m = static_cast<int>(frames.size());
  for (int i = 0; i < m; ++i) {
    const Vec3 l = frames[i].transpose() * f_c.segment<3>(3 * i);
    ConeMargin cm = cone_margin(l, fp);
    // Re-evaluate the flags with the audit tolerance.
    cm.cone_violated = cm.tangential > fp.mu * cm.normal + tol;
    cm.below_min = cm.normal < fp.f_n_min - tol;
    cm.above_max = cm.normal > fp.f_n_max + tol;
    if (!cm.ok()) {
      check.ok = false;
      oss << "finger " << i << (cm.cone_violated ? " cone" : cm.below_min ? " below f_n_min"
                                                                          : " above f_n_max")
          << " violated; ";
    }
    check.margins.push_back(cm);
  }
  check.summary = oss.str();
  return check;
}

ForcePlan plan_contact_forces(const PlannerInputs& in) {
  in.grasp.validate();
  in.friction.validate();
  const int m = in.grasp.num_contacts();
  if (in.framework.m != m) throw DomainError("plan_contact_forces: framework/grasp size mismatch");

  const RigidityEvaluation rigidity = is_infinitesimally_rigid(in.framework);
  if (!rigidity.is_rigid) {
    throw DomainError("plan_contact_forces: contact framework is not infinitesimally rigid "
                      "(rank " + std::to_string(rigidity.rank) + " of " +
                      std::to_string(3 * m - 6) + ")");
  }

  const MatX G = grasp_matrix(in.grasp);
  const auto frames = contact_frames(in.grasp);

  ForcePlan plan;
  plan.f_ope = operational_force(G, in.gravity_wrench);
  const MatX R_dot = rigidity_matrix_rate(in.framework, in.contact_velocity);
  plan.f_int_R =
      rigidity_internal_force(rigidity.R, R_dot, in.task_inertia, in.contact_velocity, in.alpha);

  const VecX f_pre = plan.f_ope + plan.f_int_R;
  bool violated = false;
  for (int i = 0; i < m; ++i) {
    const ConeMargin cm = cone_margin(frames[i].transpose() * f_pre.segment<3>(3 * i), in.friction);
    if (!cm.ok()) {
      violated = true;
      break;
    }
  }

  plan.f_int_mu = VecX::Zero(3 * m);
  if (violated) {
    plan.f_int_mu = friction_internal_force(f_pre, G, frames, in.friction, in.nlp_options,
                                            in.warm_start_f_mu);
    plan.nlp_used = true;
  }
  plan.f_c = plan.f_ope + plan.f_int_R + plan.f_int_mu;

  const PlanCheck check =
      verify_plan(plan.f_c, G, in.gravity_wrench, frames, in.friction, in.safety_tol);
  plan.margins = check.margins;
  if (!check.ok) {
    throw InfeasibleError("plan_contact_forces: emitted force fails the safety audit: " +
                          check.summary);
  }
  return plan;
}

}  // namespace rg
