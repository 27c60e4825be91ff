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

#include <cmath>
#include <limits>
#include <memory>

namespace rg {

Vec3 penetration_distance(const ComplianceGains& gains, const Vec3& f_local_N) {
  gains.validate();
  return gains.mm_per_N.cwiseProduct(f_local_N);
}

Vec3 penetration_world(const ComplianceGains& gains, const Mat3& frame, const Vec3& f_world_N) {
  const Vec3 d_local = penetration_distance(gains, frame.transpose() * f_world_N);
  return frame * (gains.meters_per_unit * d_local);
}

VirtualTargets virtual_targets(const MatX3& x_c, const MatX3& d_world,
                               const std::vector<Mat3>& frames) {
  if (x_c.rows() != d_world.rows() || static_cast<size_t>(x_c.rows()) != frames.size()) {
    throw DomainError("virtual_targets: inconsistent contact count");
  }
  VirtualTargets vt;
  vt.x_cd = x_c + d_world;
  vt.R_d = frames;
  return vt;
}

namespace {

// Smoothing width of the objective norms. The terminal and orientation terms
// are norms (not squared norms), so the waypoint term keeps a constant-slope
// pull that dominates the small lambda2 regularizer until the error is
// essentially zero; the smoothing only rounds the kink at the origin.
constexpr double kNormSmoothing = 1e-7;

double smooth_norm(const Vec3& v, Vec3* grad_wrt_v) {
  const double s = std::sqrt(v.squaredNorm() + kNormSmoothing * kNormSmoothing);
  if (grad_wrt_v) *grad_wrt_v = v / s;
  return s - kNormSmoothing;
}

// FK cache shared between the objective and constraint callbacks; the SQP
// evaluates both at the same iterate.
struct FkCache {
  VecX key;
  std::vector<std::vector<FingerKinematics>> per_step;  // [t][finger]

  const std::vector<std::vector<FingerKinematics>>& get(const HandModel& model, const VecX& z,
                                                        int T) {
    if (key.size() == z.size() && (key.array() == z.array()).all()) return per_step;
    const int m = model.num_fingers();
    const int n = model.joints_per_finger();
    per_step.assign(T, {});
    for (int t = 0; t < T; ++t) {
      per_step[t].reserve(m);
      for (int i = 0; i < m; ++i) {
        per_step[t].push_back(
            chain_kinematics(model.fingers[i], z.segment(t * m * n + i * n, n)));
      }
    }
    key = z;
    return per_step;
  }
};

}  // namespace

NlpProblem build_trajectory_nlp(const HandModel& model, const JointState& q0,
                                const VirtualTargets& vt, const Pose& object_current,
                                const Pose& object_target, const MapperConfig& cfg) {
  cfg.validate();
  const int m = model.num_fingers();
  const int n = model.joints_per_finger();
  const int T = cfg.horizon;
  const int nq = m * n;
  const int N = T * nq + 6;
  if (vt.x_cd.rows() != m || static_cast<int>(vt.R_d.size()) != m) {
    throw DomainError("build_trajectory_nlp: one virtual target per finger required");
  }

  // Shared immutable context, captured by value in both callbacks.
  struct Context {
    HandModel model;
    VirtualTargets vt;
    Vec3 p_cur;
    Mat3 C_rel;
    Vec3 p_target;
    MapperConfig cfg;
    std::vector<Vec3> offsets;  // world-frame virtual-target offsets
    int m, n, T, nq;
    FkCache cache;
  };
  auto ctx = std::make_shared<Context>();
  ctx->model = model;
  ctx->vt = vt;
  ctx->p_cur = object_current.p;
  ctx->C_rel = object_current.R * object_target.R.transpose();
  ctx->p_target = object_target.p;
  ctx->cfg = cfg;
  ctx->m = m;
  ctx->n = n;
  ctx->T = T;
  ctx->nq = nq;
  ctx->offsets.resize(m);
  for (int i = 0; i < m; ++i) {
    ctx->offsets[i] = vt.x_cd.row(i).transpose() - object_current.p;
  }

  NlpProblem prob;
  prob.n = N;

  prob.objective = [ctx](const VecX& z, VecX* grad) {
    const int T = ctx->T, nq = ctx->nq, m = ctx->m, n = ctx->n;
    const Vec3 u = z.segment<3>(T * nq);
    const Vec3 w = z.segment<3>(T * nq + 3);
    if (grad) grad->setZero();

    // Terminal object pose terms: lambda1-weighted norms of the position and
    // rotation errors.
    const Vec3 w_pos = ctx->cfg.lambda1.head<3>();
    const Vec3 w_rot = ctx->cfg.lambda1.tail<3>();
    const Vec3 e_p = ctx->p_cur + u - ctx->p_target;
    const Vec3 e_r = so3::log(so3::exp(w) * ctx->C_rel, 1e-6);
    Vec3 g_p, g_r;
    double f = smooth_norm(w_pos.cwiseProduct(e_p), &g_p) +
               smooth_norm(w_rot.cwiseProduct(e_r), &g_r);
    if (grad) {
      grad->segment<3>(T * nq) = w_pos.cwiseProduct(g_p);
      const Mat3 de_dw = so3::left_jacobian_inv(e_r) * so3::left_jacobian(w);
      grad->segment<3>(T * nq + 3) = de_dw.transpose() * w_rot.cwiseProduct(g_r);
    }

    // Fingertip orientation deviations from the desired contact frames.
    const auto& fk = ctx->cache.get(ctx->model, z, T);
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < m; ++i) {
        const Vec3 e = so3::log(fk[t][i].tip.R * ctx->vt.R_d[i].transpose(), 1e-6);
        Vec3 g_o;
        f += smooth_norm(ctx->cfg.lambda2.cwiseProduct(e), &g_o);
        if (grad) {
          const MatX de_dq = so3::left_jacobian_inv(e) * fk[t][i].jac_rot;
          grad->segment(t * nq + i * n, n) +=
              de_dq.transpose() * ctx->cfg.lambda2.cwiseProduct(g_o);
        }
      }
    }
    return f;
  };

  // Fingertip tracking: tip_i(q_t) = p_t + exp(tau_t w^) v_i with
  // p_t = p_cur + tau_t u and v_i the world-frame target offset.
  prob.eq_dim = 3 * m * T;
  prob.eq = [ctx](const VecX& z, VecX& c, MatX* jac) {
    const int T = ctx->T, nq = ctx->nq, m = ctx->m, n = ctx->n;
    const Vec3 u = z.segment<3>(T * nq);
    const Vec3 w = z.segment<3>(T * nq + 3);
    if (jac) jac->setZero();
    const auto& fk = ctx->cache.get(ctx->model, z, T);
    for (int t = 0; t < T; ++t) {
      const double tau = static_cast<double>(t + 1) / T;
      const Mat3 Rt = so3::exp(tau * w);
      const Mat3 Jl = so3::left_jacobian(tau * w);
      for (int i = 0; i < m; ++i) {
        const int row = 3 * (t * m + i);
        const Vec3 target = ctx->p_cur + tau * u + Rt * ctx->offsets[i];
        c.segment<3>(row) = fk[t][i].tip.p - target;
        if (jac) {
          jac->block(row, t * nq + i * n, 3, n) = fk[t][i].jac_pos;
          jac->block<3, 3>(row, T * nq) = -tau * Mat3::Identity();
          jac->block<3, 3>(row, T * nq + 3) = tau * skew(Rt * ctx->offsets[i]) * Jl;
        }
      }
    }
  };

  // Joint limits as hard box bounds; the pose increment is free.
  constexpr double kUnbounded = std::numeric_limits<double>::infinity();
  prob.lower = VecX::Constant(N, -kUnbounded);
  prob.upper = VecX::Constant(N, kUnbounded);
  for (int t = 0; t < T; ++t) {
    prob.lower.segment(t * nq, nq) = model.joint_lower;
    prob.upper.segment(t * nq, nq) = model.joint_upper;
  }

  prob.x0 = VecX::Zero(N);
  for (int t = 0; t < T; ++t) prob.x0.segment(t * nq, nq) = q0.q;
  return prob;
}

TrajectorySolution solve_joint_trajectory(const HandModel& model, const JointState& q0,
                                          const VirtualTargets& vt, const Pose& object_current,
                                          const Pose& object_target, const MapperConfig& cfg,
                                          const MatX* warm_start,
                                          const NlpOptions* solver_options) {
  const int m = model.num_fingers();
  const int n = model.joints_per_finger();
  const int T = cfg.horizon;
  const int nq = m * n;

  NlpProblem prob = build_trajectory_nlp(model, q0, vt, object_current, object_target, cfg);
  if (warm_start && warm_start->rows() == T && warm_start->cols() == nq) {
    for (int t = 0; t < T; ++t) prob.x0.segment(t * nq, nq) = warm_start->row(t).transpose();
  }

  const Vec3 p_cur = object_current.p;
  const Mat3 R_cur = object_current.R;

  NlpOptions opts;
  if (solver_options) opts = *solver_options;
  SolveReport report = solve_nlp(prob, opts);
  if (report.status == SolveStatus::kInfeasible) {
    throw InfeasibleError("solve_joint_trajectory: fingertip targets are not reachable (" +
                          report.message + ")");
  }

  TrajectorySolution sol;
  sol.report = report;
  sol.q.resize(T, nq);
  for (int t = 0; t < T; ++t) {
    sol.q.row(t) = report.x.segment(t * nq, nq)
                       .cwiseMax(model.joint_lower)
                       .cwiseMin(model.joint_upper)
                       .transpose();
  }
  const Vec3 u = report.x.segment<3>(T * nq);
  const Vec3 w = report.x.segment<3>(T * nq + 3);
  sol.terminal_pose.p = p_cur + u;
  sol.terminal_pose.R = so3::exp(w) * R_cur;

  // Residual audit of the tracking constraints at the solution.
  for (int t = 0; t < T; ++t) {
    const double tau = static_cast<double>(t + 1) / T;
    const Mat3 Rt = so3::exp(tau * w);
    for (int i = 0; i < m; ++i) {
      const auto fk = chain_kinematics(model.fingers[i], sol.q.row(t).segment(i * n, n));
      const Vec3 offset = vt.x_cd.row(i).transpose() - object_current.p;
      const Vec3 target = p_cur + tau * u + Rt * offset;
      sol.max_target_residual = std::max(sol.max_target_residual, (fk.tip.p - target).norm());
    }
  }
  return sol;
}

}  // namespace rg
