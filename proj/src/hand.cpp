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

#include "rigidgrasp/hand.hpp"

#include <cmath>

#include "rigidgrasp/linalg.hpp"

namespace rg {

namespace {

constexpr double kLimitSlack = 1e-9;

void check_limits(const HandModel& model, const VecX& q) {
  if (q.size() != model.total_joints()) {
    throw DomainError("joint vector has size " + std::to_string(q.size()) + ", expected " +
                      std::to_string(model.total_joints()));
  }
  for (int j = 0; j < q.size(); ++j) {
    if (q(j) < model.joint_lower(j) - kLimitSlack || q(j) > model.joint_upper(j) + kLimitSlack) {
      throw DomainError("joint " + std::to_string(j) + " value " + std::to_string(q(j)) +
                        " outside limits [" + std::to_string(model.joint_lower(j)) + ", " +
                        std::to_string(model.joint_upper(j)) + "]");
    }
  }
}

Mat3 axis_rotation(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

}  // namespace

void KinematicChain::validate() const {
  if (axes.size() != link_offsets.size()) {
    throw DomainError("chain axes/link_offsets size mismatch");
  }
  for (const auto& a : axes) {
    if (std::abs(a.norm() - 1.0) > 1e-10) throw DomainError("joint axis is not unit norm");
  }
  for (const auto& l : link_offsets) {
    if (l.norm() <= 0.0) throw DomainError("link length must be positive");
  }
}

void HandModel::validate() const {
  const int m = num_fingers();
  if (m < 3) throw DomainError("hand model requires at least 3 fingers, got " + std::to_string(m));
  const int n = joints_per_finger();
  for (const auto& f : fingers) {
    f.validate();
    if (f.dof() != n) throw DomainError("all fingers must have the same joint count");
  }
  if (joint_lower.size() != m * n || joint_upper.size() != m * n) {
    throw DomainError("joint limit vectors must have size m*n");
  }
  if (((joint_upper - joint_lower).array() <= 0.0).any()) {
    throw DomainError("joint_lower must be strictly below joint_upper");
  }
  if (uniform_joint_inertia == 0.0) {
    if (link_masses.size() != static_cast<size_t>(m)) {
      throw DomainError("link_masses must have one entry per finger");
    }
    for (const auto& lm : link_masses) {
      if (lm.size() != n) throw DomainError("link_masses entries must have one mass per link");
    }
  }
}

HandModel make_default_hand(int m, double base_radius) {
  HandModel model;
  const std::vector<double> lengths = {0.05, 0.05, 0.04, 0.035};
  const VecX masses = (VecX(4) << 0.040, 0.035, 0.030, 0.020).finished();
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * M_PI * i / m;
    KinematicChain chain;
    chain.base.p = Vec3(base_radius * std::cos(theta), base_radius * std::sin(theta), 0.0);
    // Local +x points at the palm center.
    chain.base.R = axis_rotation(Vec3::UnitZ(), theta + M_PI);
    chain.axes = {Vec3::UnitZ(), Vec3::UnitY(), Vec3::UnitY(), Vec3::UnitY()};
    for (double l : lengths) chain.link_offsets.push_back(Vec3(l, 0.0, 0.0));
    model.fingers.push_back(chain);
    model.link_masses.push_back(masses);
  }
  const int n = 4;
  model.joint_lower = VecX(m * n);
  model.joint_upper = VecX(m * n);
  for (int i = 0; i < m; ++i) {
    model.joint_lower.segment(i * n, n) << -1.2, -2.2, -2.2, -2.2;
    model.joint_upper.segment(i * n, n) << 1.2, 2.2, 2.2, 2.2;
  }
  model.validate();
  return model;
}

FingerKinematics chain_kinematics(const KinematicChain& chain, const Eigen::Ref<const VecX>& q) {
  const int n = chain.dof();
  Pose T = chain.base;
  std::vector<Vec3> origins(n);
  std::vector<Vec3> world_axes(n);
  for (int j = 0; j < n; ++j) {
    origins[j] = T.p;
    world_axes[j] = T.R * chain.axes[j];
    T.R = T.R * axis_rotation(chain.axes[j], q(j));
    T.p = T.p + T.R * chain.link_offsets[j];
  }
  FingerKinematics out;
  out.tip.p = T.p;
  out.tip.R = T.R * chain.tip_rot;
  out.jac_pos.resize(3, n);
  out.jac_rot.resize(3, n);
  for (int j = 0; j < n; ++j) {
    out.jac_pos.col(j) = world_axes[j].cross(T.p - origins[j]);
    out.jac_rot.col(j) = world_axes[j];
  }
  return out;
}

std::vector<FingerKinematics> finger_kinematics(const HandModel& model, const JointState& state) {
  check_limits(model, state.q);
  const int n = model.joints_per_finger();
  std::vector<FingerKinematics> out;
  out.reserve(model.num_fingers());
  for (int i = 0; i < model.num_fingers(); ++i) {
    out.push_back(chain_kinematics(model.fingers[i], state.q.segment(i * n, n)));
  }
  return out;
}

std::vector<Pose> forward_kinematics(const HandModel& model, const JointState& state) {
  auto fk = finger_kinematics(model, state);
  std::vector<Pose> tips;
  tips.reserve(fk.size());
  for (auto& f : fk) tips.push_back(f.tip);
  return tips;
}

MatX hand_jacobian(const HandModel& model, const JointState& state) {
  const int m = model.num_fingers();
  const int n = model.joints_per_finger();
  MatX J = MatX::Zero(3 * m, m * n);
  auto fk = finger_kinematics(model, state);
  for (int i = 0; i < m; ++i) {
    J.block(3 * i, n * i, 3, n) = fk[i].jac_pos;
  }
  return J;
}

MatX joint_inertia(const HandModel& model, const JointState& state) {
  const int m = model.num_fingers();
  const int n = model.joints_per_finger();
  check_limits(model, state.q);
  if (model.uniform_joint_inertia > 0.0) {
    return model.uniform_joint_inertia * MatX::Identity(m * n, m * n);
  }
  MatX M = MatX::Zero(m * n, m * n);
  for (int i = 0; i < m; ++i) {
    const auto& chain = model.fingers[i];
    const VecX qi = state.q.segment(i * n, n);
    // Positions of every link end plus the world axes/origins along the chain.
    Pose T = chain.base;
    std::vector<Vec3> origins(n), world_axes(n), ends(n);
    for (int j = 0; j < n; ++j) {
      origins[j] = T.p;
      world_axes[j] = T.R * chain.axes[j];
      T.R = T.R * axis_rotation(chain.axes[j], qi(j));
      T.p = T.p + T.R * chain.link_offsets[j];
      ends[j] = T.p;
    }
    MatX Mi = MatX::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      MatX Jl = MatX::Zero(3, n);
      for (int k = 0; k <= j; ++k) {
        Jl.col(k) = world_axes[k].cross(ends[j] - origins[k]);
      }
      Mi += model.link_masses[i](j) * Jl.transpose() * Jl;
    }
    M.block(i * n, i * n, n, n) = Mi;
  }
  M.diagonal().array() += model.rotor_inertia;
  return M;
}

MatX task_inertia(const HandModel& model, const JointState& state, double sigma_min_tol) {
  const MatX J = hand_jacobian(model, state);
  Eigen::JacobiSVD<MatX> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& s = svd.singularValues();
  if (s(s.size() - 1) < sigma_min_tol) {
    throw SingularityError("hand Jacobian is near singular (sigma_min = " +
                           std::to_string(s(s.size() - 1)) + ")");
  }
  VecX sinv = VecX::Zero(s.size());
  const double cutoff = 1e-8 * s(0);
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) sinv(i) = 1.0 / s(i);
  }
  const MatX Jpinv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
  const MatX M = joint_inertia(model, state);
  return Jpinv.transpose() * M * Jpinv;
}

VecX ik_fingertips(const HandModel& model, const VecX& q_init, const MatX3& targets, double tol,
                   int max_iter) {
  const int m = model.num_fingers();
  const int n = model.joints_per_finger();
  if (targets.rows() != m) throw DomainError("ik_fingertips: one target per finger required");
  VecX q = q_init.cwiseMax(model.joint_lower).cwiseMin(model.joint_upper);
  for (int i = 0; i < m; ++i) {
    VecX qi = q.segment(i * n, n);
    const Vec3 target = targets.row(i).transpose();
    double err = (chain_kinematics(model.fingers[i], qi).tip.p - target).norm();
    int it = 0;
    for (; it < max_iter && err > tol; ++it) {
      const auto fk = chain_kinematics(model.fingers[i], qi);
      const Vec3 e = target - fk.tip.p;
      const double lambda = 1e-4 + 0.05 * e.norm();
      const Mat3 JJt = fk.jac_pos * fk.jac_pos.transpose() + lambda * lambda * Mat3::Identity();
      VecX dq = fk.jac_pos.transpose() * JJt.ldlt().solve(e);
      // Backtrack if the step overshoots.
      double step = 1.0;
      VecX q_new = qi;
      double err_new = err;
      for (int bt = 0; bt < 12; ++bt) {
        q_new = (qi + step * dq)
                    .cwiseMax(model.joint_lower.segment(i * n, n))
                    .cwiseMin(model.joint_upper.segment(i * n, n));
        err_new = (chain_kinematics(model.fingers[i], q_new).tip.p - target).norm();
        if (err_new < err) break;
        step *= 0.5;
      }
      if (err_new >= err && err > tol) {
        break;  // stalled
      }
      qi = q_new;
      err = err_new;
    }
    if (err > tol) {
      throw ConvergenceError("ik_fingertips: finger " + std::to_string(i) +
                             " residual " + std::to_string(err) + " above tolerance");
    }
    q.segment(i * n, n) = qi;
  }
  return q;
}

}  // namespace rg
