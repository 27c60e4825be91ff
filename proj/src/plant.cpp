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

#include "rigidgrasp/plant.hpp"

#include <cmath>
#include <sstream>

#include "rigidgrasp/so3.hpp"

namespace rg {

namespace {

struct SurfaceHit {
  bool inside = false;
  double depth = 0.0;   // m
  Vec3 normal_obj = Vec3::UnitZ();   // outward, object frame
  Vec3 surface_obj = Vec3::Zero();   // contact point on the surface, object frame
};

SurfaceHit surface_query(const PlantConfig& cfg, const Vec3& y) {
  SurfaceHit hit;
  switch (cfg.shape) {
    case ObjectShape::kCylinder: {
      const double r = cfg.half_extents.x();
      const double hz = cfg.half_extents.z();
      const double rho = std::hypot(y.x(), y.y());
      if (rho >= r || rho < 1e-9 || std::abs(y.z()) > hz) return hit;
      hit.inside = true;
      hit.depth = r - rho;
      hit.normal_obj = Vec3(y.x() / rho, y.y() / rho, 0.0);
      hit.surface_obj = Vec3(r * y.x() / rho, r * y.y() / rho, y.z());
      return hit;
    }
    case ObjectShape::kEllipsoid: {
      const Vec3 a = cfg.half_extents;
      const Vec3 scaled(y.x() / a.x(), y.y() / a.y(), y.z() / a.z());
      const double val = scaled.squaredNorm();
      if (val >= 1.0 || val < 1e-12) return hit;
      const double k = 1.0 / std::sqrt(val);
      hit.inside = true;
      hit.surface_obj = k * y;
      hit.depth = (k - 1.0) * y.norm();
      hit.normal_obj = Vec3(hit.surface_obj.x() / (a.x() * a.x()),
                            hit.surface_obj.y() / (a.y() * a.y()),
                            hit.surface_obj.z() / (a.z() * a.z()))
                           .normalized();
      return hit;
    }
    case ObjectShape::kNone:
      return hit;
  }
  return hit;
}

struct ContactEval {
  bool active = false;
  double depth = 0.0;
  double normal_force = 0.0;  // N
  Vec3 force = Vec3::Zero();  // on the object, world
  Vec3 torque = Vec3::Zero(); // about the object CM, world
  bool capped = false;
  Vec3 tangential_stretch_local = Vec3::Zero();  // (ux, uy, 0) in the contact frame
};

ContactEval eval_contact(const PlantConfig& cfg, const ContactPoint& c, const Vec3& tip,
                         const Pose& pose) {
  ContactEval out;
  const Vec3 y = pose.inverse().apply(tip);
  const SurfaceHit hit = surface_query(cfg, y);
  if (!hit.inside) return out;
  out.active = true;
  out.depth = hit.depth;

  const Vec3 n_w = pose.R * hit.normal_obj;
  const Vec3 s_w = pose.apply(hit.surface_obj);
  out.normal_force = cfg.stiffness.z() * hit.depth;
  // The penetrating finger pushes the object along the inward normal.
  Vec3 f = -n_w * out.normal_force;

  const Mat3 frame_w = pose.R * c.frame_obj;
  const Vec3 anchor_w = pose.apply(c.anchor_obj);
  const Vec3 u = tip - anchor_w;
  const double ux = frame_w.col(0).dot(u);
  const double uy = frame_w.col(1).dot(u);
  double fx = cfg.stiffness.x() * ux;
  double fy = cfg.stiffness.y() * uy;
  const double ft = std::hypot(fx, fy);
  const double cap = cfg.mu * out.normal_force;
  if (ft > cap && ft > 0.0) {
    const double sigma = cap / ft;
    fx *= sigma;
    fy *= sigma;
    out.capped = true;
  }
  // A tip displaced ahead of its anchor drags the object with it.
  f += frame_w.col(0) * fx + frame_w.col(1) * fy;
  out.tangential_stretch_local = Vec3(ux, uy, 0.0);
  out.force = f;
  out.torque = (s_w - pose.p).cross(f);
  return out;
}

Vec6 net_wrench(const PlantConfig& cfg, const std::vector<ContactPoint>& contacts,
                const MatX3& tips, const Pose& pose, int* active_count = nullptr,
                bool* any_capped = nullptr) {
  Vec6 w = Vec6::Zero();
  int active = 0;
  bool capped = false;
  for (size_t i = 0; i < contacts.size(); ++i) {
    const ContactEval ev = eval_contact(cfg, contacts[i], tips.row(i).transpose(), pose);
    if (ev.active) {
      ++active;
      capped = capped || ev.capped;
      w.head<3>() += ev.force;
      w.tail<3>() += ev.torque;
    }
  }
  w.head<3>() += cfg.mass * cfg.gravity_accel * cfg.gravity_dir;
  if (active_count) *active_count = active;
  if (any_capped) *any_capped = capped;
  return w;
}

Pose apply_increment(const Pose& pose, const Vec6& xi) {
  Pose out;
  out.p = pose.p + xi.head<3>();
  out.R = so3::exp(xi.tail<3>()) * pose.R;
  return out;
}

}  // namespace

double NoiseRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - std::ldexp(static_cast<double>(gen_() >> 11), -53);
  const double u2 = std::ldexp(static_cast<double>(gen_() >> 11), -53);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

std::string FailureReport::describe() const {
  std::ostringstream oss;
  if (slip) {
    oss << "slip on fingers";
    for (int i : slip_fingers) oss << " " << i;
    oss << "; ";
  }
  if (deformation) {
    oss << "deformation on fingers";
    for (int i : deformation_fingers) oss << " " << i;
    oss << "; ";
  }
  if (dropped) oss << "object dropped";
  return oss.str();
}

PlantState make_plant_state(const PlantConfig& cfg, const Pose& initial_pose,
                            const MatX3& contact_points_world, const MatX3& normals_world) {
  PlantState state;
  state.pose = initial_pose;
  state.tips = contact_points_world;
  const Pose inv = initial_pose.inverse();
  for (int i = 0; i < contact_points_world.rows(); ++i) {
    ContactPoint c;
    const Vec3 p_w = contact_points_world.row(i).transpose();
    const Vec3 n_w = normals_world.row(i).transpose();
    c.contact_obj = inv.apply(p_w);
    c.normal_obj = inv.R * n_w;
    c.frame_obj = inv.R * contact_frame(n_w);
    c.anchor_obj = c.contact_obj;
    state.contacts.push_back(c);
  }
  return state;
}

PlantState plant_step(const PlantState& state, const JointState& q_cmd, const HandModel& model,
                      const PlantConfig& cfg) {
  PlantState next = state;
  const auto tips = forward_kinematics(model, q_cmd);
  next.tips.resize(static_cast<int>(tips.size()), 3);
  for (size_t i = 0; i < tips.size(); ++i) next.tips.row(i) = tips[i].p.transpose();
  if (next.tips.rows() != static_cast<int>(next.contacts.size())) {
    throw DomainError("plant_step: contact count does not match finger count");
  }

  // Pre-check: with fewer than three engaged contacts a loaded object has no
  // static equilibrium to find.
  int active0 = 0;
  net_wrench(cfg, next.contacts, next.tips, next.pose, &active0);
  if (active0 < 3 && cfg.mass > 0.0) {
    next.dropped = true;
    next.slip = false;
    next.deformation = false;
    return next;
  }

  // Damped Newton on the 6-DOF pose increment, Jacobian by forward
  // differences.
  Pose pose = next.pose;
  const double fd_h = 1e-8;
  Vec6 w = net_wrench(cfg, next.contacts, next.tips, pose);
  double best = w.lpNorm<Eigen::Infinity>();
  int it = 0;
  bool converged = best <= cfg.wrench_tol;
  for (; it < cfg.max_equilibrium_iter && !converged; ++it) {
    Eigen::Matrix<double, 6, 6> J;
    for (int k = 0; k < 6; ++k) {
      Vec6 xi = Vec6::Zero();
      xi(k) = fd_h;
      J.col(k) = (net_wrench(cfg, next.contacts, next.tips, apply_increment(pose, xi)) - w) / fd_h;
    }
    Vec6 step = J.fullPivLu().solve(-w);
    if (!step.allFinite()) break;
    // Keep single steps small relative to the object scale.
    const double max_step = 0.2 * cfg.half_extents.maxCoeff();
    const double sn = step.head<3>().norm();
    if (sn > max_step) step *= max_step / sn;

    double scale = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 10; ++ls) {
      const Pose cand = apply_increment(pose, scale * step);
      const Vec6 w_cand = net_wrench(cfg, next.contacts, next.tips, cand);
      const double r = w_cand.lpNorm<Eigen::Infinity>();
      if (r < best) {
        pose = cand;
        w = w_cand;
        best = r;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
    converged = best <= cfg.wrench_tol;
  }

  next.pose = pose;
  next.wrench_residual = best;
  next.equilibrium_iterations = it;

  // Final per-contact bookkeeping at the converged pose.
  next.slip = false;
  next.deformation = false;
  int active = 0;
  for (size_t i = 0; i < next.contacts.size(); ++i) {
    ContactPoint& c = next.contacts[i];
    const Vec3 tip = next.tips.row(i).transpose();
    const ContactEval ev = eval_contact(cfg, c, tip, pose);
    c.active = ev.active;
    c.penetration = ev.depth;
    c.force = ev.force;
    c.slipping = ev.capped;
    if (!ev.active) {
      // Re-anchor a lifted finger at its surface projection.
      const Vec3 y = pose.inverse().apply(tip);
      const SurfaceHit hit = surface_query(cfg, y);
      c.anchor_obj = hit.inside ? hit.surface_obj : pose.inverse().apply(tip);
      continue;
    }
    ++active;
    next.slip = next.slip || ev.capped;
    next.deformation = next.deformation || (ev.normal_force > cfg.deformation_threshold);
    if (ev.capped) {
      // Drag the anchor so the stored stretch sits exactly at the Coulomb cap.
      const Mat3 frame_w = pose.R * c.frame_obj;
      const double fx = cfg.stiffness.x() * ev.tangential_stretch_local.x();
      const double fy = cfg.stiffness.y() * ev.tangential_stretch_local.y();
      const double ft = std::hypot(fx, fy);
      const double sigma = ft > 0.0 ? cfg.mu * ev.normal_force / ft : 0.0;
      const Vec3 kept = frame_w.col(0) * (sigma * ev.tangential_stretch_local.x()) +
                        frame_w.col(1) * (sigma * ev.tangential_stretch_local.y());
      const Vec3 anchor_w = tip - kept;
      // Project back to the surface along the normal direction.
      const Vec3 y_anchor = pose.inverse().apply(anchor_w);
      const SurfaceHit hit = surface_query(cfg, y_anchor);
      c.anchor_obj = hit.inside ? hit.surface_obj : y_anchor;
    }
  }
  if (active < 3 && cfg.mass > 0.0) next.dropped = true;

  if (!converged) {
    if (next.slip || next.dropped) {
      // The object is escaping the grasp; report it as a failure state
      // rather than a numerical error.
      next.dropped = true;
      return next;
    }
    throw ConvergenceError("plant_step: equilibrium residual " + std::to_string(best) +
                           " after " + std::to_string(it) + " iterations");
  }
  return next;
}

Pose observe(const PlantState& state, const PlantConfig& cfg, NoiseRng& rng) {
  Pose obs = state.pose;
  if (cfg.noise_pos_std > 0.0) obs.p += cfg.noise_pos_std * rng.gaussian3();
  if (cfg.noise_rot_std > 0.0) obs.R = so3::exp(cfg.noise_rot_std * rng.gaussian3()) * obs.R;
  return obs;
}

FailureReport check_failures(const PlantState& state, const PlantConfig& cfg) {
  FailureReport report;
  report.dropped = state.dropped;
  for (size_t i = 0; i < state.contacts.size(); ++i) {
    const ContactPoint& c = state.contacts[i];
    const double fn = cfg.stiffness.z() * c.penetration;
    const Mat3 frame_w = state.pose.R * c.frame_obj;
    const Vec3 f_local = frame_w.transpose() * c.force;
    const double ft = std::hypot(f_local.x(), f_local.y());
    report.slip_margin.push_back(cfg.mu * fn - ft);
    report.deformation_margin.push_back(cfg.deformation_threshold - fn);
    if (c.active && c.slipping) {
      report.slip = true;
      report.slip_fingers.push_back(static_cast<int>(i));
    }
    if (c.active && fn > cfg.deformation_threshold) {
      report.deformation = true;
      report.deformation_fingers.push_back(static_cast<int>(i));
    }
  }
  return report;
}

double spring_energy(const PlantState& state, const PlantConfig& cfg) {
  double e = 0.0;
  for (const auto& c : state.contacts) {
    if (!c.active) continue;
    e += 0.5 * cfg.stiffness.z() * c.penetration * c.penetration;
    // Stored tangential stretch at the current state.
    const double fx = c.force.dot(state.pose.R * c.frame_obj.col(0));
    const double fy = c.force.dot(state.pose.R * c.frame_obj.col(1));
    if (cfg.stiffness.x() > 0.0) e += 0.5 * fx * fx / cfg.stiffness.x();
    if (cfg.stiffness.y() > 0.0) e += 0.5 * fy * fy / cfg.stiffness.y();
  }
  return e;
}

}  // namespace rg
