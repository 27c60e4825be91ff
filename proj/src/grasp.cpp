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

#include "rigidgrasp/grasp.hpp"

#include <cmath>
#include <limits>

namespace rg {

void GraspState::validate() const {
  const int m = num_contacts();
  if (m < 3) throw DomainError("grasp requires m >= 3 contacts");
  if (normals.rows() != m) throw DomainError("one normal per contact required");
  for (int i = 0; i < m; ++i) {
    if (std::abs(normals.row(i).norm() - 1.0) > 1e-10) {
      throw DomainError("contact normal " + std::to_string(i) + " is not unit norm");
    }
    for (int j = i + 1; j < m; ++j) {
      if ((points.row(i) - points.row(j)).norm() < 1e-12) {
        throw DomainError("contact points " + std::to_string(i) + " and " + std::to_string(j) +
                          " coincide");
      }
    }
  }
}

MatX grasp_matrix(const GraspState& gs) {
  const int m = gs.num_contacts();
  MatX G = MatX::Zero(6, 3 * m);
  for (int i = 0; i < m; ++i) {
    const Vec3 p_io = gs.points.row(i).transpose() - gs.object_cm;
    G.block<3, 3>(0, 3 * i) = Mat3::Identity();
    G.block<3, 3>(3, 3 * i) = skew(p_io);
  }
  return G;
}

Mat3 contact_frame(const Vec3& n) {
  const double norm = n.norm();
  if (norm < 1e-12) throw DomainError("contact_frame: zero normal vector");
  if (std::abs(norm - 1.0) > 1e-10) throw DomainError("contact_frame: normal must be unit norm");
  const Vec3 z = -n;  // inward
  Vec3 ref = Vec3::UnitX();
  if (std::abs(n.dot(ref)) > 0.9) ref = Vec3::UnitY();
  Vec3 x = ref - ref.dot(z) * z;
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.col(0) = x;
  R.col(1) = y;
  R.col(2) = z;
  return R;
}

std::vector<Mat3> contact_frames(const GraspState& gs) {
  std::vector<Mat3> frames;
  frames.reserve(gs.num_contacts());
  for (int i = 0; i < gs.num_contacts(); ++i) {
    frames.push_back(contact_frame(gs.normals.row(i).transpose()));
  }
  return frames;
}

void FrictionParams::validate() const {
  if (mu <= 0.0) throw DomainError("friction coefficient must be positive");
  if (f_n_min < 0.0 || f_n_min >= f_n_max) {
    throw DomainError("normal-force bounds must satisfy 0 <= f_n_min < f_n_max");
  }
}

ConeMargin cone_margin(const Vec3& f_local, const FrictionParams& fp) {
  ConeMargin cm;
  cm.tangential = std::hypot(f_local.x(), f_local.y());
  cm.normal = f_local.z();
  cm.mu_fz = fp.mu * cm.normal;
  cm.ratio = cm.normal > 0.0 ? cm.tangential / cm.mu_fz
                             : std::numeric_limits<double>::infinity();
  cm.cone_violated = cm.tangential > cm.mu_fz;
  cm.below_min = cm.normal < fp.f_n_min;
  cm.above_max = cm.normal > fp.f_n_max;
  return cm;
}

void decompose_force(const VecX& f_world, const std::vector<Mat3>& frames, VecX& f_perp,
                     VecX& f_par) {
  const int m = static_cast<int>(frames.size());
  if (f_world.size() != 3 * m) throw DomainError("decompose_force: force vector must be 3m");
  f_perp.resize(m);
  f_par.resize(m);
  for (int i = 0; i < m; ++i) {
    const Vec3 f_local = frames[i].transpose() * f_world.segment<3>(3 * i);
    f_perp(i) = f_local.z();
    f_par(i) = std::hypot(f_local.x(), f_local.y());
  }
}

}  // namespace rg
