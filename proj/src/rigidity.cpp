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

#include <algorithm>
#include <cmath>
#include <set>

namespace rg {

ContactFramework::ContactFramework(int m_in, VecX points_in,
                                   std::vector<std::pair<int, int>> edges_in)
    : m(m_in), points(std::move(points_in)) {
  if (points.size() != 3 * m) {
    throw DomainError("framework configuration must have size 3m");
  }
  std::set<std::pair<int, int>> seen;
  edges.reserve(edges_in.size());
  for (auto [i, j] : edges_in) {
    if (i == j) throw DomainError("framework edge has a self loop");
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= m) throw DomainError("framework edge vertex index out of range");
    if (!seen.insert({i, j}).second) throw DomainError("duplicate framework edge");
  }
  edges.assign(seen.begin(), seen.end());  // std::set iterates lexicographically
}

ContactFramework ContactFramework::complete(const VecX& points) {
  const int m = static_cast<int>(points.size() / 3);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
  }
  return ContactFramework(m, points, std::move(edges));
}

ContactFramework ContactFramework::complete(const MatX3& pts) {
  VecX stacked(3 * pts.rows());
  for (int i = 0; i < pts.rows(); ++i) stacked.segment<3>(3 * i) = pts.row(i).transpose();
  return complete(stacked);
}

bool ContactFramework::same_graph(const ContactFramework& other) const {
  return m == other.m && edges == other.edges;
}

VecX rigidity_function(const ContactFramework& F) {
  VecX phi(F.edge_count());
  for (int e = 0; e < F.edge_count(); ++e) {
    const auto [i, j] = F.edges[e];
    phi(e) = (F.point(i) - F.point(j)).squaredNorm();
  }
  return phi;
}

namespace {

// Shared pattern of R and its rate: rows of paired +/-2*(x_i - x_j)^T blocks.
MatX edge_difference_matrix(const ContactFramework& F, const VecX& x) {
  MatX R = MatX::Zero(F.edge_count(), 3 * F.m);
  for (int e = 0; e < F.edge_count(); ++e) {
    const auto [i, j] = F.edges[e];
    const Vec3 d = 2.0 * (x.segment<3>(3 * i) - x.segment<3>(3 * j));
    R.block<1, 3>(e, 3 * i) = d.transpose();
    R.block<1, 3>(e, 3 * j) = -d.transpose();
  }
  return R;
}

}  // namespace

MatX rigidity_matrix(const ContactFramework& F) { return edge_difference_matrix(F, F.points); }

MatX rigidity_matrix_rate(const ContactFramework& F, const VecX& v_c) {
  if (v_c.size() != 3 * F.m) {
    throw DomainError("contact velocity vector must have size 3m");
  }
  return edge_difference_matrix(F, v_c);
}

RigidityEvaluation is_infinitesimally_rigid(const ContactFramework& F, double rank_tol) {
  if (F.m < 3) throw DomainError("rigidity test requires m >= 3 contact points");
  RigidityEvaluation eval;
  eval.phi = rigidity_function(F);
  eval.R = rigidity_matrix(F);
  Eigen::JacobiSVD<MatX> svd(eval.R);
  const VecX& s = svd.singularValues();
  eval.rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    const double cutoff = rank_tol * s(0);
    for (int i = 0; i < s.size(); ++i) {
      if (s(i) > cutoff) ++eval.rank;
    }
  }
  eval.is_rigid = (eval.rank == 3 * F.m - 6);
  return eval;
}

double trd(const ContactFramework& F0, const ContactFramework& Ft) {
  if (!F0.same_graph(Ft)) throw DomainError("TRD requires frameworks on the same graph");
  double total = 0.0;
  for (int e = 0; e < F0.edge_count(); ++e) {
    const auto [i, j] = F0.edges[e];
    const double d0 = (F0.point(i) - F0.point(j)).norm();
    if (d0 <= 0.0) throw DomainError("TRD undefined: initial edge distance is zero");
    const double dt = (Ft.point(i) - Ft.point(j)).norm();
    total += std::abs(dt - d0) / d0;
  }
  return 100.0 * total;
}

}  // namespace rg
