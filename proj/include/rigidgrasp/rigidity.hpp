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

// Contact framework: a graph embedded in R^3 whose vertices are the
// fingertip contact points and whose edges encode pairwise distance
// constraints. The rigidity matrix is the Jacobian of the squared edge
// lengths with respect to the stacked contact coordinates; a framework is
// infinitesimally rigid exactly when that matrix has rank 3m - 6.

#ifndef RIGIDGRASP_RIGIDITY_HPP_
#define RIGIDGRASP_RIGIDITY_HPP_

#include <utility>
#include <vector>

#include "rigidgrasp/types.hpp"

namespace rg {

struct ContactFramework {
  int m = 0;                                  // vertex count
  std::vector<std::pair<int, int>> edges;     // canonical order: (i, j), i < j, lexicographic
  VecX points;                                // stacked contact points, size 3m

  ContactFramework() = default;  // empty placeholder

  /// Builds a framework, validating the edge set (0-based vertex indices,
  /// no self loops, no duplicates) and normalizing edges to canonical order.
  ContactFramework(int m_in, VecX points_in, std::vector<std::pair<int, int>> edges_in);

  /// Complete graph K_m on the given stacked points.
  static ContactFramework complete(const VecX& points);
  static ContactFramework complete(const MatX3& points);

  Vec3 point(int i) const { return points.segment<3>(3 * i); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  bool same_graph(const ContactFramework& other) const;
};

struct RigidityEvaluation {
  VecX phi;      // squared edge lengths, |E|
  MatX R;        // |E| x 3m
  int rank = 0;
  bool is_rigid = false;
};

/// Squared distance per edge, canonical edge order.
VecX rigidity_function(const ContactFramework& F);

/// Jacobian of the rigidity function: row (i,j) holds 2(p_i - p_j)^T in
/// block i and the negation in block j.
MatX rigidity_matrix(const ContactFramework& F);

/// Time derivative of the rigidity matrix along contact velocities v_c;
/// same sparsity pattern with velocity differences in place of position
/// differences.
MatX rigidity_matrix_rate(const ContactFramework& F, const VecX& v_c);

/// Numerical-rank test of the rigidity matrix. Singular values below
/// rank_tol * sigma_max count as zero. Throws DomainError for m < 3.
RigidityEvaluation is_infinitesimally_rigid(const ContactFramework& F, double rank_tol = 1e-9);

/// Total Relative Deviation between two frameworks on the same graph:
/// sum over edges of |d - d0| / d0, in percent. Throws DomainError on graph
/// mismatch or a zero initial distance.
double trd(const ContactFramework& F0, const ContactFramework& Ft);

}  // namespace rg

#endif  // RIGIDGRASP_RIGIDITY_HPP_
