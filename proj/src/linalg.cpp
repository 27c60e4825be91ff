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

#include "rigidgrasp/linalg.hpp"

namespace rg {

MatX pinv(const MatX& A, double rcond) {
  Eigen::JacobiSVD<MatX> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& s = svd.singularValues();
  if (s.size() == 0) return MatX::Zero(A.cols(), A.rows());
  const double cutoff = rcond * s(0);
  VecX sinv = VecX::Zero(s.size());
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) sinv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const MatX& A, double tol_factor) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<MatX> svd(A);
  const VecX& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = tol_factor * s(0);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  return rank;
}

double smallest_singular_value(const MatX& A) {
  Eigen::JacobiSVD<MatX> svd(A);
  const VecX& s = svd.singularValues();
  return s.size() > 0 ? s(s.size() - 1) : 0.0;
}

}  // namespace rg
