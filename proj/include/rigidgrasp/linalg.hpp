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

#ifndef RIGIDGRASP_LINALG_HPP_
#define RIGIDGRASP_LINALG_HPP_

#include "rigidgrasp/types.hpp"

namespace rg {

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// rcond * sigma_max are treated as zero.
MatX pinv(const MatX& A, double rcond = 1e-8);

/// Numerical rank: number of singular values above tol_factor * sigma_max.
int numerical_rank(const MatX& A, double tol_factor = 1e-9);

/// Smallest singular value of A.
double smallest_singular_value(const MatX& A);

}  // namespace rg

#endif  // RIGIDGRASP_LINALG_HPP_
