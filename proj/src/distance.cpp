// wsm/distance.cpp

// Copyright 2026  The wsm authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wsm/distance.hpp"

namespace wsm {

Matrix cosine_cost_matrix(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    fail(ErrorCode::DimensionMismatch, "cost matrix inputs differ in dimension");
  const Matrix gram = a * b.transpose();
  const Vector na = a.rowwise().squaredNorm();
  const Vector nb = b.rowwise().squaredNorm();
  Matrix cost(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      double c;
      if (na[i] == 0.0 || nb[j] == 0.0) {
        c = 1.0;  // zero-norm frame: similarity 0 unless bitwise equal
      } else {
        c = 1.0 - std::clamp(gram(i, j) / std::sqrt(na[i] * nb[j]), -1.0, 1.0);
      }
      // The GEMM route loses the exact-equality rule; re-check candidates so
      // identical frames stay at distance exactly 0.
      if (c <= 1e-9 || (na[i] == 0.0 && nb[j] == 0.0))
        c = cosine_distance(a.row(i), b.row(j));
      cost(i, j) = c;
    }
  }
  return cost;
}

}  // namespace wsm
