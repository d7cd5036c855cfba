// wsm/distance.hpp

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

#ifndef WSM_DISTANCE_HPP
#define WSM_DISTANCE_HPP

#include <algorithm>
#include <cmath>

#include "wsm/types.hpp"

namespace wsm {

/// Cosine similarity with two pinned edge rules: bitwise-equal vectors have
/// similarity exactly 1, and a zero-norm vector has similarity 0 against
/// anything. The first keeps self-distances exactly zero, the second keeps
/// knocked-out all-zero inputs well defined.
template <typename DerivedA, typename DerivedB>
bool bitwise_equal(const Eigen::MatrixBase<DerivedA>& u,
                   const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size()) return false;
  for (Index i = 0; i < u.size(); ++i)
    if (u(i) != v(i)) return false;
  return true;
}

template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& u,
                         const Eigen::MatrixBase<DerivedB>& v) {
  if (bitwise_equal(u, v)) return u.squaredNorm() == 0.0 ? 0.0 : 1.0;
  const double nu = u.squaredNorm();
  const double nv = v.squaredNorm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double cos = u.dot(v) / std::sqrt(nu * nv);
  return std::clamp(cos, -1.0, 1.0);
}

/// 1 - cosine similarity, except that bitwise-equal vectors (zero-norm ones
/// included) are at distance exactly 0.
template <typename DerivedA, typename DerivedB>
double cosine_distance(const Eigen::MatrixBase<DerivedA>& u,
                       const Eigen::MatrixBase<DerivedB>& v) {
  if (bitwise_equal(u, v)) return 0.0;
  return 1.0 - cosine_similarity(u, v);
}

/// Frame-by-frame cosine distances between the rows of a and b.
Matrix cosine_cost_matrix(const Matrix& a, const Matrix& b);

}  // namespace wsm

#endif  // WSM_DISTANCE_HPP
