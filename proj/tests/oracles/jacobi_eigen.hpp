// tests/oracles/jacobi_eigen.hpp

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

// Classical cyclic Jacobi eigensolver for symmetric matrices: a deliberately
// separate route from the solver the library uses for PCA.

#ifndef WSM_TESTS_JACOBI_EIGEN_HPP
#define WSM_TESTS_JACOBI_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "wsm/types.hpp"

namespace wsm::testing {

/// Eigenvalues in decreasing order.
inline Vector jacobi_eigenvalues(Matrix a, int max_sweeps = 100) {
  const Index n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-24) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> evals(n);
  for (Index i = 0; i < n; ++i) evals[i] = a(i, i);
  std::sort(evals.begin(), evals.end(), std::greater<double>());
  return Eigen::Map<Vector>(evals.data(), n);
}

}  // namespace wsm::testing

#endif  // WSM_TESTS_JACOBI_EIGEN_HPP
