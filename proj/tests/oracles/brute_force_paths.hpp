// tests/oracles/brute_force_paths.hpp

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

// Exhaustive enumeration of monotone alignment paths, as an independent
// oracle for the DTW and divergence dynamic programs. Only usable for tiny
// matrices; the test sizes keep the path count in the tens of thousands.

#ifndef WSM_TESTS_BRUTE_FORCE_PATHS_HPP
#define WSM_TESTS_BRUTE_FORCE_PATHS_HPP

#include <limits>
#include <vector>

#include "wsm/pairing.hpp"
#include "wsm/types.hpp"

namespace wsm::testing {

struct PathEnumeration {
  double min_total = std::numeric_limits<double>::infinity();
  std::vector<AlignmentPath> min_total_paths;
  double min_mean = std::numeric_limits<double>::infinity();
};

inline void enumerate_rec(const Matrix& cost, AlignmentPath& prefix,
                          double running, PathEnumeration& out) {
  const auto [i, j] = prefix.back();
  const double total = running + cost(i, j);
  if (i == cost.rows() - 1 && j == cost.cols() - 1) {
    if (total < out.min_total - 1e-15) {
      out.min_total = total;
      out.min_total_paths.clear();
      out.min_total_paths.push_back(prefix);
    } else if (total <= out.min_total + 1e-15) {
      out.min_total_paths.push_back(prefix);
    }
    const double mean = total / static_cast<double>(prefix.size());
    if (mean < out.min_mean) out.min_mean = mean;
    return;
  }
  const auto step = [&](Index di, Index dj) {
    if (i + di >= cost.rows() || j + dj >= cost.cols()) return;
    prefix.emplace_back(i + di, j + dj);
    enumerate_rec(cost, prefix, total, out);
    prefix.pop_back();
  };
  step(1, 1);
  step(1, 0);
  step(0, 1);
}

inline PathEnumeration enumerate_monotone_paths(const Matrix& cost) {
  PathEnumeration out;
  AlignmentPath prefix{{0, 0}};
  enumerate_rec(cost, prefix, 0.0, out);
  return out;
}

}  // namespace wsm::testing

#endif  // WSM_TESTS_BRUTE_FORCE_PATHS_HPP
