// wsm/svg.hpp

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

#ifndef WSM_SVG_HPP
#define WSM_SVG_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace wsm {

struct BarSeries {
  std::string label;
  std::vector<double> values;  // one per group; NaN leaves a gap
};

/// Grouped bar chart with a y axis in [0, y_max] and a legend.
void write_grouped_bar_svg(const std::filesystem::path& path,
                           const std::string& title,
                           const std::string& y_label,
                           const std::vector<std::string>& groups,
                           const std::vector<BarSeries>& series,
                           double y_max = 1.0);

}  // namespace wsm

#endif  // WSM_SVG_HPP
