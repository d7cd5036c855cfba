// wsm/svg.cpp

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

#include "wsm/svg.hpp"

#include <cmath>
#include <cstdio>

#include "wsm/io.hpp"

namespace wsm {

namespace {

const char* kPalette[] = {"#4878d0", "#ee854a", "#6acc64", "#d65f5f",
                          "#956cb4", "#8c613c", "#dc7ec0", "#797979"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_grouped_bar_svg(const std::filesystem::path& path,
                           const std::string& title,
                           const std::string& y_label,
                           const std::vector<std::string>& groups,
                           const std::vector<BarSeries>& series,
                           double y_max) {
  const double margin_left = 60, margin_right = 30, margin_top = 50,
               margin_bottom = 70;
  const double group_width = std::max<double>(60, 14.0 * series.size() + 20);
  const double plot_w = group_width * groups.size();
  const double plot_h = 260;
  const double width = margin_left + plot_w + margin_right;
  const double height = margin_top + plot_h + margin_bottom +
                        18.0 * ((series.size() + 3) / 4);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<text x=\"" + fmt(width / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title +
         "</text>\n";

  // y axis with gridlines every 0.1 * y_max
  for (int i = 0; i <= 10; ++i) {
    const double v = y_max * i / 10.0;
    const double y = margin_top + plot_h * (1.0 - static_cast<double>(i) / 10.0);
    svg += "<line x1=\"" + fmt(margin_left) + "\" y1=\"" + fmt(y) + "\" x2=\"" +
           fmt(margin_left + plot_w) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(margin_left - 6) + "\" y=\"" + fmt(y + 4) +
           "\" text-anchor=\"end\" font-size=\"10\">" + fmt(v) + "</text>\n";
  }
  svg += "<text x=\"14\" y=\"" + fmt(margin_top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 " +
         fmt(margin_top + plot_h / 2) + ")\">" + y_label + "</text>\n";

  const double bar_w = (group_width - 20.0) / std::max<std::size_t>(1, series.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = margin_left + group_width * g + 10.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (g >= series[s].values.size()) continue;
      const double v = series[s].values[g];
      if (std::isnan(v)) continue;
      const double h = plot_h * std::clamp(v / y_max, 0.0, 1.0);
      svg += "<rect x=\"" + fmt(gx + bar_w * s) + "\" y=\"" +
             fmt(margin_top + plot_h - h) + "\" width=\"" + fmt(bar_w - 2) +
             "\" height=\"" + fmt(h) + "\" fill=\"" +
             kPalette[s % 8] + "\"/>\n";
    }
    svg += "<text x=\"" + fmt(gx + (group_width - 20.0) / 2) + "\" y=\"" +
           fmt(margin_top + plot_h + 14) +
           "\" text-anchor=\"middle\" font-size=\"10\" transform=\"rotate(25 " +
           fmt(gx + (group_width - 20.0) / 2) + " " +
           fmt(margin_top + plot_h + 14) + ")\">" + groups[g] + "</text>\n";
  }

  // legend, four entries per row
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double lx = margin_left + 150.0 * (s % 4);
    const double ly = margin_top + plot_h + 44 + 18.0 * (s / 4);
    svg += "<rect x=\"" + fmt(lx) + "\" y=\"" + fmt(ly - 9) +
           "\" width=\"10\" height=\"10\" fill=\"" + kPalette[s % 8] +
           "\"/>\n";
    svg += "<text x=\"" + fmt(lx + 14) + "\" y=\"" + fmt(ly) +
           "\" font-size=\"10\">" + series[s].label + "</text>\n";
  }
  svg += "</svg>\n";
  atomic_write_file(path, svg);
}

}  // namespace wsm
