#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ncbm {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Self-contained static line chart: axes with ticks, one polyline per series,
// legend. No external renderer involved; the returned string is the SVG file.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, std::span<const ChartSeries> series,
                              const std::string& metadata_comment);

}  // namespace ncbm
