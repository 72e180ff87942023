#pragma once

#include <string>
#include <vector>

namespace anderson {

/// Minimal static line-chart renderer for distance curves and shell
/// profiles. No dependencies; output is a standalone SVG file.
struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 860;
  int height = 520;
};

void write_line_chart_svg(const std::string& path,
                          const std::vector<ChartSeries>& series,
                          const ChartOptions& options);

} // namespace anderson
