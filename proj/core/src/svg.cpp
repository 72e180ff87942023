#include "anderson/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "anderson/errors.hpp"

namespace anderson {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

} // namespace

void write_line_chart_svg(const std::string& path,
                          const std::vector<ChartSeries>& series,
                          const ChartOptions& options) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmin <= xmax) || !(ymin <= ymax))
    throw DomainError("write_line_chart_svg: no data points");
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const int W = options.width, H = options.height;
  const double left = 78, right = 24, top = 40, bottom = 56;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };

  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open '" + path + "' for writing");
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
      << "' viewBox='0 0 " << W << ' ' << H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << W / 2 << "' y='24' font-family='sans-serif' font-size='16' "
         "text-anchor='middle'>" << options.title << "</text>\n";

  // axes and ticks
  out << "<g stroke='#333' stroke-width='1'>"
      << "<line x1='" << left << "' y1='" << H - bottom << "' x2='" << W - right
      << "' y2='" << H - bottom << "'/>"
      << "<line x1='" << left << "' y1='" << top << "' x2='" << left << "' y2='"
      << H - bottom << "'/></g>\n";
  const int nticks = 5;
  out << "<g font-family='sans-serif' font-size='11' fill='#333'>\n";
  for (int t = 0; t <= nticks; ++t) {
    const double xv = xmin + (xmax - xmin) * t / nticks;
    const double yv = ymin + (ymax - ymin) * t / nticks;
    out << "<line x1='" << px(xv) << "' y1='" << H - bottom << "' x2='" << px(xv)
        << "' y2='" << H - bottom + 5 << "' stroke='#333'/>"
        << "<text x='" << px(xv) << "' y='" << H - bottom + 18
        << "' text-anchor='middle'>" << fmt(xv) << "</text>\n";
    out << "<line x1='" << left - 5 << "' y1='" << py(yv) << "' x2='" << left
        << "' y2='" << py(yv) << "' stroke='#333'/>"
        << "<text x='" << left - 8 << "' y='" << py(yv) + 4
        << "' text-anchor='end'>" << fmt(yv) << "</text>\n";
  }
  out << "<text x='" << (left + W - right) / 2 << "' y='" << H - 14
      << "' text-anchor='middle'>" << options.x_label << "</text>\n";
  out << "<text x='16' y='" << (top + H - bottom) / 2
      << "' text-anchor='middle' transform='rotate(-90 16 "
      << (top + H - bottom) / 2 << ")'>" << options.y_label << "</text>\n</g>\n";

  // polylines
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.x.empty()) continue;
    out << "<polyline fill='none' stroke='" << kPalette[si % 10]
        << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    out << "'/>\n";
  }

  // legend
  out << "<g font-family='sans-serif' font-size='12'>\n";
  double ly = top + 4;
  for (std::size_t si = 0; si < series.size(); ++si) {
    if (series[si].label.empty()) continue;
    out << "<rect x='" << W - right - 150 << "' y='" << ly - 9
        << "' width='14' height='4' fill='" << kPalette[si % 10] << "'/>"
        << "<text x='" << W - right - 132 << "' y='" << ly - 2 << "'>"
        << series[si].label << "</text>\n";
    ly += 16;
  }
  out << "</g>\n</svg>\n";
}

} // namespace anderson
