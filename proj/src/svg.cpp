#include "ncbm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ncbm {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;  // room for the legend
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 60;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, std::span<const ChartSeries> series,
                              const std::string& metadata_comment) {
  double x_min = 0.0, x_max = 1.0;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        first = false;
      } else {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
      }
    }
  if (x_max <= x_min) x_max = x_min + 1.0;
  // Survivability lives in [0,1]; the y axis is fixed for comparability.
  const double y_min = 0.0, y_max = 1.0;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!-- " << escape_xml(metadata_comment) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"16\">" << escape_xml(title) << "</text>\n";

  // axes
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << sy(y_min) << "\" x2=\""
      << kMarginLeft + plot_w << "\" y2=\"" << sy(y_min) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << sy(y_min) << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << sy(y_max) << "\" stroke=\"black\"/>\n";

  const int n_ticks = 5;
  for (int t = 0; t <= n_ticks; ++t) {
    const double fx = x_min + (x_max - x_min) * t / n_ticks;
    const double px = sx(fx);
    out << "<line x1=\"" << num(px) << "\" y1=\"" << sy(y_min) << "\" x2=\"" << num(px)
        << "\" y2=\"" << sy(y_min) + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px) << "\" y=\"" << sy(y_min) + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(fx)
        << "</text>\n";
    const double fy = y_min + (y_max - y_min) * t / n_ticks;
    const double py = sy(fy);
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kMarginLeft - 9 << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(fy)
        << "</text>\n";
    // light horizontal grid line
    if (t > 0)
      out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << num(py) << "\" x2=\""
          << kMarginLeft + plot_w << "\" y2=\"" << num(py)
          << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }

  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape_xml(x_label) << "</text>\n";
  out << "<text x=\"20\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
      << kMarginTop + plot_h / 2 << ")\">" << escape_xml(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (const auto& [x, y] : series[i].points)
      out << num(sx(x)) << ',' << num(sy(std::clamp(y, y_min, y_max))) << ' ';
    out << "\"/>\n";
  }

  // legend
  const double lx = kMarginLeft + plot_w + 16;
  double ly = kMarginTop + 10;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 24)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(series[i].label)
        << "</text>\n";
    ly += 20;
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace ncbm
