#include "ftcsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ftcsim {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel) {
  if (series.empty()) throw std::invalid_argument("render_line_plot: no series");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  std::size_t finite_points = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("render_line_plot: x/y size mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      ++finite_points;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (finite_points < 2) throw std::invalid_argument("render_line_plot: need at least 2 finite points");
  if (xmax - xmin < 1e-300) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-300) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double width = 800, height = 500;
  const double ml = 80, mr = 24, mt = 40, mb = 56;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
      << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";

  // axes + ticks
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  const int nticks = 5;
  for (int t = 0; t <= nticks; ++t) {
    double fx = xmin + (xmax - xmin) * t / nticks;
    double fy = ymin + (ymax - ymin) * t / nticks;
    out << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(fx) << "\" y2=\""
        << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 20 << "\" text-anchor=\"middle\">"
        << fmt(fx, "%.4g") << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\"" << py(fy)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">"
        << fmt(fy, "%.4g") << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
      << xlabel << "</text>\n";
  out << "<text x=\"18\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << mt + ph / 2 << ")\">" << ylabel << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!std::isfinite(series[s].x[i]) || !std::isfinite(series[s].y[i])) continue;
      out << fmt(px(series[s].x[i])) << "," << fmt(py(series[s].y[i])) << " ";
    }
    out << "\"/>\n";
    double ly = mt + 18 + 18 * static_cast<double>(s);
    out << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw - 120
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + pw - 114 << "\" y=\"" << ly << "\">" << series[s].label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ftcsim
