#pragma once

#include <string>
#include <vector>

namespace ftcsim {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Self-contained SVG line plot: one polyline per series, auto-ranged axes
// with padding (degenerate ranges padded to unit width), tick labels and a
// legend. Non-finite samples are skipped.
std::string render_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel);

}  // namespace ftcsim
