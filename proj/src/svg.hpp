#pragma once

// Minimal SVG line plots for the run artifacts.

#include <string>
#include <vector>

namespace quasiblow::detail {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // draw points instead of a polyline
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

// Non-finite points, and non-positive ones on log axes, are dropped.
std::string svg_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace quasiblow::detail
