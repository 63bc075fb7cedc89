#pragma once

#include <string>
#include <vector>

namespace esk {

struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::vector<double> x, y;
  // Optional shaded band around the line (e.g. IQR); same length as x.
  std::vector<double> y_low, y_high;
};

struct SvgPanel {
  std::string title, xlabel, ylabel;
  bool log_y = false;
  std::vector<SvgSeries> series;
};

// Deterministic polyline plot; panels are laid out side by side.
void write_svg_plot(const std::string& path, const std::vector<SvgPanel>& panels,
                    int panel_width = 480, int panel_height = 360);

}  // namespace esk
