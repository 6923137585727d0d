#pragma once

#include <string>
#include <vector>

namespace singsurf::svg {

struct Series {
  std::vector<double> x, y;  // NaN entries break the line
  std::string label;
  std::string color = "#1f4e99";
  bool dashed = false;
  double width = 1.5;
};

// Full-height or full-width marker line.
struct Marker {
  double at = 0;
  std::string label;
  std::string color = "#d62728";
  bool dashed = true;
};

// Static line plot with axes, ticks and a legend. Axis limits come from the
// series unless set explicitly (x_min < x_max, likewise for y).
struct Plot {
  std::string title, x_label, y_label;
  std::vector<Series> series;
  std::vector<Marker> vertical, horizontal;
  double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
  int width = 860, height = 520;

  std::string render() const;
};

}  // namespace singsurf::svg
