// Minimal static SVG charts for bench reports: a multi-series line chart and
// stacked panels of grouped bars. No external renderer; output is plain SVG
// text with deterministic formatting.
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace pgocli {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // sorted by x by the caller
};

std::string line_chart_svg(const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<ChartSeries>& series);

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per series label; NaN skips the bar
};

struct BarPanel {
  std::string title;
  std::vector<BarGroup> groups;
};

std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<std::string>& series_labels,
                          const std::vector<BarPanel>& panels);

}  // namespace pgocli
