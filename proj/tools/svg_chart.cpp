#include "svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace pgocli {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '&')
      out += "&amp;";
    else
      out += c;
  }
  return out;
}

std::string text(double x, double y, const std::string& s,
                 const std::string& anchor, int size,
                 const std::string& extra = "") {
  return "<text x=\"" + coord(x) + "\" y=\"" + coord(y) +
         "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) +
         "\" text-anchor=\"" + anchor + "\"" + extra + ">" + escape(s) +
         "</text>\n";
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void widen(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (hi <= lo) hi = lo + 1.0;
    const double m = 0.08 * (hi - lo);
    lo -= m;
    hi += m;
  }
  double at(double v, double a, double b) const {
    return a + (v - lo) / (hi - lo) * (b - a);
  }
};

}  // namespace

std::string line_chart_svg(const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<ChartSeries>& series) {
  const double w = 720, h = 420;
  const double l = 75, r = 160, t = 48, b = 52;

  Range xr{1e300, -1e300}, yr{1e300, -1e300};
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xr.widen(x);
      yr.widen(y);
      any = true;
    }
  if (!any) {
    xr = {0.0, 1.0};
    yr = {0.0, 1.0};
  }
  xr.pad();
  yr.pad();

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    coord(w) + "\" height=\"" + coord(h) + "\" viewBox=\"0 0 " +
                    coord(w) + " " + coord(h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += text(w / 2, 24, title, "middle", 16);

  // Axes and grid.
  for (int k = 0; k <= 5; ++k) {
    const double fy = yr.lo + (yr.hi - yr.lo) * k / 5.0;
    const double py = yr.at(fy, h - b, t);
    svg += "<line x1=\"" + coord(l) + "\" y1=\"" + coord(py) + "\" x2=\"" +
           coord(w - r) + "\" y2=\"" + coord(py) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += text(l - 8, py + 4, num(fy), "end", 11);
    const double fx = xr.lo + (xr.hi - xr.lo) * k / 5.0;
    const double px = xr.at(fx, l, w - r);
    svg += text(px, h - b + 18, num(fx), "middle", 11);
  }
  svg += "<line x1=\"" + coord(l) + "\" y1=\"" + coord(t) + "\" x2=\"" +
         coord(l) + "\" y2=\"" + coord(h - b) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + coord(l) + "\" y1=\"" + coord(h - b) + "\" x2=\"" +
         coord(w - r) + "\" y2=\"" + coord(h - b) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += text((l + w - r) / 2, h - 14, x_label, "middle", 12);
  svg += text(18, (t + h - b) / 2, y_label, "middle", 12,
              " transform=\"rotate(-90 18 " +
                  coord((t + h - b) / 2) + ")\"");

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    std::string pts;
    for (const auto& [x, y] : series[si].points) {
      if (!std::isfinite(y)) continue;
      pts += coord(xr.at(x, l, w - r)) + "," + coord(yr.at(y, h - b, t)) + " ";
      svg += "<circle cx=\"" + coord(xr.at(x, l, w - r)) + "\" cy=\"" +
             coord(yr.at(y, h - b, t)) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    const double ly = t + 16 + 18.0 * static_cast<double>(si);
    svg += "<rect x=\"" + coord(w - r + 12) + "\" y=\"" + coord(ly - 9) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    svg += text(w - r + 30, ly + 1, series[si].label, "start", 11);
  }
  svg += "</svg>\n";
  return svg;
}

std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<std::string>& series_labels,
                          const std::vector<BarPanel>& panels) {
  const double w = 720, panel_h = 250;
  const double l = 75, r = 160, t = 56, panel_top = 34, b = 40;
  const double h =
      t + panel_h * static_cast<double>(std::max<std::size_t>(panels.size(), 1));

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    coord(w) + "\" height=\"" + coord(h) + "\" viewBox=\"0 0 " +
                    coord(w) + " " + coord(h) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += text(w / 2, 22, title, "middle", 16);
  for (std::size_t si = 0; si < series_labels.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    const double ly = t + 10 + 18.0 * static_cast<double>(si);
    svg += "<rect x=\"" + coord(w - r + 12) + "\" y=\"" + coord(ly - 9) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    svg += text(w - r + 30, ly + 1, series_labels[si], "start", 11);
  }

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& panel = panels[pi];
    const double top = t + panel_h * static_cast<double>(pi) + panel_top;
    const double bottom = t + panel_h * static_cast<double>(pi + 1) - b;

    Range yr{0.0, 0.0};
    for (const auto& g : panel.groups)
      for (double v : g.values) yr.widen(v);
    if (yr.hi <= 0.0) yr.hi = 1.0;
    yr.hi *= 1.1;

    svg += text(l, top - 12, panel.title, "start", 13);
    for (int k = 0; k <= 4; ++k) {
      const double fy = yr.hi * k / 4.0;
      const double py = yr.at(fy, bottom, top);
      svg += "<line x1=\"" + coord(l) + "\" y1=\"" + coord(py) + "\" x2=\"" +
             coord(w - r) + "\" y2=\"" + coord(py) +
             "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
      svg += text(l - 8, py + 4, num(fy), "end", 11);
    }
    svg += "<line x1=\"" + coord(l) + "\" y1=\"" + coord(bottom) +
           "\" x2=\"" + coord(w - r) + "\" y2=\"" + coord(bottom) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += text(18, (top + bottom) / 2, y_label, "middle", 12,
                " transform=\"rotate(-90 18 " + coord((top + bottom) / 2) +
                    ")\"");

    const std::size_t ng = std::max<std::size_t>(panel.groups.size(), 1);
    const double group_w = (w - r - l) / static_cast<double>(ng);
    for (std::size_t gi = 0; gi < panel.groups.size(); ++gi) {
      const auto& g = panel.groups[gi];
      const double gx = l + group_w * static_cast<double>(gi);
      const std::size_t nb = std::max<std::size_t>(g.values.size(), 1);
      const double bar_w = std::min(28.0, group_w * 0.8 /
                                              static_cast<double>(nb));
      const double used = bar_w * static_cast<double>(g.values.size());
      double bx = gx + (group_w - used) / 2.0;
      for (std::size_t si = 0; si < g.values.size(); ++si, bx += bar_w) {
        const double v = g.values[si];
        if (!std::isfinite(v)) continue;
        const double py = yr.at(v, bottom, top);
        svg += "<rect x=\"" + coord(bx) + "\" y=\"" + coord(py) +
               "\" width=\"" + coord(bar_w - 2) + "\" height=\"" +
               coord(bottom - py) + "\" fill=\"" +
               kPalette[si % kPaletteSize] + "\"/>\n";
      }
      svg += text(gx + group_w / 2, bottom + 16, g.label, "middle", 11);
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace pgocli
