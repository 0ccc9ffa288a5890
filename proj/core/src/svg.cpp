#include "percolade/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "percolade/errors.hpp"

namespace percolade {

namespace {

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Panel {
  double left, top, width, height;
  double x_min, x_max, y_min, y_max;

  double px(double x) const {
    return left + (x - x_min) / (x_max - x_min) * width;
  }
  double py(double y) const {
    return top + height - (y - y_min) / (y_max - y_min) * height;
  }
};

// Axes, ticks, series line with point markers and a shaded band.
void render_panel(std::string& svg, const Panel& p, const std::string& y_label,
                  std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> lo, std::span<const double> hi,
                  const char* color, const char* band_color) {
  svg += "<rect x=\"" + num(p.left) + "\" y=\"" + num(p.top) + "\" width=\"" + num(p.width) +
         "\" height=\"" + num(p.height) + "\" fill=\"none\" stroke=\"#888\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double fx = p.x_min + (p.x_max - p.x_min) * t / 4.0;
    const double gx = p.px(fx);
    svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(p.top + p.height) + "\" x2=\"" + num(gx) +
           "\" y2=\"" + num(p.top + p.height + 4) + "\" stroke=\"#555\"/>\n";
    svg += "<text x=\"" + num(gx) + "\" y=\"" + num(p.top + p.height + 16) +
           "\" font-size=\"10\" text-anchor=\"middle\" fill=\"#333\">" + tick_label(fx) +
           "</text>\n";
    const double fy = p.y_min + (p.y_max - p.y_min) * t / 4.0;
    const double gy = p.py(fy);
    svg += "<line x1=\"" + num(p.left - 4) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(p.left) +
           "\" y2=\"" + num(gy) + "\" stroke=\"#555\"/>\n";
    svg += "<text x=\"" + num(p.left - 7) + "\" y=\"" + num(gy + 3) +
           "\" font-size=\"10\" text-anchor=\"end\" fill=\"#333\">" + tick_label(fy) +
           "</text>\n";
  }

  svg += "<text x=\"" + num(p.left) + "\" y=\"" + num(p.top - 6) +
         "\" font-size=\"11\" fill=\"#333\">" + escape(y_label) + "</text>\n";

  if (xs.size() > 1) {
    std::string band = "<polygon points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      band += num(p.px(xs[i])) + "," + num(p.py(hi[i])) + " ";
    for (std::size_t i = xs.size(); i-- > 0;)
      band += num(p.px(xs[i])) + "," + num(p.py(lo[i])) + " ";
    band += "\" fill=\"";
    band += band_color;
    band += "\" stroke=\"none\"/>\n";
    svg += band;

    std::string line = "<polyline points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      line += num(p.px(xs[i])) + "," + num(p.py(ys[i])) + " ";
    line += "\" fill=\"none\" stroke=\"";
    line += color;
    line += "\" stroke-width=\"1.5\"/>\n";
    svg += line;
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    svg += "<circle cx=\"" + num(p.px(xs[i])) + "\" cy=\"" + num(p.py(ys[i])) +
           "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
}

}  // namespace

std::string sweep_chart_svg(std::span<const SweepRow> rows, const std::string& title) {
  if (rows.empty()) throw input_error("cannot chart an empty sweep");

  std::vector<double> xs, rate, rate_lo, rate_hi, len, len_lo, len_hi;
  for (const SweepRow& r : rows) {
    xs.push_back(r.p);
    rate.push_back(r.stats.find_rate);
    rate_lo.push_back(r.stats.wilson_low);
    rate_hi.push_back(r.stats.wilson_high);
    len.push_back(r.stats.mean_cycle_length);
    len_lo.push_back(std::max(0.0, r.stats.mean_cycle_length - 2.0 * r.stats.se_cycle_length));
    len_hi.push_back(r.stats.mean_cycle_length + 2.0 * r.stats.se_cycle_length);
  }

  double x_min = *std::min_element(xs.begin(), xs.end());
  double x_max = *std::max_element(xs.begin(), xs.end());
  if (x_min == x_max) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  double len_max = *std::max_element(len_hi.begin(), len_hi.end());
  if (len_max <= 0.0) len_max = 1.0;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"560\" "
         "viewBox=\"0 0 720 560\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"560\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"360\" y=\"24\" font-size=\"15\" text-anchor=\"middle\" fill=\"#111\">" +
         escape(title) + "</text>\n";

  const Panel top{70, 50, 600, 190, x_min, x_max, 0.0, 1.0};
  render_panel(svg, top, "cycle-find rate (95% band)", xs, rate, rate_lo, rate_hi, "#1f5fa8",
               "#c7dbf0");

  const Panel bottom{70, 310, 600, 190, x_min, x_max, 0.0, len_max * 1.05};
  render_panel(svg, bottom, "mean cycle length (2se band)", xs, len, len_lo, len_hi, "#a8431f",
               "#f0d2c7");

  svg += "<text x=\"360\" y=\"548\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333\">edge "
         "probability p</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace percolade
