#include "esk/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace esk {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void take(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

// Round tick positions so axes stay readable.
std::vector<double> ticks(double lo, double hi, int n = 5) {
  std::vector<double> out;
  const double span = hi - lo;
  const double raw = span / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-12 * span; t += step) out.push_back(t);
  return out;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::vector<SvgPanel>& panels,
                    int panel_width, int panel_height) {
  if (panels.empty()) throw std::invalid_argument("svg: no panels");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("svg: cannot open " + path);

  const int W = panel_width, H = panel_height;
  const int ml = 62, mr = 16, mt = 34, mb = 44;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W * panels.size()
     << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const SvgPanel& panel = panels[pi];
    const int x0 = static_cast<int>(pi) * W + ml;
    const int y0 = mt;
    const int pw = W - ml - mr, ph = H - mt - mb;

    Range rx, ry;
    auto yval = [&](double y) {
      return panel.log_y ? (y > 0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN())
                         : y;
    };
    for (const auto& s : panel.series) {
      for (double v : s.x) rx.take(v);
      for (double v : s.y) ry.take(yval(v));
      for (double v : s.y_low) ry.take(yval(v));
      for (double v : s.y_high) ry.take(yval(v));
    }
    rx.pad();
    ry.pad();

    auto sx = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto sy = [&](double v) {
      return y0 + ph - (yval(v) - ry.lo) / (ry.hi - ry.lo) * ph;
    };

    os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << pw << "\" height=\""
       << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << y0 - 12
       << "\" text-anchor=\"middle\" font-size=\"13\">" << panel.title << "</text>\n";
    os << "<text x=\"" << x0 + pw / 2 << "\" y=\"" << y0 + ph + 34
       << "\" text-anchor=\"middle\">" << panel.xlabel << "</text>\n";
    os << "<text x=\"" << x0 - 48 << "\" y=\"" << y0 + ph / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << x0 - 48 << " "
       << y0 + ph / 2 << ")\">" << panel.ylabel << "</text>\n";

    for (double t : ticks(rx.lo, rx.hi)) {
      const double px = sx(t);
      os << "<line x1=\"" << fmt(px) << "\" y1=\"" << y0 + ph << "\" x2=\"" << fmt(px)
         << "\" y2=\"" << y0 + ph + 4 << "\" stroke=\"#444\"/>\n";
      os << "<text x=\"" << fmt(px) << "\" y=\"" << y0 + ph + 16
         << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    for (double t : ticks(ry.lo, ry.hi)) {
      const double py = y0 + ph - (t - ry.lo) / (ry.hi - ry.lo) * ph;
      const std::string label = panel.log_y ? ("1e" + fmt(t)) : fmt(t);
      os << "<line x1=\"" << x0 - 4 << "\" y1=\"" << fmt(py) << "\" x2=\"" << x0
         << "\" y2=\"" << fmt(py) << "\" stroke=\"#444\"/>\n";
      os << "<text x=\"" << x0 - 6 << "\" y=\"" << fmt(py + 3)
         << "\" text-anchor=\"end\">" << label << "</text>\n";
    }

    int legend_y = y0 + 12;
    for (const auto& s : panel.series) {
      if (!s.y_low.empty() && s.y_low.size() == s.x.size() &&
          s.y_high.size() == s.x.size()) {
        os << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i)
          os << fmt(sx(s.x[i])) << "," << fmt(sy(s.y_high[i])) << " ";
        for (size_t i = s.x.size(); i-- > 0;)
          os << fmt(sx(s.x[i])) << "," << fmt(sy(s.y_low[i])) << " ";
        os << "\"/>\n";
      }
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
      if (s.dashed) os << " stroke-dasharray=\"5,3\"";
      os << " points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) {
        const double px = sx(s.x[i]), py = sy(s.y[i]);
        if (std::isfinite(px) && std::isfinite(py))
          os << fmt(px) << "," << fmt(py) << " ";
      }
      os << "\"/>\n";
      if (!s.label.empty()) {
        os << "<line x1=\"" << x0 + pw - 110 << "\" y1=\"" << legend_y << "\" x2=\""
           << x0 + pw - 92 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
           << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"5,3\"" : "")
           << "/>\n";
        os << "<text x=\"" << x0 + pw - 88 << "\" y=\"" << legend_y + 4 << "\">"
           << s.label << "</text>\n";
        legend_y += 14;
      }
    }
  }
  os << "</svg>\n";
}

}  // namespace esk
