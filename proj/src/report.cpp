#include "cforge/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cforge {

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  std::string s(buf);
  std::replace(s.begin(), s.end(), ',', '.');
  return s;
}

std::string frontier_csv(const std::vector<FrontierPoint>& points) {
  std::string out = kFrontierCsvHeader;
  out += '\n';
  for (const auto& pt : points) {
    const double a = std::abs(pt.filter[0]);
    const double b = pt.filter.dim() > 1 ? std::abs(pt.filter[1]) : 0.0;
    out += format_number(pt.p_success) + ',' + format_number(pt.coherence) + ',' + format_number(pt.mean_energy) +
           ',' + format_number(a) + ',' + format_number(b) + ',' + to_string(pt.family) + '\n';
  }
  return out;
}

std::string mixed_scan_csv(const std::vector<MixedScanRow>& rows) {
  std::string out = kMixedScanCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_number(r.p) + ',' + format_number(r.eta) + ',' + format_number(r.coherence) + ',' +
           format_number(r.mean_energy) + ',' + format_number(r.b_opt) + ',' + format_number(r.input_coherence) +
           ',' + format_number(r.input_energy) + '\n';
  }
  return out;
}

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_plot_svg(const PlotSpec& plot) {
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : plot.series) {
    for (double v : s.x) { x_min = std::min(x_min, v); x_max = std::max(x_max, v); }
    for (double v : s.y) { y_min = std::min(y_min, v); y_max = std::max(y_max, v); }
  }
  if (!std::isfinite(x_min)) { x_min = 0; x_max = 1; y_min = 0; y_max = 1; }
  if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
  if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
      << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 5.0;
    const double yv = y_min + (y_max - y_min) * i / 5.0;
    svg << "<line x1=\"" << fixed(sx(xv)) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fixed(sx(xv)) << "\" y2=\""
        << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
        << fixed(xv, 3) << "</text>\n";
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed(sy(yv)) << "\" x2=\"" << kLeft << "\" y2=\""
        << fixed(sy(yv)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(sy(yv) + 4) << "\" text-anchor=\"end\">" << fixed(yv, 3)
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(plot.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + ph / 2 << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      svg << (i ? " " : "") << fixed(sx(s.x[i])) << ',' << fixed(sy(s.y[i]));
    }
    svg << "\"/>\n";
    const double ly = kTop + 16 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw - 125 << "\" y2=\"" << ly
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + pw - 118 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cforge
