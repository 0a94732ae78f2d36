#pragma once

// CSV and SVG renderers for frontier and mixed-state scan results.

#include <string>
#include <vector>

#include "cforge/synthesis.hpp"

namespace cforge {

/// `%.12g` with '.' as the decimal separator regardless of locale.
std::string format_number(double value);

inline constexpr const char* kFrontierCsvHeader = "p_success,coherence_nats,mean_energy,a,b,family";
inline constexpr const char* kMixedScanCsvHeader =
    "p,eta,coherence_nats,mean_energy,b_opt,input_coherence,input_energy";

/// One row per point; a = |m_0|, b = |m_1| of the point's filter.
std::string frontier_csv(const std::vector<FrontierPoint>& points);
std::string mixed_scan_csv(const std::vector<MixedScanRow>& rows);

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Static line plot with axes, ticks and a legend.
std::string line_plot_svg(const PlotSpec& plot);

}  // namespace cforge
