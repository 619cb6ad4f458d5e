#pragma once

#include <string>
#include <vector>

#include "sblkit/harness.hpp"

namespace sblkit {

struct PlotStyle {
  int width = 720;
  int height = 480;
  std::string title = "NMSE vs sweep value";
  std::string x_label = "sweep value";
  std::string y_label = "NMSE (dB)";
};

/// Renders rows as an SVG line chart: one polyline per algorithm over the
/// sweep values, in first-appearance order. NMSE values are clipped to
/// [-320, 40] dB; a footnote is added when clipping occurred. The output is
/// a pure function of (rows, style), so regeneration is byte-identical.
/// Throws std::invalid_argument on empty input or mixed families.
std::string render_plot_svg(const std::vector<SweepRow>& rows, const PlotStyle& style);

/// Writes the SVG chart and the companion CSV data file next to it.
void emit_plot(const std::vector<SweepRow>& rows, const PlotStyle& style,
               const std::string& svg_path, const std::string& data_csv_path);

}  // namespace sblkit
