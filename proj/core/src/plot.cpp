#include "sblkit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sblkit {

namespace {

constexpr double kClipLo = kNmseFloorDb;
constexpr double kClipHi = 40.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_plot_svg(const std::vector<SweepRow>& rows, const PlotStyle& style) {
  if (rows.empty()) throw std::invalid_argument("render_plot_svg: no rows");
  for (const auto& r : rows)
    if (r.family != rows.front().family)
      throw std::invalid_argument("render_plot_svg: rows mix matrix families");

  // Sweep positions are categorical (index order of first appearance), which
  // keeps log-ranged sweeps like kappa readable without axis heuristics.
  std::vector<double> xs;
  std::vector<std::string> series;  // algorithm names, first-appearance order
  for (const auto& r : rows) {
    if (std::find(xs.begin(), xs.end(), r.sweep_value) == xs.end())
      xs.push_back(r.sweep_value);
    if (std::find(series.begin(), series.end(), r.alg) == series.end())
      series.push_back(r.alg);
  }

  bool clipped = false;
  auto clip = [&clipped](double v) {
    if (v < kClipLo || v > kClipHi || std::isnan(v)) clipped = true;
    if (std::isnan(v)) return kClipHi;
    return std::clamp(v, kClipLo, kClipHi);
  };

  double ymin = kClipHi, ymax = kClipLo;
  std::map<std::pair<std::string, double>, double> value;  // (alg, sweep) -> nmse
  for (const auto& r : rows) {
    const double v = clip(r.nmse_db);
    value[{r.alg, r.sweep_value}] = v;
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  if (ymin == ymax) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const double pw = style.width - ml - mr;
  const double ph = style.height - mt - mb;
  auto xpos = [&](size_t i) {
    return xs.size() == 1 ? ml + pw / 2
                          : ml + pw * double(i) / double(xs.size() - 1);
  };
  auto ypos = [&](double v) { return mt + ph * (ymax - v) / (ymax - ymin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width
      << "\" height=\"" << style.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << style.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" << style.title << "</text>\n";

  // Axes.
  svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml)
      << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\""
      << fmt(ml + pw) << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";

  for (size_t i = 0; i < xs.size(); ++i) {
    svg << "<text x=\"" << fmt(xpos(i)) << "\" y=\"" << fmt(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(xs[i]) << "</text>\n";
  }
  const int yticks = 6;
  for (int i = 0; i <= yticks; ++i) {
    const double v = ymin + (ymax - ymin) * double(i) / yticks;
    svg << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(ypos(v)) << "\" x2=\""
        << fmt(ml) << "\" y2=\"" << fmt(ypos(v)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(ypos(v) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  svg << "<text x=\"" << style.width / 2 << "\" y=\"" << style.height - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << style.x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << style.height / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " << style.height / 2 << ")\">" << style.y_label
      << "</text>\n";

  // Series.
  for (size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::ostringstream pts;
    for (size_t i = 0; i < xs.size(); ++i) {
      auto it = value.find({series[si], xs[i]});
      if (it == value.end()) continue;
      pts << fmt(xpos(i)) << ',' << fmt(ypos(it->second)) << ' ';
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    svg << "<text x=\"" << fmt(ml + pw - 4) << "\" y=\"" << fmt(mt + 16 + 16 * double(si))
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << color << "\">" << series[si] << "</text>\n";
  }

  if (clipped)
    svg << "<text x=\"" << fmt(ml) << "\" y=\"" << style.height - 26
        << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555\">"
           "note: values clipped to [" << fmt(kClipLo) << ", " << fmt(kClipHi)
        << "] dB</text>\n";

  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<SweepRow>& rows, const PlotStyle& style,
               const std::string& svg_path, const std::string& data_csv_path) {
  const std::string svg = render_plot_svg(rows, style);
  std::ofstream f(svg_path);
  if (!f) throw std::runtime_error("cannot open for writing: " + svg_path);
  f << svg;
  write_rows_csv(data_csv_path, rows);
}

}  // namespace sblkit
