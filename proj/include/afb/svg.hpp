// Small SVG emitters for the lab's plots: line charts with confidence bands
// and heatmaps (spectrograms, confusion matrices). No dependencies; output is
// plain SVG 1.1 text.
#pragma once

#include <string>
#include <vector>

namespace afb {

struct SeriesPoint {
  double x = 0.0;
  double mean = 0.0;
  double lo = 0.0;  // confidence band bounds
  double hi = 0.0;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 420;
};

/// Mean polyline with a shaded confidence band and point markers.
std::string line_chart_svg(const std::vector<SeriesPoint>& points,
                           const ChartOptions& options);

struct HeatmapOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::string> row_labels;  // optional, one per row
  std::vector<std::string> col_labels;  // optional, one per column
  bool annotate_cells = false;          // print values inside cells
  bool flip_rows = false;               // row 0 drawn at the bottom
  int cell_limit = 4096;                // safety cap per axis
};

/// Row-major matrix rendered with a perceptual colormap.
std::string heatmap_svg(const std::vector<double>& values, int rows, int cols,
                        const HeatmapOptions& options);

}  // namespace afb
