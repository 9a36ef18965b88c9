#include "afb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "afb/errors.hpp"

namespace afb {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[64];
  if (std::fabs(v) >= 1000.0) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  } else if (std::fabs(v) >= 1.0 || v == 0.0) {
    std::snprintf(buf, sizeof(buf), "%g", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.2g", v);
  }
  return buf;
}

// Five-stop viridis approximation.
struct Rgb {
  double r, g, b;
};
constexpr Rgb kStops[5] = {{0.267, 0.005, 0.329},
                           {0.229, 0.322, 0.545},
                           {0.128, 0.567, 0.551},
                           {0.369, 0.789, 0.383},
                           {0.993, 0.906, 0.144}};

std::string colormap(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double scaled = t * 4.0;
  const int i = std::min(3, static_cast<int>(scaled));
  const double f = scaled - i;
  const Rgb& a = kStops[i];
  const Rgb& b = kStops[i + 1];
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(255.0 * (a.r + f * (b.r - a.r)))),
                static_cast<int>(std::lround(255.0 * (a.g + f * (b.g - a.g)))),
                static_cast<int>(std::lround(255.0 * (a.b + f * (b.b - a.b)))));
  return buf;
}

// "Nice" linear tick positions covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0.0) {
    return {lo};
  }
  const double raw_step = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw_step) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    ticks.push_back(v);
  }
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const int e0 = static_cast<int>(std::floor(std::log10(lo)));
  const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
  for (int e = e0; e <= e1; ++e) {
    for (double m : {1.0, 2.0, 5.0}) {
      const double v = m * std::pow(10.0, e);
      if (v >= lo * 0.999 && v <= hi * 1.001) {
        ticks.push_back(v);
      }
    }
  }
  return ticks;
}

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
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

std::string line_chart_svg(const std::vector<SeriesPoint>& points,
                           const ChartOptions& options) {
  if (points.empty()) {
    throw ArgumentError("line chart needs at least one point");
  }
  const int width = options.width, height = options.height;
  const double ml = 64, mr = 16, mt = 36, mb = 48;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x_min = points.front().x, x_max = points.front().x;
  double y_min = points.front().lo, y_max = points.front().hi;
  for (const SeriesPoint& p : points) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
    y_min = std::min({y_min, p.lo, p.mean});
    y_max = std::max({y_max, p.hi, p.mean});
  }
  if (options.log_x && x_min <= 0.0) {
    throw ArgumentError("log-scaled x axis needs positive x values");
  }
  if (x_max == x_min) {
    x_max = x_min + 1.0;
  }
  const double y_pad = (y_max - y_min) * 0.08 + 1e-12;
  y_min -= y_pad;
  y_max += y_pad;

  auto sx = [&](double x) {
    const double t = options.log_x
                         ? (std::log10(x) - std::log10(x_min)) /
                               (std::log10(x_max) - std::log10(x_min))
                         : (x - x_min) / (x_max - x_min);
    return ml + t * pw;
  };
  auto sy = [&](double y) { return mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << escape(options.title)
      << "</text>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";

  const std::vector<double> xticks =
      options.log_x ? log_ticks(x_min, x_max) : linear_ticks(x_min, x_max);
  for (double v : xticks) {
    const double x = sx(v);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(v) << "</text>\n";
  }
  for (double v : linear_ticks(y_min, y_max)) {
    const double y = sy(v);
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << fmt(y) << "\" x2=\"" << ml
        << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << fmt(y) << "\" x2=\"" << ml + pw
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(v) << "</text>\n";
  }
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape(options.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">"
      << escape(options.y_label) << "</text>\n";

  // confidence band
  std::ostringstream band;
  for (const SeriesPoint& p : points) {
    band << fmt(sx(p.x)) << ',' << fmt(sy(p.hi)) << ' ';
  }
  for (auto it = points.rbegin(); it != points.rend(); ++it) {
    band << fmt(sx(it->x)) << ',' << fmt(sy(it->lo)) << ' ';
  }
  svg << "<polygon points=\"" << band.str()
      << "\" fill=\"#4477aa\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";

  // mean line and markers
  std::ostringstream line;
  for (const SeriesPoint& p : points) {
    line << fmt(sx(p.x)) << ',' << fmt(sy(p.mean)) << ' ';
  }
  svg << "<polyline points=\"" << line.str()
      << "\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"2\"/>\n";
  for (const SeriesPoint& p : points) {
    svg << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.mean))
        << "\" r=\"3\" fill=\"#4477aa\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string heatmap_svg(const std::vector<double>& values, int rows, int cols,
                        const HeatmapOptions& options) {
  if (rows < 1 || cols < 1 ||
      values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ArgumentError("heatmap dimensions do not match the value count");
  }
  if (rows > options.cell_limit || cols > options.cell_limit) {
    throw ArgumentError("heatmap too large");
  }
  double v_min = values[0], v_max = values[0];
  for (double v : values) {
    v_min = std::min(v_min, v);
    v_max = std::max(v_max, v);
  }
  const double span = (v_max > v_min) ? (v_max - v_min) : 1.0;

  const double ml = options.row_labels.empty() ? 48 : 84;
  const double mt = 36, mr = 16, mb = 48;
  const double cell = std::clamp(560.0 / std::max(rows, cols), 3.0, 36.0);
  const double pw = cell * cols, ph = cell * rows;
  const int width = static_cast<int>(ml + pw + mr);
  const int height = static_cast<int>(mt + ph + mb);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << escape(options.title)
      << "</text>\n";

  for (int r = 0; r < rows; ++r) {
    const int draw_row = options.flip_rows ? (rows - 1 - r) : r;
    for (int c = 0; c < cols; ++c) {
      const double v = values[static_cast<std::size_t>(r) * cols + c];
      const double x = ml + c * cell;
      const double y = mt + draw_row * cell;
      svg << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(cell) << "\" height=\"" << fmt(cell) << "\" fill=\""
          << colormap((v - v_min) / span) << "\"/>\n";
      if (options.annotate_cells) {
        svg << "<text x=\"" << fmt(x + cell / 2) << "\" y=\"" << fmt(y + cell / 2 + 3)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\""
            << fmt(std::min(11.0, cell * 0.45)) << "\" fill=\""
            << (((v - v_min) / span) > 0.6 ? "black" : "white") << "\">" << fmt_tick(v)
            << "</text>\n";
      }
    }
    if (!options.row_labels.empty() &&
        r < static_cast<int>(options.row_labels.size())) {
      const int draw = options.flip_rows ? (rows - 1 - r) : r;
      svg << "<text x=\"" << ml - 6 << "\" y=\"" << fmt(mt + draw * cell + cell / 2 + 3)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
          << escape(options.row_labels[static_cast<std::size_t>(r)]) << "</text>\n";
    }
  }
  for (int c = 0;
       c < std::min(cols, static_cast<int>(options.col_labels.size())); ++c) {
    svg << "<text x=\"" << fmt(ml + c * cell + cell / 2) << "\" y=\"" << mt + ph + 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << escape(options.col_labels[static_cast<std::size_t>(c)]) << "</text>\n";
  }
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape(options.x_label) << "</text>\n";
  svg << "<text x=\"14\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << mt + ph / 2 << ")\">"
      << escape(options.y_label) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace afb
