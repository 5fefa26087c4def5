#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "scan.hpp"

namespace umbilic {

/// Shortest decimal that round-trips; locale independent.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf.data(), res.ptr);
}

/// Quotes a CSV cell when it holds a comma, quote or line break.
inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

/// CSV with leading `# ` comment lines, one header row, then data rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void comment(std::string line) { comments_.push_back(std::move(line)); }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw std::logic_error("CSV row width mismatch");
    rows_.push_back(std::move(cells));
  }
  void add_row(std::initializer_list<double> values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
  }

  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& os) const {
    for (const auto& c : comments_) os << "# " << c << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << csv_escape(columns_[i]);
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
      os << '\n';
    }
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

/// Grid as CSV rows x,y,value.
inline CsvTable grid_csv(const Grid& g) {
  CsvTable t({"x", "y", g.quantity});
  for (int j = 0; j < g.m; ++j)
    for (int i = 0; i < g.n; ++i) {
      const Point2 p = g.point(i, j);
      t.add_row({p.x, p.y, g.value(i, j)});
    }
  return t;
}

/// Contours as CSV rows line,vertex,x,y,closed.
inline CsvTable contour_csv(const ContourSet& c) {
  CsvTable t({"line", "vertex", "x", "y", "closed"});
  for (std::size_t l = 0; l < c.lines.size(); ++l)
    for (std::size_t v = 0; v < c.lines[l].points.size(); ++v)
      t.add_row({std::to_string(l), std::to_string(v), format_number(c.lines[l].points[v].x),
                 format_number(c.lines[l].points[v].y), c.lines[l].closed ? "1" : "0"});
  return t;
}

namespace detail {

// Diverging palette: blue below zero, white at zero, red above. Each side
// is scaled by its own extreme so a sign change always shows.
inline std::string diverging_color(double v, double lo, double hi) {
  double t = 0.0;
  if (v > 0.0 && hi > 0.0) t = std::min(1.0, v / hi);
  if (v < 0.0 && lo < 0.0) t = -std::min(1.0, v / lo);
  int r = 255, g = 255, b = 255;
  if (t > 0.0) {
    g = b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
  } else if (t < 0.0) {
    r = g = static_cast<int>(std::lround(255.0 * (1.0 + t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

/// SVG 1.1 heatmap of the grid with optional contour paths on top. The
/// y axis points up.
inline std::string grid_svg(const Grid& g, const ContourSet* c = nullptr, int pixel = 4) {
  const int W = g.n * pixel, H = g.m * pixel;
  const auto [lo_it, hi_it] = std::minmax_element(g.values.begin(), g.values.end());
  const double lo = *lo_it, hi = *hi_it;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<title>" << g.quantity << "</title>\n<g shape-rendering=\"crispEdges\">\n";
  for (int j = 0; j < g.m; ++j)
    for (int i = 0; i < g.n; ++i)
      os << "<rect x=\"" << i * pixel << "\" y=\"" << (g.m - 1 - j) * pixel << "\" width=\"" << pixel
         << "\" height=\"" << pixel << "\" fill=\"" << detail::diverging_color(g.value(i, j), lo, hi)
         << "\"/>\n";
  os << "</g>\n";
  if (c) {
    auto px = [&](Point2 p) {
      const double x = (p.x - g.region.x0) / (g.region.x1 - g.region.x0) * (W - pixel) + 0.5 * pixel;
      const double y = (g.region.y1 - p.y) / (g.region.y1 - g.region.y0) * (H - pixel) + 0.5 * pixel;
      return format_number(std::round(x * 100.0) / 100.0) + ' ' +
             format_number(std::round(y * 100.0) / 100.0);
    };
    os << "<g fill=\"none\" stroke=\"black\" stroke-width=\"1\">\n";
    for (const auto& line : c->lines) {
      if (line.points.empty()) continue;
      os << "<path d=\"M " << px(line.points[0]);
      for (std::size_t k = 1; k < line.points.size(); ++k) os << " L " << px(line.points[k]);
      if (line.closed) os << " Z";
      os << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace umbilic
