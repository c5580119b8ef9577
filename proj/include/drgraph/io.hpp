#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "drgraph/errors.hpp"
#include "drgraph/graph.hpp"
#include "drgraph/layout.hpp"
#include "drgraph/metrics.hpp"
#include "json.hpp"

namespace drgraph {

// ---------------------------------------------------------------------------
// Coordinates

namespace detail {

// Fixed notation with at least 6 significant digits (and 6 decimals).
inline void write_coordinate(std::ostream& out, double v) {
  int decimals = 6;
  if (v != 0.0 && std::isfinite(v)) {
    const int mag = static_cast<int>(std::floor(std::log10(std::abs(v))));
    if (mag < 0) decimals += -mag - 1;
  }
  out << std::fixed << std::setprecision(decimals) << v;
}

}  // namespace detail

// "#nodes N", then one "x y" line per node.
inline void write_coords(const Layout& layout, std::ostream& out) {
  out << "#nodes " << layout.size() << '\n';
  for (const auto& p : layout.positions) {
    detail::write_coordinate(out, p.x);
    out << ' ';
    detail::write_coordinate(out, p.y);
    out << '\n';
  }
}

inline Layout read_coords(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#nodes ", 0) != 0) throw FormatError("coords: missing '#nodes N' header");
  const auto n = detail::to_int(detail::trim(std::string_view(line).substr(7)));
  if (!n || *n < 0) throw FormatError("coords: invalid node count");
  Layout layout(static_cast<std::size_t>(*n));
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (!std::getline(in, line)) throw FormatError("coords: truncated file");
    std::istringstream row(line);
    if (!(row >> layout[i].x >> layout[i].y)) throw FormatError("coords: malformed line " + std::to_string(i + 2));
  }
  return layout;
}

// ---------------------------------------------------------------------------
// SVG

struct SvgStyle {
  double width = 1000.0;
  double height = 1000.0;
  double margin = 10.0;
  double node_radius = 1.5;
  double stroke_width = 0.5;
  std::size_t edge_sample_threshold = 600000;
};

struct Rgb {
  int r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Red (t=0) -> green (t=0.5) -> blue (t=1), linear in between.
inline Rgb edge_length_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto c = [](double v) { return static_cast<int>(std::lround(255.0 * v)); };
  if (t <= 0.5) return {c(1.0 - 2.0 * t), c(2.0 * t), 0};
  return {0, c(2.0 - 2.0 * t), c(2.0 * t - 1.0)};
}

inline std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

// Node-link drawing fitted to the canvas (aspect preserved). Edges are
// colored by length, shortest red, longest blue. Above the sampling
// threshold a seeded uniform subset of exactly `threshold` edges is drawn.
inline void write_svg(const Graph& g, const Layout& layout, const SvgStyle& style, std::uint64_t seed,
                      std::ostream& out) {
  if (layout.size() != g.node_count()) throw ArgumentError("layout does not cover the graph");
  auto edges = g.edges();
  if (edges.size() > style.edge_sample_threshold) {
    std::vector<Edge> kept;
    kept.reserve(style.edge_sample_threshold);
    std::mt19937_64 rng(seed);
    std::sample(edges.begin(), edges.end(), std::back_inserter(kept), style.edge_sample_threshold, rng);
    edges = std::move(kept);
  }

  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  if (layout.size() > 0) {
    xmin = xmax = layout[0].x;
    ymin = ymax = layout[0].y;
    for (auto p : layout.positions) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double usable = std::min(style.width, style.height) - 2.0 * style.margin;
  const double scale = span > 0.0 ? usable / span : 0.0;
  const double ox = style.margin + (style.width - 2.0 * style.margin - scale * (xmax - xmin)) / 2.0;
  const double oy = style.margin + (style.height - 2.0 * style.margin - scale * (ymax - ymin)) / 2.0;
  auto sx = [&](double x) { return ox + scale * (x - xmin); };
  auto sy = [&](double y) { return oy + scale * (ymax - y); };

  std::vector<double> lengths(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) lengths[e] = distance(layout[edges[e].first], layout[edges[e].second]);
  double lmin = 0.0, lmax = 0.0;
  if (!lengths.empty()) {
    auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
    lmin = *lo;
    lmax = *hi;
  }

  out << std::setprecision(2) << std::fixed;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
      << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<g stroke-width=\"" << style.stroke_width << "\">\n";
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double t = lmax > lmin ? (lengths[e] - lmin) / (lmax - lmin) : 0.0;
    const Point a = layout[edges[e].first], b = layout[edges[e].second];
    out << "<line x1=\"" << sx(a.x) << "\" y1=\"" << sy(a.y) << "\" x2=\"" << sx(b.x) << "\" y2=\"" << sy(b.y)
        << "\" stroke=\"" << to_hex(edge_length_color(t)) << "\"/>\n";
  }
  out << "</g>\n<g fill=\"black\">\n";
  for (auto p : layout.positions)
    out << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"" << style.node_radius << "\"/>\n";
  out << "</g>\n</svg>\n";
}

inline std::string svg_string(const Graph& g, const Layout& layout, const SvgStyle& style = {}, std::uint64_t seed = 1) {
  std::ostringstream out;
  write_svg(g, layout, style, seed, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Files

// Writes through a sibling temporary file and renames it into place, so
// `path` is either untouched or complete.
inline void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    try {
      body(out);
    } catch (...) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw;
    }
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

// ---------------------------------------------------------------------------
// Metrics report

inline void write_report_text(const MetricsReport& r, std::ostream& out) {
  auto opt = [&](const char* key, const auto& v) {
    out << key << " = ";
    if (v)
      out << *v;
    else
      out << "skipped";
    out << '\n';
  };
  out << std::setprecision(6) << std::defaultfloat;
  out << "np = " << r.np << '\n';
  opt("stress", r.stress);
  opt("alpha_star", r.alpha_star);
  opt("crossings", r.crossings);
  out << "c_max = " << r.c_max << '\n';
  opt("crosslessness", r.crosslessness);
  out << "min_angle = " << r.min_angle << '\n';
  out << "flags =";
  for (const auto& f : r.flags) out << ' ' << f;
  out << '\n';
}

inline nlohmann::json report_json(const MetricsReport& r) {
  auto opt = [](const auto& v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  return {{"np", r.np},
          {"stress", opt(r.stress)},
          {"alpha_star", opt(r.alpha_star)},
          {"crossings", opt(r.crossings)},
          {"c_max", r.c_max},
          {"crosslessness", opt(r.crosslessness)},
          {"min_angle", r.min_angle},
          {"flags", r.flags}};
}

}  // namespace drgraph
