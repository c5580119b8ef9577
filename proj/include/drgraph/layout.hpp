#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace drgraph {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

// One 2D position per node.
struct Layout {
  std::vector<Point> positions;

  Layout() = default;
  explicit Layout(std::size_t n) : positions(n) {}
  explicit Layout(std::vector<Point> p) : positions(std::move(p)) {}

  std::size_t size() const noexcept { return positions.size(); }
  Point& operator[](std::size_t i) noexcept { return positions[i]; }
  const Point& operator[](std::size_t i) const noexcept { return positions[i]; }

  bool all_finite() const noexcept {
    return std::all_of(positions.begin(), positions.end(),
                       [](Point p) { return std::isfinite(p.x) && std::isfinite(p.y); });
  }

  // Largest distance from the centroid; 0 for empty or collapsed layouts.
  double radius() const noexcept {
    if (positions.empty()) return 0.0;
    Point c;
    for (auto p : positions) {
      c.x += p.x;
      c.y += p.y;
    }
    c.x /= static_cast<double>(positions.size());
    c.y /= static_cast<double>(positions.size());
    double r = 0.0;
    for (auto p : positions) r = std::max(r, distance(p, c));
    return r;
  }

  friend bool operator==(const Layout&, const Layout&) = default;
};

}  // namespace drgraph
