#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "odnet/errors.hpp"
#include "odnet/geodesy.hpp"

namespace odnet {

struct BoundingBox {
  double min_x = 0, min_y = 0, max_x = -1, max_y = -1;  // empty by default

  bool empty() const { return min_x > max_x || min_y > max_y; }

  void expand(double x, double y) {
    if (empty()) {
      min_x = max_x = x;
      min_y = max_y = y;
    } else {
      if (x < min_x) min_x = x;
      if (x > max_x) max_x = x;
      if (y < min_y) min_y = y;
      if (y > max_y) max_y = y;
    }
  }

  void expand(const BoundingBox& b) {
    if (b.empty()) return;
    expand(b.min_x, b.min_y);
    expand(b.max_x, b.max_y);
  }

  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

// Closed ring of vertices, first == last. Containment tests treat coordinates
// as planar (x = longitude, y = latitude).
using Ring = std::vector<GeoCoordinate>;

enum class PointLocation { outside, boundary, inside };

namespace geom {

inline bool on_segment(double px, double py, double x1, double y1, double x2, double y2) {
  const double cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1);
  if (cross != 0.0) return false;
  return px >= std::min(x1, x2) && px <= std::max(x1, x2) &&
         py >= std::min(y1, y2) && py <= std::max(y1, y2);
}

// Even-odd crossing test with explicit boundary detection.
inline PointLocation locate_in_ring(double x, double y, const Ring& ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = ring[i].longitude, yi = ring[i].latitude;
    const double xj = ring[j].longitude, yj = ring[j].latitude;
    if (on_segment(x, y, xi, yi, xj, yj)) return PointLocation::boundary;
    if ((yi > y) != (yj > y)) {
      const double x_cross = xi + (y - yi) * (xj - xi) / (yj - yi);
      if (x < x_cross) inside = !inside;
    }
  }
  return inside ? PointLocation::inside : PointLocation::outside;
}

inline int orientation(double ax, double ay, double bx, double by, double cx, double cy) {
  const double v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

// Proper crossing or collinear overlap between two segments. Segments that
// merely share an endpoint do not count.
inline bool segments_conflict(double ax, double ay, double bx, double by,
                              double cx, double cy, double dx, double dy) {
  const int o1 = orientation(ax, ay, bx, by, cx, cy);
  const int o2 = orientation(ax, ay, bx, by, dx, dy);
  const int o3 = orientation(cx, cy, dx, dy, ax, ay);
  const int o4 = orientation(cx, cy, dx, dy, bx, by);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // Collinear: conflict if the interiors overlap in 1-D.
    const double lo1 = std::min(ax, bx), hi1 = std::max(ax, bx);
    const double lo2 = std::min(cx, dx), hi2 = std::max(cx, dx);
    const double lo1y = std::min(ay, by), hi1y = std::max(ay, by);
    const double lo2y = std::min(cy, dy), hi2y = std::max(cy, dy);
    const bool overlap_x = std::min(hi1, hi2) > std::max(lo1, lo2);
    const bool overlap_y = std::min(hi1y, hi2y) > std::max(lo1y, lo2y);
    return overlap_x || overlap_y;
  }
  return false;
}

}  // namespace geom

// One exterior ring plus optional interior rings (holes).
struct PolygonGeom {
  Ring exterior;
  std::vector<Ring> holes;
  BoundingBox bbox;

  void compute_bbox() {
    bbox = BoundingBox{};
    for (const auto& v : exterior) bbox.expand(v.longitude, v.latitude);
  }

  PointLocation locate(double x, double y) const {
    if (!bbox.contains(x, y)) return PointLocation::outside;
    const PointLocation outer = geom::locate_in_ring(x, y, exterior);
    if (outer != PointLocation::inside) return outer;
    for (const auto& hole : holes) {
      const PointLocation h = geom::locate_in_ring(x, y, hole);
      if (h == PointLocation::boundary) return PointLocation::boundary;
      if (h == PointLocation::inside) return PointLocation::outside;
    }
    return PointLocation::inside;
  }
};

namespace geom {

inline void validate_ring(const Ring& ring, const std::string& context) {
  if (ring.size() < 4)
    fail(Errc::geometry_error, context + ": ring has fewer than 4 vertices");
  const auto& a = ring.front();
  const auto& b = ring.back();
  if (a.longitude != b.longitude || a.latitude != b.latitude)
    fail(Errc::geometry_error, context + ": ring is not closed (first vertex != last)");
}

// O(n^2) pairwise check over the distinct edges; zone polygons are small
// enough that this is cheap at load time.
inline void validate_simple(const Ring& ring, const std::string& context) {
  const std::size_t n = ring.size() - 1;  // distinct edges
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1) continue;
      if (i == 0 && j == n - 1) continue;  // first and last edge are adjacent
      if (segments_conflict(ring[i].longitude, ring[i].latitude,
                            ring[i + 1].longitude, ring[i + 1].latitude,
                            ring[j].longitude, ring[j].latitude,
                            ring[j + 1].longitude, ring[j + 1].latitude))
        fail(Errc::geometry_error,
             context + ": exterior ring self-intersects (edges " + std::to_string(i) + " and " +
                 std::to_string(j) + ")");
    }
  }
}

}  // namespace geom

} // namespace odnet
