#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace neusis {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct Rect2D {
  Vec2 min{0.0, 0.0};
  Vec2 max{0.0, 0.0};

  bool contains(const Vec2& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() &&
           p.y() <= max.y();
  }
  double width() const { return max.x() - min.x(); }
  double height() const { return max.y() - min.y(); }
};

// Simple (non-self-intersecting) polygon, vertices in meters. Orientation is
// normalized to counter-clockwise by the builders that care.
struct Polygon2D {
  std::vector<Vec2> vertices;

  std::size_t size() const { return vertices.size(); }
  const Vec2& operator[](std::size_t i) const { return vertices[i]; }
};

double signed_area(const Polygon2D& poly);
double area(const Polygon2D& poly);
Vec2 centroid(const Polygon2D& poly);
Rect2D bounding_box(const Polygon2D& poly);
bool is_ccw(const Polygon2D& poly);
Polygon2D ensure_ccw(Polygon2D poly);

// Winding-number test; points on the boundary count as inside up to `eps`.
bool point_in_polygon(const Vec2& p, const Polygon2D& poly, double eps = 1e-9);

// Strictly interior: inside and farther than `eps` from the boundary.
bool point_strictly_inside(const Vec2& p, const Polygon2D& poly,
                           double eps = 1e-9);

double distance_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);
double distance_point_polygon_boundary(const Vec2& p, const Polygon2D& poly);

// Proper crossing: segment interiors intersect at a single point.
bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                                 const Vec2& d);

// True if segment ab passes through the interior of `poly`. Touching the
// boundary (sliding along an edge, grazing a vertex) does not count, which is
// exactly the visibility-graph notion of a free segment.
bool segment_intersects_polygon_interior(const Vec2& a, const Vec2& b,
                                         const Polygon2D& poly);

// Outward offset by `margin` with circumscribed arc joins at convex corners,
// so the result always contains the exact Euclidean dilation. Reflex corners
// get a bevel, which over-approximates; over-approximation is safe here (the
// polygons are keep-out regions).
Polygon2D inflate_polygon(const Polygon2D& poly, double margin);

// Nearest boundary point; second member is the outward unit direction at it.
std::pair<Vec2, Vec2> closest_boundary_point(const Vec2& p,
                                             const Polygon2D& poly);

// Moves p to just outside every polygon that contains it. Returns nullopt if
// a conflict-free location cannot be found in a few rounds.
std::optional<Vec2> project_point_outside(const Vec2& p,
                                          const std::vector<Polygon2D>& polys,
                                          double clearance = 1e-6);

inline bool point_in_any(const Vec2& p, const std::vector<Polygon2D>& polys,
                         double eps = 1e-9) {
  for (const auto& poly : polys) {
    if (point_in_polygon(p, poly, eps)) return true;
  }
  return false;
}

bool segment_free(const Vec2& a, const Vec2& b,
                  const std::vector<Polygon2D>& obstacles);

}  // namespace neusis
