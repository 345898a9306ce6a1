#pragma once

#include <optional>
#include <vector>

#include "neusis/geometry.hpp"
#include "neusis/occupancy.hpp"
#include "neusis/scenario.hpp"

namespace neusis {

struct Path {
  std::vector<Vec2> waypoints;
  double length = 0.0;
  bool reachable = false;
};

double travel_time(const Path& p, double speed);

// KOZ polygons dilated by `margin` plus polygonized occupied-cell clusters at
// the flight altitude layer, also dilated.
std::vector<Polygon2D> inflate_obstacles(const std::vector<Koz>& kozs,
                                         const OccupancyGrid& occ,
                                         double altitude, double margin);

struct VisibilityGraph {
  std::vector<Vec2> nodes;
  // adjacency[i] = (neighbor index, edge length)
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  double inflation_margin = 0.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
};

// Nodes are all inflated-polygon vertices plus `extra_nodes`; an edge exists
// iff the connecting segment intersects no inflated obstacle interior.
// Extra nodes falling inside an obstacle are projected to the nearest
// exterior point (callers can detect this by comparing node positions).
VisibilityGraph build_visibility_graph(const std::vector<Polygon2D>& obstacles,
                                       const std::vector<Vec2>& extra_nodes);

// Minimum-length path between two graph nodes; Euclidean heuristic,
// deterministic (f, h, node id) tie-break. reachable=false when no path.
Path astar(const VisibilityGraph& g, int start, int goal);

// Per-scenario planner: static obstacle vertices and their mutual visibility
// are computed once; each query splices its endpoints in temporarily.
class RoutePlanner {
 public:
  explicit RoutePlanner(std::vector<Polygon2D> obstacles);

  // Endpoints inside obstacles are projected out first.
  Path plan(const Vec2& start, const Vec2& goal) const;
  double distance(const Vec2& start, const Vec2& goal) const;
  bool reachable(const Vec2& start, const Vec2& goal) const;

  // Moves p outside every obstacle if needed; nullopt when impossible.
  std::optional<Vec2> sanitize(const Vec2& p) const;
  const std::vector<Polygon2D>& obstacles() const { return obstacles_; }

 private:
  std::vector<Polygon2D> obstacles_;
  std::vector<Vec2> static_nodes_;
  std::vector<std::vector<std::pair<int, double>>> static_adjacency_;
};

}  // namespace neusis
