#include "neusis/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace neusis {

double travel_time(const Path& p, double speed) { return p.length / speed; }

namespace {

// Maximal-run rectangle decomposition of the occupied cells in one z layer.
std::vector<Polygon2D> layer_rectangles(const OccupancyGrid& occ, int iz) {
  std::vector<Polygon2D> out;
  if (occ.empty() || iz < 0 || iz >= occ.nz()) return out;
  const double cs = occ.cell_size();
  std::vector<std::uint8_t> used(
      static_cast<std::size_t>(occ.nx()) * occ.ny(), 0);
  auto used_at = [&](int ix, int iy) -> std::uint8_t& {
    return used[static_cast<std::size_t>(iy) * occ.nx() + ix];
  };
  for (int iy = 0; iy < occ.ny(); ++iy) {
    for (int ix = 0; ix < occ.nx(); ++ix) {
      if (!occ.occupied(ix, iy, iz) || used_at(ix, iy)) continue;
      int x1 = ix;
      while (x1 + 1 < occ.nx() && occ.occupied(x1 + 1, iy, iz) &&
             !used_at(x1 + 1, iy)) {
        ++x1;
      }
      int y1 = iy;
      for (bool grow = true; grow && y1 + 1 < occ.ny();) {
        for (int x = ix; x <= x1; ++x) {
          if (!occ.occupied(x, y1 + 1, iz) || used_at(x, y1 + 1)) {
            grow = false;
            break;
          }
        }
        if (grow) ++y1;
      }
      for (int y = iy; y <= y1; ++y) {
        for (int x = ix; x <= x1; ++x) used_at(x, y) = 1;
      }
      Polygon2D rect;
      const double x0w = occ.origin().x() + ix * cs;
      const double y0w = occ.origin().y() + iy * cs;
      const double x1w = occ.origin().x() + (x1 + 1) * cs;
      const double y1w = occ.origin().y() + (y1 + 1) * cs;
      rect.vertices = {Vec2(x0w, y0w), Vec2(x1w, y0w), Vec2(x1w, y1w),
                       Vec2(x0w, y1w)};
      out.push_back(std::move(rect));
    }
  }
  return out;
}

}  // namespace

std::vector<Polygon2D> inflate_obstacles(const std::vector<Koz>& kozs,
                                         const OccupancyGrid& occ,
                                         double altitude, double margin) {
  std::vector<Polygon2D> out;
  for (const auto& koz : kozs) {
    out.push_back(inflate_polygon(koz.boundary, margin));
  }
  if (!occ.empty()) {
    const int iz =
        static_cast<int>(std::floor(altitude / occ.cell_size()));
    for (const auto& rect : layer_rectangles(occ, iz)) {
      out.push_back(inflate_polygon(rect, margin));
    }
  }
  return out;
}

VisibilityGraph build_visibility_graph(const std::vector<Polygon2D>& obstacles,
                                       const std::vector<Vec2>& extra_nodes) {
  VisibilityGraph g;
  for (const auto& poly : obstacles) {
    for (const auto& v : poly.vertices) g.nodes.push_back(v);
  }
  for (const auto& p : extra_nodes) {
    if (point_in_any(p, obstacles)) {
      const auto projected = project_point_outside(p, obstacles);
      g.nodes.push_back(projected.value_or(p));
    } else {
      g.nodes.push_back(p);
    }
  }
  const int n = g.node_count();
  g.adjacency.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!segment_free(g.nodes[i], g.nodes[j], obstacles)) continue;
      const double len = (g.nodes[i] - g.nodes[j]).norm();
      g.adjacency[i].emplace_back(j, len);
      g.adjacency[j].emplace_back(i, len);
    }
  }
  return g;
}

Path astar(const VisibilityGraph& g, int start, int goal) {
  Path path;
  if (start < 0 || goal < 0 || start >= g.node_count() ||
      goal >= g.node_count()) {
    return path;
  }
  if (start == goal) {
    path.waypoints = {g.nodes[start]};
    path.length = 0.0;
    path.reachable = true;
    return path;
  }
  const int n = g.node_count();
  std::vector<double> g_cost(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<bool> closed(n, false);
  auto heuristic = [&](int i) { return (g.nodes[i] - g.nodes[goal]).norm(); };

  using Entry = std::tuple<double, double, int>;  // (f, h, node)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g_cost[start] = 0.0;
  open.emplace(heuristic(start), heuristic(start), start);

  while (!open.empty()) {
    const auto [f, h, node] = open.top();
    open.pop();
    if (closed[node]) continue;
    closed[node] = true;
    if (node == goal) break;
    for (const auto& [next, weight] : g.adjacency[node]) {
      if (closed[next]) continue;
      const double cand = g_cost[node] + weight;
      if (cand < g_cost[next]) {
        g_cost[next] = cand;
        parent[next] = node;
        const double nh = heuristic(next);
        open.emplace(cand + nh, nh, next);
      }
    }
  }

  if (!closed[goal]) return path;  // unreachable
  std::vector<int> chain;
  for (int cur = goal; cur != -1; cur = parent[cur]) chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());
  for (int idx : chain) path.waypoints.push_back(g.nodes[idx]);
  path.length = g_cost[goal];
  path.reachable = true;
  return path;
}

RoutePlanner::RoutePlanner(std::vector<Polygon2D> obstacles)
    : obstacles_(std::move(obstacles)) {
  for (const auto& poly : obstacles_) {
    for (const auto& v : poly.vertices) static_nodes_.push_back(v);
  }
  const int n = static_cast<int>(static_nodes_.size());
  static_adjacency_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!segment_free(static_nodes_[i], static_nodes_[j], obstacles_))
        continue;
      const double len = (static_nodes_[i] - static_nodes_[j]).norm();
      static_adjacency_[i].emplace_back(j, len);
      static_adjacency_[j].emplace_back(i, len);
    }
  }
}

std::optional<Vec2> RoutePlanner::sanitize(const Vec2& p) const {
  if (!point_in_any(p, obstacles_)) return p;
  return project_point_outside(p, obstacles_);
}

Path RoutePlanner::plan(const Vec2& start_in, const Vec2& goal_in) const {
  Path path;
  const auto start_opt = sanitize(start_in);
  const auto goal_opt = sanitize(goal_in);
  if (!start_opt || !goal_opt) return path;
  const Vec2 start = *start_opt;
  const Vec2 goal = *goal_opt;

  // Common case first: nothing in the way.
  if (segment_free(start, goal, obstacles_)) {
    path.waypoints = {start, goal};
    path.length = (goal - start).norm();
    path.reachable = true;
    return path;
  }

  VisibilityGraph g;
  g.nodes = static_nodes_;
  g.adjacency = static_adjacency_;
  const int si = g.node_count();
  g.nodes.push_back(start);
  g.adjacency.emplace_back();
  const int gi = g.node_count();
  g.nodes.push_back(goal);
  g.adjacency.emplace_back();
  for (int i = 0; i < si; ++i) {
    if (segment_free(g.nodes[i], start, obstacles_)) {
      const double len = (g.nodes[i] - start).norm();
      g.adjacency[i].emplace_back(si, len);
      g.adjacency[si].emplace_back(i, len);
    }
    if (segment_free(g.nodes[i], goal, obstacles_)) {
      const double len = (g.nodes[i] - goal).norm();
      g.adjacency[i].emplace_back(gi, len);
      g.adjacency[gi].emplace_back(i, len);
    }
  }
  return astar(g, si, gi);
}

double RoutePlanner::distance(const Vec2& start, const Vec2& goal) const {
  const Path p = plan(start, goal);
  return p.reachable ? p.length : std::numeric_limits<double>::infinity();
}

bool RoutePlanner::reachable(const Vec2& start, const Vec2& goal) const {
  return plan(start, goal).reachable;
}

}  // namespace neusis
