#include "neusis/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace neusis {

const char* to_string(CoverageOutcome o) {
  switch (o) {
    case CoverageOutcome::completed:
      return "completed";
    case CoverageOutcome::time_expired:
      return "time_expired";
    case CoverageOutcome::eois_found:
      return "eois_found";
    case CoverageOutcome::preempted:
      return "preempted";
  }
  return "unknown";
}

void CoverageState::mark_visited_near(const Vec2& ground) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (visited[i]) continue;
    if ((points[i] - ground).norm() <= footprint_radius) {
      visited[i] = true;
      ++visited_count;
    }
  }
}

RasterizeResult rasterize_aoi(const Aoi& aoi, double resolution,
                              const RoutePlanner& planner, const Vec2& entry) {
  RasterizeResult result;
  const Rect2D box = bounding_box(aoi.boundary);
  const double eps = 1e-6;
  std::vector<Vec2> candidates;
  for (double y = box.min.y(); y <= box.max.y() + eps; y += resolution) {
    for (double x = box.min.x(); x <= box.max.x() + eps; x += resolution) {
      const Vec2 p(x, y);
      if (!point_in_polygon(p, aoi.boundary, 1e-6)) continue;
      if (point_in_any(p, planner.obstacles())) continue;
      candidates.push_back(p);
    }
  }
  for (const auto& p : candidates) {
    if (planner.reachable(entry, p)) {
      result.points.push_back(p);
    } else {
      ++result.excluded_unreachable;
    }
  }
  result.fully_obstructed = result.points.empty();
  return result;
}

CoverageState make_coverage_state(const RasterizeResult& raster,
                                  double resolution) {
  CoverageState state;
  state.points = raster.points;
  state.visited.assign(state.points.size(), false);
  state.grid_resolution = resolution;
  state.footprint_radius = resolution / std::sqrt(2.0);

  // Serpentine order: lanes by ascending x, odd lanes flipped.
  if (!state.points.empty()) {
    double minx = state.points[0].x();
    double miny = state.points[0].y();
    for (const auto& p : state.points) {
      minx = std::min(minx, p.x());
      miny = std::min(miny, p.y());
    }
    std::vector<std::tuple<long long, double, int>> keyed;
    keyed.reserve(state.points.size());
    for (std::size_t i = 0; i < state.points.size(); ++i) {
      const auto& p = state.points[i];
      const long long lane =
          llround((p.x() - minx) / resolution);
      const double y_key = (lane % 2 == 0) ? p.y() : -p.y();
      keyed.emplace_back(lane, y_key, static_cast<int>(i));
    }
    std::sort(keyed.begin(), keyed.end());
    for (const auto& [lane, y, idx] : keyed) state.serpentine_order.push_back(idx);
  }
  return state;
}

std::optional<Vec2> next_target(const CoverageState& state, const Vec2& current,
                                const RoutePlanner& planner) {
  // Euclidean prefilter: best three open candidates.
  std::vector<std::pair<double, int>> nearest;
  for (std::size_t i = 0; i < state.points.size(); ++i) {
    if (state.visited[i]) continue;
    nearest.emplace_back((state.points[i] - current).norm(),
                         static_cast<int>(i));
  }
  if (nearest.empty()) return std::nullopt;
  const std::size_t keep = std::min<std::size_t>(3, nearest.size());
  std::partial_sort(
      nearest.begin(), nearest.begin() + static_cast<long>(keep), nearest.end(),
      [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        const Vec2& pa = state.points[static_cast<std::size_t>(a.second)];
        const Vec2& pb = state.points[static_cast<std::size_t>(b.second)];
        if (pa.x() != pb.x()) return pa.x() < pb.x();
        return pa.y() < pb.y();
      });

  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < keep; ++c) {
    const int idx = nearest[c].second;
    const Vec2& p = state.points[static_cast<std::size_t>(idx)];
    const double d = planner.distance(current, p);
    const Vec2 best_p =
        best >= 0 ? state.points[static_cast<std::size_t>(best)] : Vec2();
    const bool better =
        d < best_dist ||
        (d == best_dist && best >= 0 &&
         (p.x() < best_p.x() || (p.x() == best_p.x() && p.y() < best_p.y())));
    if (better) {
      best_dist = d;
      best = idx;
    }
  }
  if (best < 0 || !std::isfinite(best_dist)) return std::nullopt;
  return state.points[static_cast<std::size_t>(best)];
}

namespace {

std::optional<Vec2> next_serpentine(CoverageState& state) {
  while (state.serpentine_cursor < state.serpentine_order.size()) {
    const int idx = state.serpentine_order[state.serpentine_cursor];
    if (!state.visited[static_cast<std::size_t>(idx)]) {
      return state.points[static_cast<std::size_t>(idx)];
    }
    ++state.serpentine_cursor;
  }
  return std::nullopt;
}

Vec2 point_along(const std::vector<Vec2>& waypoints, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double seg = (waypoints[i + 1] - waypoints[i]).norm();
    if (acc + seg >= s || i + 2 == waypoints.size()) {
      const double t = seg <= 0.0 ? 0.0 : std::clamp((s - acc) / seg, 0.0, 1.0);
      return waypoints[i] + t * (waypoints[i + 1] - waypoints[i]);
    }
    acc += seg;
  }
  return waypoints.empty() ? Vec2(0.0, 0.0) : waypoints.back();
}

}  // namespace

CoverageResult run_coverage(CoverageMode mode, double allocation,
                            CoverageState& state, const RoutePlanner& planner,
                            MotionContext& motion, const CoverageHooks& hooks) {
  auto result = [&](CoverageOutcome outcome) {
    return CoverageResult{outcome, state.fraction()};
  };
  if (state.points.empty()) return result(CoverageOutcome::completed);

  const double step = motion.speed * motion.frame_period;
  for (;;) {
    if (hooks.all_eois_found && hooks.all_eois_found()) {
      return result(CoverageOutcome::eois_found);
    }
    std::optional<Vec2> target =
        mode == CoverageMode::boustrophedon
            ? next_serpentine(state)
            : next_target(state, motion.position, planner);
    if (!target) return result(CoverageOutcome::completed);

    const Path path = planner.plan(motion.position, *target);
    if (!path.reachable) {
      // Rasterization guarantees reachability; tolerate the impossible by
      // dropping the point instead of spinning.
      for (std::size_t i = 0; i < state.points.size(); ++i) {
        if (!state.visited[i] && (state.points[i] - *target).norm() < 1e-9) {
          state.visited[i] = true;
          ++state.visited_count;
        }
      }
      continue;
    }
    if (path.length < 1e-9) {
      state.mark_visited_near(motion.position);
      // The target itself must fall; the footprint always covers distance 0.
      continue;
    }

    double s = 0.0;
    while (s < path.length) {
      s = std::min(s + step, path.length);
      motion.position = point_along(path.waypoints, s);
      state.elapsed_in_aoi += motion.frame_period;
      const bool budget_ok = hooks.on_pose ? hooks.on_pose(motion.position) : true;
      if (!budget_ok) return result(CoverageOutcome::time_expired);
      state.mark_visited_near(motion.position);
      if (hooks.all_eois_found && hooks.all_eois_found()) {
        return result(CoverageOutcome::eois_found);
      }
      if (state.elapsed_in_aoi >= allocation - 1e-9) {
        return result(CoverageOutcome::time_expired);
      }
      if (hooks.preempt && hooks.preempt()) {
        return result(CoverageOutcome::preempted);
      }
    }
  }
}

}  // namespace neusis
