#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "neusis/navigation.hpp"
#include "neusis/scenario.hpp"

namespace neusis {

enum class CoverageMode { snac, boustrophedon };
enum class CoverageOutcome { completed, time_expired, eois_found, preempted };

const char* to_string(CoverageOutcome o);

struct CoverageState {
  std::vector<Vec2> points;  // initial rasterization, reachable points only
  std::vector<bool> visited;
  int visited_count = 0;
  double grid_resolution = 20.0;
  double footprint_radius = 14.14;  // resolution / sqrt(2) by default
  double elapsed_in_aoi = 0.0;
  // Fixed serpentine visit order (west-to-east lanes) for the
  // boustrophedon baseline.
  std::vector<int> serpentine_order;
  std::size_t serpentine_cursor = 0;

  int open_count() const {
    return static_cast<int>(points.size()) - visited_count;
  }
  double fraction() const {
    return points.empty()
               ? 1.0
               : static_cast<double>(visited_count) /
                     static_cast<double>(points.size());
  }
  // Marks open points within footprint_radius of the ground position.
  void mark_visited_near(const Vec2& ground);
};

struct RasterizeResult {
  std::vector<Vec2> points;
  int excluded_unreachable = 0;
  bool fully_obstructed = false;
};

// Axis-aligned grid of spacing `resolution` clipped to the AOI (fencepost
// inclusive), minus points in inflated obstacles and points unreachable from
// `entry` over the visibility graph.
RasterizeResult rasterize_aoi(const Aoi& aoi, double resolution,
                              const RoutePlanner& planner, const Vec2& entry);

CoverageState make_coverage_state(const RasterizeResult& raster,
                                  double resolution);

// Open-set point minimizing visibility-graph distance from `current`
// (Euclidean prefilter, exact graph distance for the top 3); lexicographic
// (x, y) tie-break; nullopt when the open set is empty.
std::optional<Vec2> next_target(const CoverageState& state, const Vec2& current,
                                const RoutePlanner& planner);

struct CoverageHooks {
  // Called once per frame with the new ground position; returns false when
  // the mission budget is exhausted and the sweep must stop.
  std::function<bool(const Vec2&)> on_pose;
  std::function<bool()> all_eois_found;
  // Optional replan trigger (EOI confirmed mid-sweep).
  std::function<bool()> preempt;
};

struct CoverageResult {
  CoverageOutcome outcome = CoverageOutcome::completed;
  double coverage_fraction = 1.0;
};

struct MotionContext {
  Vec2 position{0.0, 0.0};
  double speed = 10.0;
  double frame_period = 0.5;
};

// Drives the sweep: pick target, A* to it, advance frame by frame, mark the
// footprint, until the open set empties, the allocation expires, the caller
// stops us, or every mission EOI is confirmed.
CoverageResult run_coverage(CoverageMode mode, double allocation,
                            CoverageState& state, const RoutePlanner& planner,
                            MotionContext& motion, const CoverageHooks& hooks);

}  // namespace neusis
