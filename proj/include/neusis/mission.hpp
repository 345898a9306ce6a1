#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "neusis/coverage.hpp"
#include "neusis/navigation.hpp"
#include "neusis/scenario.hpp"
#include "neusis/selection.hpp"
#include "neusis/sensor.hpp"
#include "neusis/world_model.hpp"

namespace neusis {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissionInvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissionConfig {
  std::string scenario_path;
  std::string label = "default";  // ablation cell tag, echoed into the trace
  std::string sensor_preset;      // empty -> scenario [sensor] / clear
  std::map<std::string, std::string> sensor_overrides;
  WorldModelParams world_model;
  SelectionMode selection = SelectionMode::optimal;
  CoverageMode coverage = CoverageMode::snac;
  double lambda = -1.0;  // < 0 -> 1 / time_budget
  double time_quantum = 10.0;
  double altitude = 40.0;
  double speed = 10.0;
  double inflation_margin = 3.0;
  double grid_resolution = 20.0;  // == sweep width
  // Planner-side sweep-time calibration: the lawnmower bound ignores lane
  // transits and KOZ detours, so allocations sized from it run short.
  double coverage_overhead = 1.20;
  bool replan_on_eoi = false;
  std::uint64_t seed = 0;
  std::string out_path;  // trace file; empty -> in-memory only
};

struct TraceFrame {
  double t = 0.0;
  Vec3 position{0.0, 0.0, 0.0};
  double yaw = 0.0;
  int detections = 0;
  int tracks = 0;
};

struct PlanEvent {
  double t = 0.0;
  ItineraryPlan plan;
};

struct CoverageEvent {
  double t = 0.0;
  std::string aoi_id;
  CoverageOutcome outcome = CoverageOutcome::completed;
  double fraction = 1.0;
};

struct MissionTrace {
  // Header: everything evaluation needs, so traces are self-contained.
  std::string scenario_name;
  std::string label;
  std::uint64_t seed = 0;
  double time_budget = 0.0;
  double frame_period = 0.5;
  std::vector<std::pair<std::string, Vec3>> gt_eois;
  std::vector<Polygon2D> raw_kozs;
  std::map<std::string, std::string> config_echo;

  std::vector<TraceFrame> frames;
  std::vector<PlanEvent> plans;
  std::vector<CoverageEvent> coverage_events;
  std::vector<EoiReport> online_reports;
  std::vector<EoiReport> offline_reports;
  std::vector<std::string> warnings;
  std::map<std::string, double> first_report_time;  // per EOI id
  double end_time = 0.0;
  std::string end_reason;
  double wall_clock_ms = 0.0;  // never serialized: traces stay byte-stable
};

MissionTrace run_mission(const MissionConfig& cfg);
MissionTrace run_mission(const MissionConfig& cfg, const Scenario& scenario);

struct BatchEntry {
  std::optional<MissionTrace> trace;
  std::string error;
};

// Embarrassingly parallel over missions; results in input order regardless
// of worker count. Parallelism capped by NEUSIS_SIM_THREADS.
std::vector<BatchEntry> run_batch(
    const std::vector<std::pair<MissionConfig, Scenario>>& jobs);

int batch_thread_cap();

// Effective per-pass detection probability for negative-evidence updates:
// 1 - (1 - p_detect)^(frames spent over one grid cell).
double derive_p_detect_given_covered(const SensorModel& m, double resolution,
                                     double speed);

}  // namespace neusis
