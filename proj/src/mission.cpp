#include "neusis/mission.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "neusis/rng.hpp"
#include "neusis/scenario_io.hpp"
#include "neusis/trace_io.hpp"

namespace neusis {

double derive_p_detect_given_covered(const SensorModel& m, double resolution,
                                     double speed) {
  const double frames_per_cell =
      std::max(1.0, resolution / std::max(speed, 1e-6) / m.frame_period);
  const double q = 1.0 - std::pow(1.0 - m.p_detect, frames_per_cell);
  return std::clamp(q, 0.0, 1.0);
}

namespace {

const char* to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::optimal:
      return "optimal";
    case SelectionMode::greedy:
      return "greedy";
    case SelectionMode::random:
      return "random";
  }
  return "optimal";
}

const char* to_string(CoverageMode m) {
  return m == CoverageMode::snac ? "snac" : "boustrophedon";
}

const char* to_string(AccumulationMode m) {
  switch (m) {
    case AccumulationMode::off:
      return "off";
    case AccumulationMode::naive:
      return "naive";
    case AccumulationMode::bayes:
      return "bayes";
  }
  return "bayes";
}

SensorModel resolve_sensor(const MissionConfig& cfg, const Scenario& s) {
  SensorModel m = SensorModel::preset("clear");
  // Scenario [sensor] section first, then CLI preset, then CLI overrides.
  auto scenario_preset = s.sensor_overrides.find("preset");
  if (scenario_preset != s.sensor_overrides.end()) {
    m = SensorModel::preset(scenario_preset->second);
  }
  for (const auto& [key, value] : s.sensor_overrides) {
    if (key != "preset") m.apply_override(key, value);
  }
  if (!cfg.sensor_preset.empty()) m = SensorModel::preset(cfg.sensor_preset);
  for (const auto& [key, value] : cfg.sensor_overrides) {
    m.apply_override(key, value);
  }
  if (!m.valid()) throw ConfigError("sensor model fails validation");
  return m;
}

class MissionRun {
 public:
  MissionRun(const MissionConfig& cfg, const Scenario& scenario)
      : cfg_(cfg),
        scenario_(scenario),
        sensor_(resolve_sensor(cfg, scenario)),
        world_(scenario, cfg.world_model),
        rng_(cfg.seed ^ 0x6e65757369735ULL) {
    obstacles_ = inflate_obstacles(scenario_.kozs, scenario_.occupancy,
                                   cfg_.altitude, cfg_.inflation_margin);
    planner_ = std::make_unique<RoutePlanner>(obstacles_);
    q_covered_ = derive_p_detect_given_covered(sensor_, cfg_.grid_resolution,
                                               cfg_.speed);
    lambda_ = cfg_.lambda >= 0.0 ? cfg_.lambda : 1.0 / scenario_.time_budget;
  }

  MissionTrace run() {
    const auto wall_start = std::chrono::steady_clock::now();
    init_trace();
    init_position();
    precompute_travel();

    unsearchable_.assign(scenario_.aois.size(), false);
    visited_.assign(scenario_.aois.size(), false);
    int idle_iterations = 0;
    while (t_ + sensor_.frame_period <= scenario_.time_budget + 1e-9) {
      const std::size_t frames_before = trace_.frames.size();
      const ItineraryPlan plan = make_plan();
      trace_.plans.push_back({t_, plan});
      if (plan.legs.empty()) {
        end_reason_ = plan.infeasible ? "infeasible" : "plan_exhausted";
        break;
      }
      execute_leg(plan.legs.front());
      if (end_reason_ == "eois_found" || end_reason_ == "budget_exhausted") {
        break;
      }
      if (trace_.frames.size() == frames_before) {
        if (++idle_iterations >
            static_cast<int>(scenario_.aois.size()) + 2) {
          throw MissionInvariantError(
              "mission loop made no progress; aborting");
        }
      } else {
        idle_iterations = 0;
      }
    }
    if (end_reason_.empty()) end_reason_ = "budget_exhausted";

    trace_.offline_reports = world_.offline_report(t_);
    trace_.end_time = t_;
    trace_.end_reason = end_reason_;
    trace_.wall_clock_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - wall_start)
            .count();
    if (!cfg_.out_path.empty()) save_trace(trace_, cfg_.out_path);
    return std::move(trace_);
  }

 private:
  void init_trace() {
    trace_.scenario_name = scenario_.name;
    trace_.label = cfg_.label;
    trace_.seed = cfg_.seed;
    trace_.time_budget = scenario_.time_budget;
    trace_.frame_period = sensor_.frame_period;
    for (const auto& eoi : scenario_.eois) {
      const auto* entity = scenario_.entity_for_eoi(eoi.id);
      if (entity != nullptr) trace_.gt_eois.emplace_back(eoi.id, entity->position);
    }
    for (const auto& koz : scenario_.kozs) trace_.raw_kozs.push_back(koz.boundary);

    auto& echo = trace_.config_echo;
    echo["selection"] = to_string(cfg_.selection);
    echo["coverage"] = to_string(cfg_.coverage);
    echo["accumulation"] = to_string(cfg_.world_model.accumulation);
    echo["sensor_preset"] =
        cfg_.sensor_preset.empty() ? std::string("scenario") : cfg_.sensor_preset;
    echo["report_threshold"] = format_double(cfg_.world_model.report_threshold);
    echo["gate_radius"] = format_double(cfg_.world_model.gate_radius);
    echo["lambda"] = format_double(lambda_);
    echo["time_quantum"] = format_double(cfg_.time_quantum);
    echo["altitude"] = format_double(cfg_.altitude);
    echo["speed"] = format_double(cfg_.speed);
    echo["inflation_margin"] = format_double(cfg_.inflation_margin);
    echo["grid_resolution"] = format_double(cfg_.grid_resolution);
    echo["seed"] = std::to_string(cfg_.seed);
  }

  void init_position() {
    const Vec2 raw(scenario_.uav_start.position.x(),
                   scenario_.uav_start.position.y());
    const auto safe = planner_->sanitize(raw);
    if (!safe) throw ConfigError("UAV start position cannot be moved clear of obstacles");
    if ((*safe - raw).norm() > 1e-9) {
      trace_.warnings.push_back("uav start projected out of an inflated obstacle");
    }
    position_ = *safe;
  }

  void precompute_travel() {
    const std::size_t n = scenario_.aois.size();
    centroids_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 c = centroid(scenario_.aois[i].boundary);
      centroids_[i] = planner_->sanitize(c).value_or(c);
      if ((centroids_[i] - c).norm() > 1e-9) {
        trace_.warnings.push_back("aoi " + scenario_.aois[i].id +
                                  " centroid projected out of an obstacle");
      }
    }
    pair_time_ = Eigen::MatrixXd::Zero(static_cast<int>(n), static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = planner_->distance(centroids_[i], centroids_[j]);
        pair_time_(static_cast<int>(i), static_cast<int>(j)) = d / cfg_.speed;
        pair_time_(static_cast<int>(j), static_cast<int>(i)) = d / cfg_.speed;
      }
    }
  }

  ItineraryPlan make_plan() {
    // The random baseline ignores beliefs entirely but does not revisit an
    // AOI it already swept; belief-driven modes revisit whenever the
    // remaining probability mass justifies the travel.
    std::vector<int> eligible;
    for (int i = 0; i < static_cast<int>(scenario_.aois.size()); ++i) {
      if (cfg_.selection == SelectionMode::random &&
          (visited_[static_cast<std::size_t>(i)] ||
           unsearchable_[static_cast<std::size_t>(i)])) {
        continue;
      }
      eligible.push_back(i);
    }

    SelectionInstance inst;
    const int n = static_cast<int>(eligible.size());
    inst.aois.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const int i = eligible[static_cast<std::size_t>(k)];
      auto& a = inst.aois[static_cast<std::size_t>(k)];
      a.id = scenario_.aois[static_cast<std::size_t>(i)].id;
      a.area = area(scenario_.aois[static_cast<std::size_t>(i)].boundary);
      a.full_coverage_time = cfg_.coverage_overhead *
                             full_coverage_time(
                                 scenario_.aois[static_cast<std::size_t>(i)],
                                 cfg_.speed, cfg_.grid_resolution);
      double mass = 0.0;
      if (!unsearchable_[static_cast<std::size_t>(i)]) {
        for (int e = 0; e < static_cast<int>(scenario_.eois.size()); ++e) {
          if (world_.eoi_found(e)) continue;
          mass += world_.belief().prob(e, i);
        }
      }
      a.gain_mass = q_covered_ * mass;
      // Sweeps persist across visits: only the unsearched remainder costs
      // time, and the belief mass is already conditioned on earlier misses.
      const auto mem = coverage_memory_.find(i);
      if (mem != coverage_memory_.end()) {
        a.full_coverage_time *= 1.0 - mem->second.fraction();
      }
    }
    inst.travel = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int k = 0; k < n; ++k) {
      const int i = eligible[static_cast<std::size_t>(k)];
      const double d = planner_->distance(position_, centroids_[static_cast<std::size_t>(i)]);
      inst.travel(0, k + 1) = d / cfg_.speed;
      inst.travel(k + 1, 0) = inst.travel(0, k + 1);
      for (int l = 0; l < n; ++l) {
        const int j = eligible[static_cast<std::size_t>(l)];
        if (i != j) inst.travel(k + 1, l + 1) = pair_time_(i, j);
      }
    }
    inst.budget = scenario_.time_budget - t_;
    inst.time_quantum = cfg_.time_quantum;
    inst.lambda = lambda_;
    return replan(inst, cfg_.selection, &rng_);
  }

  // One frame: advance time, sense, update the world model, log. Returns
  // false iff the budget has no room for another frame.
  bool emit_frame(const Vec2& ground) {
    if (t_ + sensor_.frame_period > scenario_.time_budget + 1e-9) return false;
    t_ += sensor_.frame_period;
    position_ = ground;
    Pose pose;
    pose.position = Vec3(ground.x(), ground.y(), cfg_.altitude);
    pose.yaw = scenario_.uav_start.yaw;
    pose.timestamp = t_;
    std::vector<Detection> dets = sense(pose, scenario_, sensor_, rng_);
    for (auto& d : dets) d.frame_id = static_cast<int>(trace_.frames.size());
    const auto reports = world_.process_frame(dets, t_);
    for (const auto& r : reports) {
      trace_.online_reports.push_back(r);
      if (trace_.first_report_time.find(r.eoi_id) ==
          trace_.first_report_time.end()) {
        trace_.first_report_time[r.eoi_id] = r.timestamp;
      }
    }
    TraceFrame frame;
    frame.t = t_;
    frame.position = pose.position;
    frame.yaw = pose.yaw;
    frame.detections = static_cast<int>(dets.size());
    frame.tracks = static_cast<int>(world_.tracks().size());
    trace_.frames.push_back(frame);
    return true;
  }

  // Flies a path frame by frame; false when the budget ran out mid-flight.
  bool fly_path(const Path& path) {
    const double step = cfg_.speed * sensor_.frame_period;
    double s = 0.0;
    while (s < path.length) {
      s = std::min(s + step, path.length);
      Vec2 p = path.waypoints.front();
      {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
          const double seg = (path.waypoints[i + 1] - path.waypoints[i]).norm();
          if (acc + seg >= s || i + 2 == path.waypoints.size()) {
            const double t = seg <= 0.0 ? 0.0 : std::clamp((s - acc) / seg, 0.0, 1.0);
            p = path.waypoints[i] + t * (path.waypoints[i + 1] - path.waypoints[i]);
            break;
          }
          acc += seg;
        }
      }
      if (!emit_frame(p)) return false;
      if (world_.all_eois_found()) return true;
    }
    return true;
  }

  void execute_leg(const ItineraryLeg& leg) {
    const int aoi_index = scenario_.aoi_index(leg.aoi_id);
    const auto& aoi = scenario_.aois[static_cast<std::size_t>(aoi_index)];

    // The sweep state for an AOI persists across visits: a revisit resumes
    // where the previous allocation expired instead of re-searching cells.
    auto mem = coverage_memory_.find(aoi_index);
    if (mem == coverage_memory_.end()) {
      RasterizeResult raster =
          rasterize_aoi(aoi, cfg_.grid_resolution, *planner_, position_);
      if (raster.excluded_unreachable > 0) {
        trace_.warnings.push_back(
            "aoi " + aoi.id + ": " + std::to_string(raster.excluded_unreachable) +
            " unreachable grid points excluded");
      }
      if (raster.fully_obstructed) {
        trace_.warnings.push_back("aoi " + aoi.id + " fully obstructed; skipped");
        unsearchable_[static_cast<std::size_t>(aoi_index)] = true;
        trace_.coverage_events.push_back(
            {t_, aoi.id, CoverageOutcome::completed, 1.0});
        world_.apply_negative_search(aoi_index, 1.0, q_covered_);
        return;
      }
      mem = coverage_memory_
                .emplace(aoi_index,
                         make_coverage_state(raster, cfg_.grid_resolution))
                .first;
    }
    CoverageState& state = mem->second;
    if (state.open_count() == 0) {
      // Every cell searched; a deliberate revisit starts a fresh pass.
      std::fill(state.visited.begin(), state.visited.end(), false);
      state.visited_count = 0;
    }

    const auto entry = next_target(state, position_, *planner_);
    if (!entry) {
      unsearchable_[static_cast<std::size_t>(aoi_index)] = true;
      return;
    }
    const Path transit = planner_->plan(position_, *entry);
    if (!transit.reachable) {
      trace_.warnings.push_back("aoi " + aoi.id + " unreachable; skipped");
      unsearchable_[static_cast<std::size_t>(aoi_index)] = true;
      return;
    }
    if (!fly_path(transit)) {
      end_reason_ = "budget_exhausted";
      return;
    }
    if (world_.all_eois_found()) {
      end_reason_ = "eois_found";
      return;
    }

    const double fraction_before = state.fraction();
    state.elapsed_in_aoi = 0.0;
    state.serpentine_cursor = 0;
    state.mark_visited_near(position_);
    MotionContext motion;
    motion.position = position_;
    motion.speed = cfg_.speed;
    motion.frame_period = sensor_.frame_period;

    const int found_at_start = world_.found_count();
    CoverageHooks hooks;
    hooks.on_pose = [this](const Vec2& p) { return emit_frame(p); };
    hooks.all_eois_found = [this]() { return world_.all_eois_found(); };
    if (cfg_.replan_on_eoi) {
      hooks.preempt = [this, found_at_start]() {
        return world_.found_count() > found_at_start;
      };
    }

    const CoverageResult result = run_coverage(
        cfg_.coverage, leg.allocated_time, state, *planner_, motion, hooks);
    position_ = motion.position;
    visited_[static_cast<std::size_t>(aoi_index)] = true;
    trace_.coverage_events.push_back(
        {t_, aoi.id, result.outcome, result.coverage_fraction});
    // Negative evidence covers only the cells newly searched this visit.
    world_.apply_negative_search(
        aoi_index, result.coverage_fraction - fraction_before, q_covered_);
    if (result.outcome == CoverageOutcome::eois_found) {
      end_reason_ = "eois_found";
    } else if (t_ + sensor_.frame_period > scenario_.time_budget + 1e-9) {
      end_reason_ = "budget_exhausted";
    }
  }

  const MissionConfig& cfg_;
  const Scenario& scenario_;
  SensorModel sensor_;
  WorldModel world_;
  Rng rng_;
  std::vector<Polygon2D> obstacles_;
  std::unique_ptr<RoutePlanner> planner_;
  std::vector<Vec2> centroids_;
  Eigen::MatrixXd pair_time_;
  std::vector<bool> unsearchable_;
  std::vector<bool> visited_;
  std::map<int, CoverageState> coverage_memory_;
  MissionTrace trace_;
  Vec2 position_{0.0, 0.0};
  double t_ = 0.0;
  double q_covered_ = 1.0;
  double lambda_ = 1.0 / 300.0;
  std::string end_reason_;
};

}  // namespace

MissionTrace run_mission(const MissionConfig& cfg, const Scenario& scenario) {
  MissionRun run(cfg, scenario);
  return run.run();
}

MissionTrace run_mission(const MissionConfig& cfg) {
  if (cfg.scenario_path.empty()) {
    throw ConfigError("mission config has no scenario path");
  }
  const Scenario scenario = load_scenario(cfg.scenario_path);
  return run_mission(cfg, scenario);
}

int batch_thread_cap() {
  const char* env = std::getenv("NEUSIS_SIM_THREADS");
  if (env != nullptr) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 4 : static_cast<int>(hw);
}

std::vector<BatchEntry> run_batch(
    const std::vector<std::pair<MissionConfig, Scenario>>& jobs) {
  std::vector<BatchEntry> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(
      1, std::min(batch_thread_cap(), static_cast<int>(jobs.size())));
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        results[i].trace = run_mission(jobs[i].first, jobs[i].second);
      } catch (const std::exception& ex) {
        results[i].error = ex.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return results;
}

}  // namespace neusis
