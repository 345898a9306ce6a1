// Command-line front end: scenario generation, single missions, batches,
// trace evaluation and the ablation grids.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "neusis/metrics.hpp"
#include "neusis/mission.hpp"
#include "neusis/scenario_gen.hpp"
#include "neusis/scenario_io.hpp"
#include "neusis/trace_io.hpp"

namespace fs = std::filesystem;
using namespace neusis;

namespace {

struct MissionFlags {
  std::string scenario;
  std::string sensor_preset;
  std::string accumulation = "bayes";
  std::string selection = "optimal";
  std::string coverage = "snac";
  double report_threshold = 0.85;
  double gate_radius = 4.0;
  double lambda = -1.0;
  double time_quantum = 10.0;
  double altitude = 40.0;
  double speed = 10.0;
  double inflation_margin = 3.0;
  double grid_resolution = 20.0;
  bool replan_on_eoi = false;
  std::uint64_t seed = 1;
};

void add_mission_flags(CLI::App* cmd, MissionFlags& f, bool need_scenario) {
  auto* opt = cmd->add_option("--scenario", f.scenario, "scenario file path");
  if (need_scenario) opt->required();
  cmd->add_option("--sensor-preset", f.sensor_preset,
                  "clear|night|fog|perfect (default: scenario section)");
  cmd->add_option("--accumulation", f.accumulation, "off|naive|bayes");
  cmd->add_option("--selection", f.selection, "optimal|greedy|random");
  cmd->add_option("--coverage", f.coverage, "snac|boustrophedon");
  cmd->add_option("--report-threshold", f.report_threshold, "online report tau");
  cmd->add_option("--gate-radius", f.gate_radius, "association gate (m)");
  cmd->add_option("--lambda", f.lambda, "travel weight (<0: 1/budget)");
  cmd->add_option("--time-quantum", f.time_quantum, "allocation quantum (s)");
  cmd->add_option("--altitude", f.altitude, "flight altitude (m)");
  cmd->add_option("--speed", f.speed, "cruise speed (m/s)");
  cmd->add_option("--inflation-margin", f.inflation_margin, "obstacle margin (m)");
  cmd->add_option("--grid-resolution", f.grid_resolution, "coverage grid (m)");
  cmd->add_flag("--replan-on-eoi", f.replan_on_eoi,
                "cut the sweep short when an EOI is confirmed");
  cmd->add_option("--seed", f.seed, "mission seed");
}

MissionConfig to_config(const MissionFlags& f) {
  MissionConfig cfg;
  cfg.scenario_path = f.scenario;
  cfg.sensor_preset = f.sensor_preset;
  if (f.accumulation == "off") cfg.world_model.accumulation = AccumulationMode::off;
  else if (f.accumulation == "naive") cfg.world_model.accumulation = AccumulationMode::naive;
  else if (f.accumulation == "bayes") cfg.world_model.accumulation = AccumulationMode::bayes;
  else throw ConfigError("unknown accumulation mode: " + f.accumulation);
  if (f.selection == "optimal") cfg.selection = SelectionMode::optimal;
  else if (f.selection == "greedy") cfg.selection = SelectionMode::greedy;
  else if (f.selection == "random") cfg.selection = SelectionMode::random;
  else throw ConfigError("unknown selection mode: " + f.selection);
  if (f.coverage == "snac") cfg.coverage = CoverageMode::snac;
  else if (f.coverage == "boustrophedon") cfg.coverage = CoverageMode::boustrophedon;
  else throw ConfigError("unknown coverage mode: " + f.coverage);
  cfg.world_model.report_threshold = f.report_threshold;
  cfg.world_model.gate_radius = f.gate_radius;
  cfg.lambda = f.lambda;
  cfg.time_quantum = f.time_quantum;
  cfg.altitude = f.altitude;
  cfg.speed = f.speed;
  cfg.inflation_margin = f.inflation_margin;
  cfg.grid_resolution = f.grid_resolution;
  cfg.replan_on_eoi = f.replan_on_eoi;
  cfg.seed = f.seed;
  return cfg;
}

void print_mission_summary(const MissionTrace& trace) {
  std::cout << "mission " << trace.scenario_name << " seed " << trace.seed
            << ": " << trace.end_reason << " at t=" << trace.end_time << "s, "
            << trace.first_report_time.size() << "/" << trace.gt_eois.size()
            << " EOIs reported online, " << trace.frames.size() << " frames\n";
  std::cerr << "wall clock: " << trace.wall_clock_ms << " ms\n";
}

std::vector<MissionTrace> load_trace_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".trace") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<MissionTrace> traces;
  traces.reserve(files.size());
  for (const auto& f : files) traces.push_back(load_trace(f.string()));
  return traces;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

std::string eval_csv(const std::vector<MetricsSummary>& rows) {
  std::string csv = metrics_csv_header() + "\n";
  for (const auto& row : rows) csv += metrics_csv_row(row) + "\n";
  return csv;
}

// ---- ablate grids ----

struct AblateCell {
  std::string label;
  MissionConfig base;
};

std::vector<AblateCell> planner_grid() {
  // Table-4-shaped: increasingly capable planners under perfect perception.
  std::vector<AblateCell> cells(4);
  cells[0].label = "baseline-random-boustrophedon";
  cells[0].base.selection = SelectionMode::random;
  cells[0].base.coverage = CoverageMode::boustrophedon;
  cells[1].label = "greedy-selection";
  cells[1].base.selection = SelectionMode::greedy;
  cells[1].base.coverage = CoverageMode::boustrophedon;
  cells[2].label = "optimal-selection";
  cells[2].base.selection = SelectionMode::optimal;
  cells[2].base.coverage = CoverageMode::boustrophedon;
  cells[3].label = "full-snac-coverage";
  cells[3].base.selection = SelectionMode::optimal;
  cells[3].base.coverage = CoverageMode::snac;
  for (auto& cell : cells) {
    cell.base.sensor_preset = "perfect";
    // Light travel tax: under ground-truth perception every unit of belief
    // mass is reachable, so pruning positive-gain AOIs only costs recall.
    cell.base.lambda = 1.0 / 1500.0;
    cell.base.label = cell.label;
  }
  return cells;
}

std::vector<AblateCell> world_model_grid() {
  // Table-3-shaped: information accumulation under a degraded sensor.
  std::vector<AblateCell> cells(3);
  cells[0].label = "world-reasoning-only";
  cells[0].base.world_model.accumulation = AccumulationMode::off;
  cells[1].label = "naive-accumulation";
  cells[1].base.world_model.accumulation = AccumulationMode::naive;
  cells[2].label = "bayesian-filtering";
  cells[2].base.world_model.accumulation = AccumulationMode::bayes;
  for (auto& cell : cells) {
    cell.base.sensor_preset = "night";
    // tau and gate sized for the degraded sensor: the default 0.85/4m pair
    // starves every accumulation mode of reports and associations alike.
    cell.base.world_model.report_threshold = 0.6;
    cell.base.world_model.gate_radius = 12.0;
    cell.base.label = cell.label;
  }
  return cells;
}

struct GridResult {
  std::vector<MetricsSummary> rows;
};

GridResult run_grid(const std::vector<AblateCell>& cells, const fs::path& out,
                    int seeds, std::uint64_t seed_base, double radius,
                    bool reuse) {
  // Scenarios are shared across cells (paired comparison).
  std::vector<Scenario> scenarios;
  for (int i = 0; i < seeds; ++i) {
    scenarios.push_back(generate_scenario(seed_base + static_cast<std::uint64_t>(i),
                                          GeneratorConfig{}));
  }
  std::vector<std::pair<MissionConfig, Scenario>> jobs;
  std::vector<fs::path> job_paths;
  for (const auto& cell : cells) {
    const fs::path cell_dir = out / cell.label;
    fs::create_directories(cell_dir);
    for (int i = 0; i < seeds; ++i) {
      const fs::path trace_path =
          cell_dir / ("seed-" + std::to_string(seed_base + static_cast<std::uint64_t>(i)) + ".trace");
      if (reuse && fs::exists(trace_path)) continue;
      MissionConfig cfg = cell.base;
      cfg.seed = seed_base + static_cast<std::uint64_t>(i);
      cfg.out_path = trace_path.string();
      jobs.emplace_back(cfg, scenarios[static_cast<std::size_t>(i)]);
      job_paths.push_back(trace_path);
    }
  }
  const auto results = run_batch(jobs);
  int failures = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].error.empty()) {
      ++failures;
      std::cerr << "mission failed (" << job_paths[i].string()
                << "): " << results[i].error << "\n";
    }
  }
  if (failures > 0) {
    std::cerr << failures << " mission(s) failed; continuing with the rest\n";
  }

  GridResult grid;
  for (const auto& cell : cells) {
    std::vector<MissionTrace> traces;
    for (int i = 0; i < seeds; ++i) {
      const fs::path trace_path =
          out / cell.label /
          ("seed-" + std::to_string(seed_base + static_cast<std::uint64_t>(i)) + ".trace");
      if (fs::exists(trace_path)) traces.push_back(load_trace(trace_path.string()));
    }
    grid.rows.push_back(evaluate_traces(traces, radius, cell.label));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV search-mission simulator and planning stack"};
  app.require_subcommand(1);

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "generate a synthetic scenario");
  std::uint64_t gen_seed = 1;
  std::string gen_out = "scenario.scenario";
  bool gen_external_grid = false;
  GeneratorConfig gen_cfg;
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output scenario path");
  gen->add_flag("--occupancy-file", gen_external_grid,
                "write the grid as an external NSOG binary");
  gen->add_option("--aois-min", gen_cfg.min_aois);
  gen->add_option("--aois-max", gen_cfg.max_aois);
  gen->add_option("--eois-min", gen_cfg.min_eois);
  gen->add_option("--eois-max", gen_cfg.max_eois);
  gen->add_option("--kozs-min", gen_cfg.min_kozs);
  gen->add_option("--kozs-max", gen_cfg.max_kozs);
  gen->add_option("--distractors", gen_cfg.distractors);
  gen->add_option("--map-size", gen_cfg.map_size);
  gen->add_option("--time-budget", gen_cfg.time_budget);
  gen->add_option("--prior-concentration", gen_cfg.prior_concentration);

  // --- run ---
  auto* run = app.add_subcommand("run", "run a single mission");
  MissionFlags run_flags;
  std::string run_out = "mission.trace";
  add_mission_flags(run, run_flags, /*need_scenario=*/true);
  run->add_option("--out", run_out, "trace output path");

  // --- batch ---
  auto* batch = app.add_subcommand("batch", "run a mission sweep");
  MissionFlags batch_flags;
  int batch_count = 4;
  std::uint64_t batch_seed_base = 1;
  std::string batch_out_dir = "traces";
  bool batch_generate = false;
  add_mission_flags(batch, batch_flags, /*need_scenario=*/false);
  batch->add_option("--count", batch_count, "number of missions");
  batch->add_option("--seed-base", batch_seed_base, "mission seeds = base + index");
  batch->add_option("--out-dir", batch_out_dir, "trace output directory");
  batch->add_flag("--gen", batch_generate,
                  "generate a fresh scenario per mission (seed = base + index)");

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "compute metrics over stored traces");
  std::string eval_dir = "traces";
  double eval_radius = 5.0;
  std::string eval_csv_path;
  std::string eval_md_path;
  eval->add_option("--traces", eval_dir, "trace directory")->required();
  eval->add_option("--gt-radius", eval_radius, "match radius (m)");
  eval->add_option("--out-csv", eval_csv_path, "write CSV here");
  eval->add_option("--out-md", eval_md_path, "write markdown here");

  // --- ablate ---
  auto* ablate = app.add_subcommand(
      "ablate", "run the planner and world-model comparison grids");
  std::string ablate_out = "ablation";
  int ablate_seeds = 12;
  std::uint64_t ablate_seed_base = 1;
  std::string ablate_grid = "both";
  bool ablate_reuse = false;
  ablate->add_option("--out", ablate_out, "output directory");
  ablate->add_option("--seeds", ablate_seeds, "scenarios per cell");
  ablate->add_option("--seed-base", ablate_seed_base, "first scenario seed");
  ablate->add_option("--grid", ablate_grid, "planner|worldmodel|both");
  ablate->add_flag("--reuse-traces", ablate_reuse,
                   "recompute tables from existing traces");

  try {
    app.parse(argc, argv);

    if (gen->parsed()) {
      const Scenario s = generate_scenario(gen_seed, gen_cfg);
      save_scenario(s, gen_out, gen_external_grid);
      std::cout << "wrote " << gen_out << " (" << s.aois.size() << " AOIs, "
                << s.eois.size() << " EOIs, " << s.kozs.size() << " KOZs, "
                << s.entities.size() << " entities)\n";
      return 0;
    }

    if (run->parsed()) {
      MissionConfig cfg = to_config(run_flags);
      cfg.out_path = run_out;
      const MissionTrace trace = run_mission(cfg);
      print_mission_summary(trace);
      return 0;
    }

    if (batch->parsed()) {
      fs::create_directories(batch_out_dir);
      std::vector<std::pair<MissionConfig, Scenario>> jobs;
      for (int i = 0; i < batch_count; ++i) {
        MissionConfig cfg = to_config(batch_flags);
        cfg.seed = batch_seed_base + static_cast<std::uint64_t>(i);
        cfg.out_path = (fs::path(batch_out_dir) /
                        ("mission-" + std::to_string(cfg.seed) + ".trace"))
                           .string();
        Scenario scenario;
        if (batch_generate) {
          scenario = generate_scenario(cfg.seed, GeneratorConfig{});
        } else {
          if (batch_flags.scenario.empty()) {
            throw ConfigError("batch needs --scenario or --gen");
          }
          scenario = load_scenario(batch_flags.scenario);
        }
        jobs.emplace_back(std::move(cfg), std::move(scenario));
      }
      const auto results = run_batch(jobs);
      int ok = 0;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].trace) {
          ++ok;
        } else {
          std::cerr << "mission " << i << " failed: " << results[i].error << "\n";
        }
      }
      std::cout << ok << "/" << results.size() << " missions completed; traces in "
                << batch_out_dir << "\n";
      return ok == static_cast<int>(results.size()) ? 0 : 2;
    }

    if (eval->parsed()) {
      const auto traces = load_trace_dir(eval_dir);
      if (traces.empty()) throw ConfigError("no .trace files under " + eval_dir);
      std::map<std::string, std::vector<MissionTrace>> by_label;
      for (const auto& t : traces) by_label[t.label].push_back(t);
      std::vector<MetricsSummary> rows;
      for (const auto& [label, group] : by_label) {
        rows.push_back(evaluate_traces(group, eval_radius, label));
      }
      const std::string csv = eval_csv(rows);
      std::cout << csv;
      if (!eval_csv_path.empty()) write_text(eval_csv_path, csv);
      if (!eval_md_path.empty()) write_text(eval_md_path, metrics_markdown_table(rows));
      return 0;
    }

    if (ablate->parsed()) {
      fs::create_directories(ablate_out);
      if (ablate_grid != "planner" && ablate_grid != "worldmodel" &&
          ablate_grid != "both") {
        throw ConfigError("unknown grid: " + ablate_grid);
      }
      if (ablate_grid == "planner" || ablate_grid == "both") {
        const auto grid = run_grid(planner_grid(), fs::path(ablate_out) / "planner",
                                   ablate_seeds, ablate_seed_base,
                                   /*radius=*/25.0, ablate_reuse);
        write_text((fs::path(ablate_out) / "planner.csv").string(), eval_csv(grid.rows));
        write_text((fs::path(ablate_out) / "planner.md").string(),
                   metrics_markdown_table(grid.rows));
        std::cout << "planner grid (25 m radius):\n" << eval_csv(grid.rows);
      }
      if (ablate_grid == "worldmodel" || ablate_grid == "both") {
        const auto grid = run_grid(world_model_grid(),
                                   fs::path(ablate_out) / "worldmodel",
                                   ablate_seeds, ablate_seed_base,
                                   /*radius=*/5.0, ablate_reuse);
        write_text((fs::path(ablate_out) / "worldmodel.csv").string(), eval_csv(grid.rows));
        write_text((fs::path(ablate_out) / "worldmodel.md").string(),
                   metrics_markdown_table(grid.rows));
        std::cout << "world-model grid (5 m radius):\n" << eval_csv(grid.rows);
      }
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const MissionInvariantError& e) {
    std::cerr << "runtime invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
