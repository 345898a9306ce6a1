#pragma once

#include <cstdint>
#include <stdexcept>

#include "neusis/scenario.hpp"

namespace neusis {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Counts/ranges for synthetic missions. Defaults are tuned so that covering
// every AOI comfortably exceeds the time budget: selection quality has to
// matter for the planner ablations to separate.
struct GeneratorConfig {
  double map_size = 500.0;
  int min_aois = 5;
  int max_aois = 6;
  int min_eois = 3;
  int max_eois = 4;
  int min_kozs = 4;
  int max_kozs = 6;
  int distractors = 3;      // full attribute matches outside all AOIs
  int ambient_cars = 8;     // non-matching cars anywhere
  int buildings = 14;       // occupancy boxes
  double min_aoi_side = 115.0;
  double max_aoi_side = 140.0;
  double min_koz_side = 40.0;
  double max_koz_side = 80.0;
  double prior_concentration = 4.0;  // Gamma shape for prior allocation
  double time_budget = 300.0;
  double occupancy_cell = 5.0;
  double occupancy_height = 50.0;
  int max_candidate_aois = 4;  // per EOI
  int placement_retries = 400;
};

// Deterministic function of (seed, cfg); the result always passes
// validate_scenario or a GenerationError is thrown (no silent relaxation).
Scenario generate_scenario(std::uint64_t seed, const GeneratorConfig& cfg);

}  // namespace neusis
