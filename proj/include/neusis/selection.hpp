#pragma once

#include <string>
#include <vector>

#include "neusis/rng.hpp"
#include "neusis/scenario.hpp"

namespace neusis {

// Lawnmower-sweep lower bound: area / (speed * sweep_width).
double full_coverage_time(const Aoi& aoi, double speed, double sweep_width);

// Expected detections from spending t_alloc in the AOI: sum over EOIs of
// belief * coverage fraction * per-pass detection probability. Found EOIs
// are skipped when `found` is given.
double expected_gain(int aoi_index, double t_alloc, const BeliefMap& belief,
                     double p_detect_given_covered, double full_time,
                     const std::vector<bool>* found = nullptr);

struct SelectionAoi {
  std::string id;
  double area = 0.0;
  double full_coverage_time = 0.0;
  double gain_mass = 0.0;  // q * sum of unfound-EOI beliefs in this AOI
};

struct SelectionInstance {
  std::vector<SelectionAoi> aois;
  // (n+1) x (n+1); row/col 0 is the current UAV position, entry (i+1, j+1)
  // the visibility-graph travel time between AOI centroids i and j.
  // Unreachable pairs are +inf. Triangle inequality is not assumed.
  Eigen::MatrixXd travel;
  double budget = 0.0;
  double time_quantum = 10.0;
  double lambda = 1.0 / 300.0;  // travel-time weight in the objective
};

struct ItineraryLeg {
  int aoi_index = -1;
  std::string aoi_id;
  double allocated_time = 0.0;
};

struct ItineraryPlan {
  std::vector<ItineraryLeg> legs;
  double expected_gain = 0.0;
  double total_time = 0.0;  // travel + allocations
  double travel_time = 0.0;
  double objective = 0.0;  // expected_gain - lambda * travel_time
  bool infeasible = false;
};

enum class SelectionMode { optimal, greedy, random };

// Exact maximizer of sum(gain) - lambda * travel over AOI subsets, orderings
// and quantized allocations, subject to total_time <= budget. Ties break to
// fewer legs, then the lexicographically smaller AOI id sequence.
ItineraryPlan select_plan(const SelectionInstance& inst);

// Mode dispatch; `rng` is consumed only by the random baseline.
ItineraryPlan select_plan(const SelectionInstance& inst, SelectionMode mode,
                          Rng* rng = nullptr);

// Identical contract to select_plan on an instance rebuilt with the current
// position, remaining budget and updated beliefs.
ItineraryPlan replan(const SelectionInstance& inst, SelectionMode mode,
                     Rng* rng = nullptr);

}  // namespace neusis
