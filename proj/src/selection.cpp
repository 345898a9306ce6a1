#include "neusis/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace neusis {

double full_coverage_time(const Aoi& aoi, double speed, double sweep_width) {
  if (speed <= 0.0 || sweep_width <= 0.0) {
    throw std::invalid_argument("full_coverage_time: speed and sweep_width must be > 0");
  }
  return area(aoi.boundary) / (speed * sweep_width);
}

double expected_gain(int aoi_index, double t_alloc, const BeliefMap& belief,
                     double p_detect_given_covered, double full_time,
                     const std::vector<bool>* found) {
  if (t_alloc <= 0.0) return 0.0;
  const double coverage =
      full_time <= 0.0 ? 1.0 : std::min(1.0, t_alloc / full_time);
  double mass = 0.0;
  for (int e = 0; e < belief.eoi_count(); ++e) {
    if (found != nullptr && (*found)[static_cast<std::size_t>(e)]) continue;
    mass += belief.prob(e, aoi_index);
  }
  return mass * coverage * p_detect_given_covered;
}

namespace {

double leg_gain(const SelectionAoi& aoi, double alloc) {
  if (alloc <= 0.0) return 0.0;
  if (aoi.full_coverage_time <= 0.0) return aoi.gain_mass;
  return aoi.gain_mass * std::min(1.0, alloc / aoi.full_coverage_time);
}

// Optimal allocation of quantized time to a fixed visit sequence: the gain is
// concave piecewise-linear per AOI, so greedy marginal water-filling on the
// quantum grid is exact. Every leg keeps at least one quantum.
struct Allocation {
  std::vector<double> alloc;
  double gain = 0.0;
};

Allocation water_fill(const SelectionInstance& inst,
                      const std::vector<int>& seq, double time_left) {
  const double q = inst.time_quantum;
  const std::size_t k = seq.size();
  Allocation result;
  result.alloc.assign(k, q);
  long long spare = static_cast<long long>(std::floor(time_left / q)) -
                    static_cast<long long>(k);
  auto marginal = [&](std::size_t i) {
    const auto& aoi = inst.aois[static_cast<std::size_t>(seq[i])];
    return leg_gain(aoi, result.alloc[i] + q) - leg_gain(aoi, result.alloc[i]);
  };
  while (spare > 0) {
    std::size_t best = 0;
    double best_marginal = -1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double m = marginal(i);
      if (m > best_marginal) {  // ties stay with the lowest leg index
        best_marginal = m;
        best = i;
      }
    }
    if (best_marginal <= 0.0) break;
    result.alloc[best] += q;
    --spare;
  }
  for (std::size_t i = 0; i < k; ++i) {
    result.gain += leg_gain(inst.aois[static_cast<std::size_t>(seq[i])],
                            result.alloc[i]);
  }
  return result;
}

ItineraryPlan make_plan(const SelectionInstance& inst,
                        const std::vector<int>& seq,
                        const std::vector<double>& alloc, double travel) {
  ItineraryPlan plan;
  plan.travel_time = travel;
  plan.total_time = travel;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    ItineraryLeg leg;
    leg.aoi_index = seq[i];
    leg.aoi_id = inst.aois[static_cast<std::size_t>(seq[i])].id;
    leg.allocated_time = alloc[i];
    plan.total_time += alloc[i];
    plan.expected_gain +=
        leg_gain(inst.aois[static_cast<std::size_t>(seq[i])], alloc[i]);
    plan.legs.push_back(std::move(leg));
  }
  plan.objective = plan.expected_gain - inst.lambda * travel;
  return plan;
}

// true if candidate beats incumbent under (objective, fewer legs, lex ids).
bool plan_better(const ItineraryPlan& candidate, const ItineraryPlan& incumbent) {
  if (candidate.objective != incumbent.objective) {
    return candidate.objective > incumbent.objective;
  }
  if (candidate.legs.size() != incumbent.legs.size()) {
    return candidate.legs.size() < incumbent.legs.size();
  }
  for (std::size_t i = 0; i < candidate.legs.size(); ++i) {
    if (candidate.legs[i].aoi_id != incumbent.legs[i].aoi_id) {
      return candidate.legs[i].aoi_id < incumbent.legs[i].aoi_id;
    }
  }
  return false;
}

ItineraryPlan solve_optimal(const SelectionInstance& inst) {
  const int n = static_cast<int>(inst.aois.size());
  if (n > 8) {
    throw std::invalid_argument("select_plan: exact solver handles at most 8 AOIs");
  }
  const double q = inst.time_quantum;

  ItineraryPlan best = make_plan(inst, {}, {}, 0.0);  // empty plan, objective 0

  std::vector<int> seq;
  std::vector<bool> used(static_cast<std::size_t>(n), false);

  // DFS over ordered subsets with a gain upper bound for pruning.
  const double total_mass = std::accumulate(
      inst.aois.begin(), inst.aois.end(), 0.0,
      [](double acc, const SelectionAoi& a) { return acc + a.gain_mass; });

  auto dfs = [&](auto&& self, double travel) -> void {
    if (!seq.empty()) {
      const double time_left = inst.budget - travel;
      if (time_left >= q * static_cast<double>(seq.size())) {
        const Allocation a = water_fill(inst, seq, time_left);
        ItineraryPlan plan = make_plan(inst, seq, a.alloc, travel);
        if (plan_better(plan, best)) best = plan;
      }
    }
    if (!seq.empty() && total_mass - inst.lambda * travel < best.objective) {
      // Even collecting every unit of belief cannot beat the incumbent.
      // (Strict: tie-equal branches still run so the leg-count tie-break
      // stays total.)
      return;
    }
    const int last = seq.empty() ? 0 : seq.back() + 1;
    for (int j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double hop = inst.travel(last, j + 1);
      if (!std::isfinite(hop)) continue;
      const double travel2 = travel + hop;
      const double min_alloc = q * static_cast<double>(seq.size() + 1);
      if (travel2 + min_alloc > inst.budget) continue;
      used[static_cast<std::size_t>(j)] = true;
      seq.push_back(j);
      self(self, travel2);
      seq.pop_back();
      used[static_cast<std::size_t>(j)] = false;
    }
  };
  dfs(dfs, 0.0);

  if (best.legs.empty() && n > 0) {
    // Flag the degenerate case where not even one AOI fits.
    bool any_fits = false;
    for (int j = 0; j < n; ++j) {
      if (std::isfinite(inst.travel(0, j + 1)) &&
          inst.travel(0, j + 1) + q <= inst.budget) {
        any_fits = true;
        break;
      }
    }
    best.infeasible = !any_fits;
  }
  return best;
}

// Quantized allocation for the non-optimal modes: enough quanta to cover the
// AOI fully, clipped to what the budget still allows.
double clipped_allocation(const SelectionInstance& inst, int aoi, double left) {
  const double q = inst.time_quantum;
  const double want =
      std::ceil(std::max(inst.aois[static_cast<std::size_t>(aoi)].full_coverage_time, q) / q) * q;
  const double can = std::floor(left / q) * q;
  return std::min(want, can);
}

ItineraryPlan solve_ordered(const SelectionInstance& inst,
                            const std::vector<int>& order) {
  std::vector<int> seq;
  std::vector<double> alloc;
  double travel = 0.0;
  double used_time = 0.0;
  int cur = 0;
  for (int j : order) {
    const double hop = inst.travel(cur, j + 1);
    if (!std::isfinite(hop)) continue;
    const double left = inst.budget - used_time - travel - hop;
    const double a = clipped_allocation(inst, j, left);
    if (a < inst.time_quantum) continue;
    travel += hop;
    used_time += a;
    seq.push_back(j);
    alloc.push_back(a);
    cur = j + 1;
  }
  ItineraryPlan plan = make_plan(inst, seq, alloc, travel);
  if (plan.legs.empty() && !inst.aois.empty()) {
    bool any_fits = false;
    for (std::size_t j = 0; j < inst.aois.size(); ++j) {
      if (std::isfinite(inst.travel(0, static_cast<int>(j) + 1)) &&
          inst.travel(0, static_cast<int>(j) + 1) + inst.time_quantum <=
              inst.budget) {
        any_fits = true;
        break;
      }
    }
    plan.infeasible = !any_fits;
  }
  return plan;
}

// Shared by the non-optimizing modes: walk `order`, take the largest prefix
// that fits with a quantum each, then split the remaining budget equally
// (clipped to each AOI's full sweep). No travel pricing, no water-filling.
ItineraryPlan solve_equal_split(const SelectionInstance& inst,
                                const std::vector<int>& order) {
  const double q = inst.time_quantum;
  std::vector<int> seq;
  std::vector<double> alloc;
  double travel = 0.0;
  {
    double walk_travel = 0.0;
    int cur = 0;
    for (int j : order) {
      const double hop = inst.travel(cur, j + 1);
      if (!std::isfinite(hop)) continue;
      const double needed =
          walk_travel + hop + q * static_cast<double>(seq.size() + 1);
      if (needed > inst.budget) break;
      walk_travel += hop;
      seq.push_back(j);
      cur = j + 1;
    }
    travel = walk_travel;
  }
  if (!seq.empty()) {
    const double share = (inst.budget - travel) / static_cast<double>(seq.size());
    for (int j : seq) {
      const double want =
          std::ceil(std::max(inst.aois[static_cast<std::size_t>(j)].full_coverage_time, q) / q) * q;
      const double drawn = std::floor(share / q) * q;
      alloc.push_back(std::min(want, std::max(drawn, q)));
    }
  }
  ItineraryPlan plan = make_plan(inst, seq, alloc, travel);
  if (plan.legs.empty() && !inst.aois.empty()) {
    bool any_fits = false;
    for (std::size_t j = 0; j < inst.aois.size(); ++j) {
      if (std::isfinite(inst.travel(0, static_cast<int>(j) + 1)) &&
          inst.travel(0, static_cast<int>(j) + 1) + q <= inst.budget) {
        any_fits = true;
        break;
      }
    }
    plan.infeasible = !any_fits;
  }
  return plan;
}

ItineraryPlan solve_greedy(const SelectionInstance& inst) {
  // Most-promising-first by belief mass alone.
  std::vector<int> order(inst.aois.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& A = inst.aois[static_cast<std::size_t>(a)];
    const auto& B = inst.aois[static_cast<std::size_t>(b)];
    if (A.gain_mass != B.gain_mass) return A.gain_mass > B.gain_mass;
    return A.id < B.id;
  });
  order.erase(std::remove_if(order.begin(), order.end(),
                             [&](int i) {
                               return inst.aois[static_cast<std::size_t>(i)]
                                          .gain_mass <= 0.0;
                             }),
              order.end());
  return solve_equal_split(inst, order);
}

ItineraryPlan solve_random(const SelectionInstance& inst, Rng* rng) {
  std::vector<int> order(inst.aois.size());
  std::iota(order.begin(), order.end(), 0);
  if (rng != nullptr) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      const int j = static_cast<int>(rng->uniform_index(
          static_cast<std::uint64_t>(i) + 1));
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(j)]);
    }
  }
  return solve_equal_split(inst, order);
}

}  // namespace

ItineraryPlan select_plan(const SelectionInstance& inst) {
  return solve_optimal(inst);
}

ItineraryPlan select_plan(const SelectionInstance& inst, SelectionMode mode,
                          Rng* rng) {
  switch (mode) {
    case SelectionMode::optimal:
      return solve_optimal(inst);
    case SelectionMode::greedy:
      return solve_greedy(inst);
    case SelectionMode::random:
      return solve_random(inst, rng);
  }
  return solve_optimal(inst);
}

ItineraryPlan replan(const SelectionInstance& inst, SelectionMode mode,
                     Rng* rng) {
  return select_plan(inst, mode, rng);
}

}  // namespace neusis
