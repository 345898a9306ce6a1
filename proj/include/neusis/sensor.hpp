#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neusis/rng.hpp"
#include "neusis/scenario.hpp"

namespace neusis {

struct Pose {
  Vec3 position{0.0, 0.0, 0.0};
  double yaw = 0.0;
  double timestamp = 0.0;
};

// Parameterizes the synthetic perception stand-in. Presets `clear`, `night`
// and `fog` emulate increasingly degraded conditions; `perfect` is the
// ground-truth-perception configuration used by the planner ablations.
struct SensorModel {
  double max_range = 60.0;
  double fov_half_angle = 0.35;  // downward-looking cone, radians
  double p_detect = 0.85;
  double position_noise_sigma = 1.5;
  bool range_scaled_noise = false;
  // Optional two-component noise mixture: with probability degraded_prob a
  // detection is drawn at sigma_degraded instead. Gives per-frame sigma
  // heterogeneity without touching the rest of the model.
  double sigma_degraded = 0.0;
  double degraded_prob = 0.0;
  double attribute_noise = 0.5;  // log-normal perturbation scale
  Eigen::Matrix<double, 8, 8> color_confusion =
      Eigen::Matrix<double, 8, 8>::Identity();
  Eigen::Matrix2d type_confusion = Eigen::Matrix2d::Identity();
  double false_positive_rate = 0.05;  // expected spurious detections / frame
  double frame_period = 0.5;

  static SensorModel preset(const std::string& name);  // throws on unknown
  // Applies `key = value` overrides (scenario [sensor] section / CLI).
  void apply_override(const std::string& key, const std::string& value);
  bool valid() const;
};

Eigen::Matrix<double, 8, 8> uniform_offdiag_confusion8(double diag);
Eigen::Matrix2d uniform_offdiag_confusion2(double diag);

struct Detection {
  int frame_id = 0;
  Vec3 measured_position{0.0, 0.0, 0.0};
  double position_sigma = 1.0;
  Eigen::Matrix<double, 8, 1> color_likelihood;
  Eigen::Vector2d type_likelihood;
  double confidence = 0.0;
  // Simulator bookkeeping only; the world model never reads it.
  std::optional<std::string> source_entity;
};

// Entities within range and FOV cone whose line of sight is not blocked by
// occupied voxels. Returns indices into s.entities, ascending.
std::vector<int> visible_entities(const Pose& pose, const Scenario& s,
                                  const SensorModel& m);

// One sensor frame: per-entity detections plus Poisson false positives, all
// randomness drawn from `rng` in entity order.
std::vector<Detection> sense(const Pose& pose, const Scenario& s,
                             const SensorModel& m, Rng& rng);

// Radius of the visible ground disc below the pose (FOV and range limited).
double ground_footprint_radius(const Pose& pose, const SensorModel& m);

}  // namespace neusis
