#pragma once

#include <string>
#include <vector>

#include "neusis/scenario.hpp"
#include "neusis/sensor.hpp"

namespace neusis {

// Accumulated belief about one candidate object.
struct Track {
  int track_id = 0;
  Vec3 position_mean{0.0, 0.0, 0.0};
  double position_variance = 0.0;  // isotropic, m^2
  Eigen::Matrix<double, 8, 1> color_posterior;
  Eigen::Vector2d type_posterior;
  int n_observations = 0;
  double last_seen = 0.0;
  double best_single_confidence = 0.0;
  // Accumulators for the naive (arithmetic mean) mode.
  Vec3 naive_m2{0.0, 0.0, 0.0};
  Eigen::Matrix<double, 8, 1> color_likelihood_sum;
  Eigen::Vector2d type_likelihood_sum;
};

struct EoiReport {
  std::string eoi_id;
  Vec3 reported_position{0.0, 0.0, 0.0};
  double confidence = 0.0;
  double timestamp = 0.0;
  bool online = true;
};

enum class AccumulationMode { off, naive, bayes };

struct WorldModelParams {
  AccumulationMode accumulation = AccumulationMode::bayes;
  double report_threshold = 0.85;   // tau
  double gate_radius = 4.0;         // association gate, meters
  double h_max = 2.5;               // max height above local ground
  double positive_evidence_gate = 0.90;
  double false_match_rate = 0.01;
  double reposition_report_distance = 1.0;
  double prune_after_unseen = 30.0;
  double prune_confidence = 0.1;
};

// --- spec operations, free functions for direct testing ---

// Drops detections inside occupied voxels, implausibly high above the local
// ground, or outside the map. Order preserved; idempotent.
std::vector<Detection> filter_physical(const std::vector<Detection>& dets,
                                       const OccupancyGrid& occ,
                                       const Rect2D& map_extent,
                                       double h_max = 2.5);

// det index -> track index, or -1 for "spawn a new track". Greedy global
// nearest-neighbor within the gate; ties go to the lower track_id.
std::vector<int> associate(const std::vector<Detection>& dets,
                           const std::vector<Track>& tracks,
                           double gate_radius);

// Conjugate static-state Gaussian update (per axis, shared scalar variance).
void update_position_bayes(Track& t, const Vec3& z, double sigma_z);

// Running arithmetic mean; variance becomes the mean per-axis sample
// variance (reporting only).
void update_position_naive(Track& t, const Vec3& z);

// Pointwise Bayes on the categorical attribute posteriors; an all-zero
// product resets the posterior to the incoming likelihood.
void update_attributes(Track& t,
                       const Eigen::Matrix<double, 8, 1>& color_lik,
                       const Eigen::Vector2d& type_lik);

// P(track matches descriptor) = color * type * location factor, the latter
// being the belief of the AOI containing the track (residual if outside).
double match_confidence(const Track& t, const EoiDescriptor& e,
                        const BeliefMap& belief, const Scenario& s);

// Stateful store driven by the mission loop.
class WorldModel {
 public:
  WorldModel(const Scenario& scenario, WorldModelParams params);

  // Full per-frame pipeline: physical filter, association, accumulation,
  // positive belief evidence, pruning, online reporting. Returns the reports
  // emitted this frame.
  std::vector<EoiReport> process_frame(const std::vector<Detection>& dets,
                                       double t);

  std::vector<EoiReport> offline_report(double t) const;

  const std::vector<Track>& tracks() const { return tracks_; }
  const BeliefMap& belief() const { return belief_; }
  BeliefMap& belief() { return belief_; }
  bool eoi_found(int eoi_index) const { return found_[eoi_index]; }
  bool all_eois_found() const;
  int found_count() const;
  const WorldModelParams& params() const { return params_; }

  // Negative evidence fed back by the coverage module on AOI exit.
  void apply_negative_search(int aoi_index, double coverage_fraction,
                             double p_detect_given_covered);

 private:
  void apply_positive_evidence();
  std::vector<EoiReport> online_report(double t);

  const Scenario& scenario_;
  WorldModelParams params_;
  BeliefMap belief_;
  std::vector<Track> tracks_;
  std::vector<bool> found_;
  std::vector<Vec3> last_report_position_;
  std::vector<bool> has_reported_;
  int next_track_id_ = 1;
};

}  // namespace neusis
