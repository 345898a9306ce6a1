#include "neusis/world_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace neusis {

std::vector<Detection> filter_physical(const std::vector<Detection>& dets,
                                       const OccupancyGrid& occ,
                                       const Rect2D& map_extent,
                                       double h_max) {
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (const auto& d : dets) {
    const Vec2 ground(d.measured_position.x(), d.measured_position.y());
    if (!map_extent.contains(ground)) continue;
    if (occ.occupied_at(d.measured_position)) continue;
    const double local_ground = occ.ground_height(ground.x(), ground.y());
    if (d.measured_position.z() - local_ground > h_max) continue;
    out.push_back(d);
  }
  return out;
}

std::vector<int> associate(const std::vector<Detection>& dets,
                           const std::vector<Track>& tracks,
                           double gate_radius) {
  std::vector<int> assignment(dets.size(), -1);
  // (distance, track_id, det index, track index), sorted ascending: global
  // greedy nearest-neighbor with a deterministic tie order.
  std::vector<std::tuple<double, int, std::size_t, std::size_t>> pairs;
  for (std::size_t di = 0; di < dets.size(); ++di) {
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
      const double dist =
          (dets[di].measured_position - tracks[ti].position_mean).norm();
      if (dist <= gate_radius) {
        pairs.emplace_back(dist, tracks[ti].track_id, di, ti);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> det_used(dets.size(), false);
  std::vector<bool> track_used(tracks.size(), false);
  for (const auto& [dist, tid, di, ti] : pairs) {
    if (det_used[di] || track_used[ti]) continue;
    assignment[di] = static_cast<int>(ti);
    det_used[di] = true;
    track_used[ti] = true;
  }
  return assignment;
}

void update_position_bayes(Track& t, const Vec3& z, double sigma_z) {
  const double var_z = sigma_z * sigma_z;
  const double var_t = t.position_variance;
  t.position_mean = (var_z * t.position_mean + var_t * z) / (var_t + var_z);
  t.position_variance = var_t * var_z / (var_t + var_z);
  ++t.n_observations;
}

void update_position_naive(Track& t, const Vec3& z) {
  ++t.n_observations;
  const double n = static_cast<double>(t.n_observations);
  const Vec3 delta = z - t.position_mean;
  t.position_mean += delta / n;
  t.naive_m2 += delta.cwiseProduct(z - t.position_mean);
  t.position_variance =
      t.n_observations > 1 ? t.naive_m2.sum() / (3.0 * (n - 1.0)) : 0.0;
}

void update_attributes(Track& t,
                       const Eigen::Matrix<double, 8, 1>& color_lik,
                       const Eigen::Vector2d& type_lik) {
  Eigen::Matrix<double, 8, 1> color = t.color_posterior.cwiseProduct(color_lik);
  if (color.sum() <= 0.0) {
    color = color_lik;  // stale prior contradicted outright; restart from data
  }
  t.color_posterior = color / color.sum();

  Eigen::Vector2d type = t.type_posterior.cwiseProduct(type_lik);
  if (type.sum() <= 0.0) {
    type = type_lik;
  }
  t.type_posterior = type / type.sum();
}

double match_confidence(const Track& t, const EoiDescriptor& e,
                        const BeliefMap& belief, const Scenario& s) {
  const int eoi = s.eoi_index(e.id);
  if (eoi < 0) return 0.0;
  const Vec2 ground(t.position_mean.x(), t.position_mean.y());
  const int aoi = s.aoi_containing(ground);
  const double location_factor =
      aoi >= 0 ? belief.prob(eoi, aoi) : belief.residual(eoi);
  return t.color_posterior[static_cast<int>(e.color)] *
         t.type_posterior[static_cast<int>(e.vehicle_type)] * location_factor;
}

WorldModel::WorldModel(const Scenario& scenario, WorldModelParams params)
    : scenario_(scenario),
      params_(params),
      belief_(BeliefMap::from_scenario(scenario)),
      found_(scenario.eois.size(), false),
      last_report_position_(scenario.eois.size(), Vec3::Zero()),
      has_reported_(scenario.eois.size(), false) {}

bool WorldModel::all_eois_found() const {
  return std::all_of(found_.begin(), found_.end(), [](bool f) { return f; });
}

int WorldModel::found_count() const {
  return static_cast<int>(std::count(found_.begin(), found_.end(), true));
}

std::vector<EoiReport> WorldModel::process_frame(
    const std::vector<Detection>& dets, double t) {
  const auto filtered =
      filter_physical(dets, scenario_.occupancy, scenario_.map_extent,
                      params_.h_max);
  const auto assignment = associate(filtered, tracks_, params_.gate_radius);

  for (std::size_t di = 0; di < filtered.size(); ++di) {
    const Detection& d = filtered[di];
    Track* track = nullptr;
    if (assignment[di] >= 0) {
      track = &tracks_[static_cast<std::size_t>(assignment[di])];
    } else {
      Track fresh;
      fresh.track_id = next_track_id_++;
      fresh.position_mean = d.measured_position;
      fresh.position_variance = d.position_sigma * d.position_sigma;
      fresh.color_posterior = d.color_likelihood;
      fresh.type_posterior = d.type_likelihood;
      fresh.n_observations = 1;
      fresh.color_likelihood_sum = d.color_likelihood;
      fresh.type_likelihood_sum = d.type_likelihood;
      fresh.last_seen = t;
      fresh.best_single_confidence = d.confidence;
      tracks_.push_back(std::move(fresh));
      continue;
    }

    switch (params_.accumulation) {
      case AccumulationMode::off:
        // No accumulation: the track mirrors the latest observation.
        track->position_mean = d.measured_position;
        track->position_variance = d.position_sigma * d.position_sigma;
        track->color_posterior = d.color_likelihood;
        track->type_posterior = d.type_likelihood;
        ++track->n_observations;
        break;
      case AccumulationMode::naive:
        update_position_naive(*track, d.measured_position);
        track->color_likelihood_sum += d.color_likelihood;
        track->type_likelihood_sum += d.type_likelihood;
        track->color_posterior =
            track->color_likelihood_sum / track->color_likelihood_sum.sum();
        track->type_posterior =
            track->type_likelihood_sum / track->type_likelihood_sum.sum();
        break;
      case AccumulationMode::bayes:
        update_position_bayes(*track, d.measured_position, d.position_sigma);
        update_attributes(*track, d.color_likelihood, d.type_likelihood);
        break;
    }
    track->last_seen = t;
    track->best_single_confidence =
        std::max(track->best_single_confidence, d.confidence);
  }

  apply_positive_evidence();

  // Prune stale one-off candidates that match nothing.
  std::vector<Track> kept;
  kept.reserve(tracks_.size());
  for (const auto& track : tracks_) {
    bool prune = false;
    if (track.n_observations == 1 &&
        t - track.last_seen > params_.prune_after_unseen) {
      double best = 0.0;
      for (const auto& eoi : scenario_.eois) {
        best = std::max(best, match_confidence(track, eoi, belief_, scenario_));
      }
      prune = best < params_.prune_confidence;
    }
    if (!prune) kept.push_back(track);
  }
  tracks_.swap(kept);

  return online_report(t);
}

void WorldModel::apply_positive_evidence() {
  // A track whose attributes match a descriptor nearly certainly, sitting in
  // a candidate AOI, is strong evidence the EOI is in that AOI.
  for (std::size_t e = 0; e < scenario_.eois.size(); ++e) {
    if (found_[e]) continue;
    const auto& desc = scenario_.eois[e];
    double best_q = 0.0;
    int best_aoi = -1;
    for (const auto& track : tracks_) {
      const Vec2 ground(track.position_mean.x(), track.position_mean.y());
      const int aoi = scenario_.aoi_containing(ground);
      if (aoi < 0 || belief_.prob(static_cast<int>(e), aoi) <= 0.0) continue;
      const double q = track.color_posterior[static_cast<int>(desc.color)] *
                       track.type_posterior[static_cast<int>(desc.vehicle_type)];
      if (q > best_q) {
        best_q = q;
        best_aoi = aoi;
      }
    }
    if (best_aoi >= 0 && best_q >= params_.positive_evidence_gate) {
      belief_.apply_positive_sighting(static_cast<int>(e), best_aoi, best_q,
                                      params_.false_match_rate);
    }
  }
}

std::vector<EoiReport> WorldModel::online_report(double t) {
  std::vector<EoiReport> reports;
  for (std::size_t e = 0; e < scenario_.eois.size(); ++e) {
    const auto& desc = scenario_.eois[e];
    const Track* best = nullptr;
    double best_conf = 0.0;
    for (const auto& track : tracks_) {
      const double conf = match_confidence(track, desc, belief_, scenario_);
      if (conf >= params_.report_threshold &&
          (best == nullptr || conf > best_conf)) {
        best = &track;
        best_conf = conf;
      }
    }
    if (best == nullptr) continue;
    if (has_reported_[e] &&
        (best->position_mean - last_report_position_[e]).norm() <=
            params_.reposition_report_distance) {
      continue;  // same claim at effectively the same position
    }
    EoiReport report;
    report.eoi_id = desc.id;
    report.reported_position = best->position_mean;
    report.confidence = best_conf;
    report.timestamp = t;
    report.online = true;
    reports.push_back(report);
    has_reported_[e] = true;
    last_report_position_[e] = best->position_mean;

    if (!found_[e]) {
      found_[e] = true;
      const int aoi = scenario_.aoi_containing(
          Vec2(best->position_mean.x(), best->position_mean.y()));
      belief_.collapse(static_cast<int>(e), aoi);
    }
  }
  return reports;
}

std::vector<EoiReport> WorldModel::offline_report(double t) const {
  std::vector<EoiReport> reports;
  for (const auto& desc : scenario_.eois) {
    const Track* best = nullptr;
    double best_conf = -1.0;
    for (const auto& track : tracks_) {
      const double conf = match_confidence(track, desc, belief_, scenario_);
      if (conf > best_conf) {
        best = &track;
        best_conf = conf;
      }
    }
    if (best == nullptr) continue;  // no tracks at all
    EoiReport report;
    report.eoi_id = desc.id;
    report.reported_position = best->position_mean;
    report.confidence = std::max(0.0, best_conf);
    report.timestamp = t;
    report.online = false;
    reports.push_back(report);
  }
  return reports;
}

void WorldModel::apply_negative_search(int aoi_index, double coverage_fraction,
                                       double p_detect_given_covered) {
  for (std::size_t e = 0; e < scenario_.eois.size(); ++e) {
    if (found_[e]) continue;
    belief_.apply_negative_search(static_cast<int>(e), aoi_index,
                                  coverage_fraction, p_detect_given_covered);
  }
}

}  // namespace neusis
