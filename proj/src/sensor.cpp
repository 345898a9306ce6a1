#include "neusis/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace neusis {

Eigen::Matrix<double, 8, 8> uniform_offdiag_confusion8(double diag) {
  Eigen::Matrix<double, 8, 8> m;
  const double off = (1.0 - diag) / (kColorCount - 1);
  m.setConstant(off);
  m.diagonal().setConstant(diag);
  return m;
}

Eigen::Matrix2d uniform_offdiag_confusion2(double diag) {
  Eigen::Matrix2d m;
  m << diag, 1.0 - diag, 1.0 - diag, diag;
  return m;
}

SensorModel SensorModel::preset(const std::string& name) {
  SensorModel m;
  if (name == "perfect") {
    m.p_detect = 1.0;
    m.position_noise_sigma = 0.0;
    m.false_positive_rate = 0.0;
    m.attribute_noise = 0.0;
    m.color_confusion = Eigen::Matrix<double, 8, 8>::Identity();
    m.type_confusion = Eigen::Matrix2d::Identity();
  } else if (name == "clear") {
    m.p_detect = 0.85;
    m.position_noise_sigma = 1.5;
    m.false_positive_rate = 0.05;
    m.color_confusion = uniform_offdiag_confusion8(0.85);
    m.type_confusion = uniform_offdiag_confusion2(0.90);
  } else if (name == "night") {
    m.p_detect = 0.55;
    m.position_noise_sigma = 1.0;
    m.sigma_degraded = 4.0;
    m.degraded_prob = 0.5;
    m.false_positive_rate = 0.10;
    m.color_confusion = uniform_offdiag_confusion8(0.70);
    m.type_confusion = uniform_offdiag_confusion2(0.82);
  } else if (name == "fog") {
    m.max_range = 45.0;
    m.p_detect = 0.45;
    m.position_noise_sigma = 1.5;
    m.sigma_degraded = 5.0;
    m.degraded_prob = 0.5;
    m.false_positive_rate = 0.15;
    m.color_confusion = uniform_offdiag_confusion8(0.65);
    m.type_confusion = uniform_offdiag_confusion2(0.78);
  } else {
    throw std::runtime_error("unknown sensor preset: " + name);
  }
  return m;
}

void SensorModel::apply_override(const std::string& key,
                                 const std::string& value) {
  if (key == "preset") {
    *this = preset(value);
    return;
  }
  const double v = std::stod(value);
  if (key == "max_range") {
    max_range = v;
  } else if (key == "fov_half_angle") {
    fov_half_angle = v;
  } else if (key == "p_detect") {
    p_detect = v;
  } else if (key == "position_noise_sigma") {
    position_noise_sigma = v;
  } else if (key == "range_scaled_noise") {
    range_scaled_noise = v != 0.0;
  } else if (key == "sigma_degraded") {
    sigma_degraded = v;
  } else if (key == "degraded_prob") {
    degraded_prob = v;
  } else if (key == "attribute_noise") {
    attribute_noise = v;
  } else if (key == "false_positive_rate") {
    false_positive_rate = v;
  } else if (key == "frame_period") {
    frame_period = v;
  } else if (key == "color_diag") {
    color_confusion = uniform_offdiag_confusion8(v);
  } else if (key == "type_diag") {
    type_confusion = uniform_offdiag_confusion2(v);
  } else {
    throw std::runtime_error("unknown sensor key: " + key);
  }
}

bool SensorModel::valid() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_detect) || !prob(degraded_prob)) return false;
  if (position_noise_sigma < 0.0 || sigma_degraded < 0.0) return false;
  if (max_range <= 0.0 || fov_half_angle <= 0.0 || frame_period <= 0.0)
    return false;
  for (int r = 0; r < kColorCount; ++r) {
    if (std::abs(color_confusion.row(r).sum() - 1.0) > 1e-9) return false;
  }
  for (int r = 0; r < kTypeCount; ++r) {
    if (std::abs(type_confusion.row(r).sum() - 1.0) > 1e-9) return false;
  }
  return true;
}

double ground_footprint_radius(const Pose& pose, const SensorModel& m) {
  const double h = std::max(0.0, pose.position.z());
  const double by_fov = h * std::tan(m.fov_half_angle);
  const double by_range =
      m.max_range > h ? std::sqrt(m.max_range * m.max_range - h * h) : 0.0;
  return std::min(by_fov, by_range);
}

std::vector<int> visible_entities(const Pose& pose, const Scenario& s,
                                  const SensorModel& m) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.entities.size(); ++i) {
    const Vec3 d = s.entities[i].position - pose.position;
    const double range = d.norm();
    if (range > m.max_range || range < 1e-9) continue;
    // Angle off the straight-down axis.
    const double cos_down = -d.z() / range;
    if (cos_down < std::cos(m.fov_half_angle)) continue;
    if (!s.occupancy.line_of_sight(pose.position, s.entities[i].position))
      continue;
    out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

template <int N>
Eigen::Matrix<double, N, 1> perturbed_likelihood(
    const Eigen::Matrix<double, N, 1>& row, double noise, Rng& rng) {
  Eigen::Matrix<double, N, 1> lik;
  for (int i = 0; i < N; ++i) {
    lik[i] = row[i] <= 0.0 ? 0.0 : row[i] * std::exp(noise * rng.normal());
  }
  const double sum = lik.sum();
  if (sum <= 0.0) {
    lik.setConstant(1.0 / N);
  } else {
    lik /= sum;
  }
  return lik;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::vector<Detection> sense(const Pose& pose, const Scenario& s,
                             const SensorModel& m, Rng& rng) {
  std::vector<Detection> dets;
  const auto visible = visible_entities(pose, s, m);
  for (int idx : visible) {
    const auto& entity = s.entities[static_cast<std::size_t>(idx)];
    if (rng.uniform() >= m.p_detect) continue;
    double sigma = m.position_noise_sigma;
    if (m.degraded_prob > 0.0 && rng.uniform() < m.degraded_prob) {
      sigma = m.sigma_degraded;
    }
    if (m.range_scaled_noise) {
      const double range = (entity.position - pose.position).norm();
      sigma *= 1.0 + range / m.max_range;
    }
    Detection d;
    d.measured_position =
        entity.position + sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
    d.position_sigma = std::max(sigma, 0.01);
    d.color_likelihood = perturbed_likelihood<8>(
        m.color_confusion.row(static_cast<int>(entity.color)).transpose(),
        m.attribute_noise, rng);
    d.type_likelihood = perturbed_likelihood<2>(
        m.type_confusion.row(static_cast<int>(entity.vehicle_type)).transpose(),
        m.attribute_noise, rng);
    d.confidence = clamp01(0.85 + 0.08 * rng.normal());
    d.source_entity = entity.id;
    dets.push_back(std::move(d));
  }

  // Spurious detections, uniform over the visible free-ground footprint.
  const int n_fp = rng.poisson(m.false_positive_rate);
  const double footprint = ground_footprint_radius(pose, m);
  for (int k = 0; k < n_fp && footprint > 1e-6; ++k) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      const double r = footprint * std::sqrt(rng.uniform());
      const double theta = 2.0 * 3.14159265358979323846 * rng.uniform();
      const Vec2 ground(pose.position.x() + r * std::cos(theta),
                        pose.position.y() + r * std::sin(theta));
      if (!s.map_extent.contains(ground)) continue;
      if (s.occupancy.ground_height(ground.x(), ground.y()) > 0.0) continue;
      Detection d;
      d.measured_position = Vec3(ground.x(), ground.y(), 0.9);
      d.position_sigma = std::max(m.position_noise_sigma, 0.5);
      Eigen::Matrix<double, 8, 1> uniform8;
      uniform8.setConstant(1.0 / kColorCount);
      d.color_likelihood =
          perturbed_likelihood<8>(uniform8, std::max(m.attribute_noise, 0.3), rng);
      Eigen::Vector2d uniform2;
      uniform2.setConstant(0.5);
      d.type_likelihood =
          perturbed_likelihood<2>(uniform2, std::max(m.attribute_noise, 0.3), rng);
      d.confidence = clamp01(0.4 + 0.15 * rng.normal());
      dets.push_back(std::move(d));
      break;
    }
  }
  return dets;
}

}  // namespace neusis
