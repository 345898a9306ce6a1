#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "neusis/geometry.hpp"
#include "neusis/occupancy.hpp"

namespace neusis {

inline constexpr int kColorCount = 8;
inline constexpr int kTypeCount = 2;

enum class VehicleType : int { sedan = 0, suv = 1 };

// The fixed 8-color palette entities and descriptors draw from.
enum class Color : int {
  red = 0,
  blue = 1,
  green = 2,
  white = 3,
  black = 4,
  silver = 5,
  yellow = 6,
  orange = 7,
};

const char* to_string(VehicleType t);
const char* to_string(Color c);
std::optional<VehicleType> vehicle_type_from_string(const std::string& s);
std::optional<Color> color_from_string(const std::string& s);

struct EoiDescriptor {
  std::string id;
  VehicleType vehicle_type = VehicleType::sedan;
  Color color = Color::red;
};

struct Aoi {
  std::string id;
  Polygon2D boundary;
  // EOI id -> prior probability that the EOI is inside this AOI.
  std::map<std::string, double> priors;
};

struct Koz {
  std::string id;
  Polygon2D boundary;
};

struct GroundTruthEntity {
  std::string id;
  Vec3 position{0.0, 0.0, 0.0};
  VehicleType vehicle_type = VehicleType::sedan;
  Color color = Color::red;
  bool is_eoi = false;
};

struct StartPose {
  Vec3 position{0.0, 0.0, 40.0};
  double yaw = 0.0;
};

struct Scenario {
  std::string name;
  Rect2D map_extent;
  std::vector<Aoi> aois;
  std::vector<Koz> kozs;
  std::vector<EoiDescriptor> eois;
  std::vector<GroundTruthEntity> entities;
  OccupancyGrid occupancy;
  double time_budget = 300.0;
  StartPose uav_start;
  std::uint64_t seed = 0;
  // Optional [sensor] section payload, applied by the mission runner.
  std::map<std::string, std::string> sensor_overrides;

  int aoi_index(const std::string& id) const;
  int eoi_index(const std::string& id) const;
  const GroundTruthEntity* entity_for_eoi(const std::string& eoi_id) const;
  // First AOI (scenario order) containing the ground position, -1 if none.
  int aoi_containing(const Vec2& p) const;
};

struct Violation {
  std::string invariant;  // e.g. "eoi_outside_candidate_aois"
  std::string element;    // offending id
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_scenario(const Scenario& s);

// Per-EOI categorical distribution over AOIs plus an explicit "outside all
// AOIs" residual column. Rows always sum to 1.
class BeliefMap {
 public:
  BeliefMap() = default;
  static BeliefMap from_scenario(const Scenario& s);

  int eoi_count() const { return static_cast<int>(table_.rows()); }
  int aoi_count() const {
    return table_.cols() > 0 ? static_cast<int>(table_.cols()) - 1 : 0;
  }

  double prob(int eoi, int aoi) const { return table_(eoi, aoi); }
  double residual(int eoi) const { return table_(eoi, aoi_count()); }
  double row_sum(int eoi) const { return table_.row(eoi).sum(); }

  // Bayesian negative evidence: the EOI was not detected while fraction c of
  // the AOI was covered with per-pass detection probability q.
  void apply_negative_search(int eoi, int aoi, double coverage_fraction,
                             double p_detect_given_covered);

  // Bayesian positive evidence from a candidate track in `aoi` whose
  // attribute match probability is `likelihood`; `false_match_rate` is the
  // probability of such a track arising anywhere the EOI is not.
  void apply_positive_sighting(int eoi, int aoi, double likelihood,
                               double false_match_rate);

  // Hard evidence: the EOI was confirmed in `aoi` (-1 collapses onto the
  // residual, for confirmations outside every AOI).
  void collapse(int eoi, int aoi);

  const Eigen::MatrixXd& table() const { return table_; }

 private:
  void renormalize_row(int eoi);
  Eigen::MatrixXd table_;  // rows: EOIs, cols: AOIs + residual
};

}  // namespace neusis
