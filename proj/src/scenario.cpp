#include "neusis/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace neusis {

namespace {
const char* kTypeNames[kTypeCount] = {"sedan", "suv"};
const char* kColorNames[kColorCount] = {"red",    "blue",   "green",
                                        "white",  "black",  "silver",
                                        "yellow", "orange"};
}  // namespace

const char* to_string(VehicleType t) { return kTypeNames[static_cast<int>(t)]; }
const char* to_string(Color c) { return kColorNames[static_cast<int>(c)]; }

std::optional<VehicleType> vehicle_type_from_string(const std::string& s) {
  for (int i = 0; i < kTypeCount; ++i) {
    if (s == kTypeNames[i]) return static_cast<VehicleType>(i);
  }
  return std::nullopt;
}

std::optional<Color> color_from_string(const std::string& s) {
  for (int i = 0; i < kColorCount; ++i) {
    if (s == kColorNames[i]) return static_cast<Color>(i);
  }
  return std::nullopt;
}

int Scenario::aoi_index(const std::string& id) const {
  for (std::size_t i = 0; i < aois.size(); ++i) {
    if (aois[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int Scenario::eoi_index(const std::string& id) const {
  for (std::size_t i = 0; i < eois.size(); ++i) {
    if (eois[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

const GroundTruthEntity* Scenario::entity_for_eoi(
    const std::string& eoi_id) const {
  for (const auto& e : entities) {
    if (e.is_eoi && e.id == eoi_id) return &e;
  }
  return nullptr;
}

int Scenario::aoi_containing(const Vec2& p) const {
  for (std::size_t i = 0; i < aois.size(); ++i) {
    if (point_in_polygon(p, aois[i].boundary)) return static_cast<int>(i);
  }
  return -1;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.invariant << " (" << v.element << ")";
    if (!v.detail.empty()) os << ": " << v.detail;
    os << "\n";
  }
  return os.str();
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report;
  auto add = [&](const std::string& inv, const std::string& elem,
                 const std::string& detail = "") {
    report.violations.push_back({inv, elem, detail});
  };

  if (s.time_budget <= 0.0) {
    add("nonpositive_time_budget", s.name);
  }
  if (s.map_extent.width() <= 0.0 || s.map_extent.height() <= 0.0) {
    add("empty_map_extent", s.name);
  }

  auto polygon_in_map = [&](const Polygon2D& poly) {
    for (const auto& v : poly.vertices) {
      if (!s.map_extent.contains(v)) return false;
    }
    return true;
  };

  std::set<std::string> ids;
  for (const auto& aoi : s.aois) {
    if (!ids.insert("aoi:" + aoi.id).second) add("duplicate_id", aoi.id);
    if (aoi.boundary.size() < 3) add("degenerate_polygon", aoi.id);
    if (!polygon_in_map(aoi.boundary)) add("aoi_outside_map", aoi.id);
    for (const auto& [eoi_id, p] : aoi.priors) {
      if (p < 0.0 || p > 1.0) add("prior_out_of_range", aoi.id, eoi_id);
      if (s.eoi_index(eoi_id) < 0) add("prior_for_unknown_eoi", aoi.id, eoi_id);
    }
  }
  for (const auto& koz : s.kozs) {
    if (!ids.insert("koz:" + koz.id).second) add("duplicate_id", koz.id);
    if (koz.boundary.size() < 3) add("degenerate_polygon", koz.id);
    if (!polygon_in_map(koz.boundary)) add("koz_outside_map", koz.id);
  }
  for (const auto& e : s.entities) {
    if (!ids.insert("entity:" + e.id).second) add("duplicate_id", e.id);
    if (!s.map_extent.contains(Vec2(e.position.x(), e.position.y()))) {
      add("entity_outside_map", e.id);
    }
    const double ground =
        s.occupancy.ground_height(e.position.x(), e.position.y());
    if (e.position.z() < ground - 0.01 || e.position.z() > ground + 2.5) {
      add("entity_not_on_ground", e.id);
    }
  }

  for (const auto& eoi : s.eois) {
    double mass = 0.0;
    for (const auto& aoi : s.aois) {
      auto it = aoi.priors.find(eoi.id);
      if (it != aoi.priors.end()) mass += it->second;
    }
    if (mass > 1.0 + 1e-9) {
      add("prior_mass_exceeds_one", eoi.id,
          "sum over AOIs = " + std::to_string(mass));
    }

    const GroundTruthEntity* entity = s.entity_for_eoi(eoi.id);
    if (entity == nullptr) {
      add("missing_entity_for_eoi", eoi.id);
      continue;
    }
    const Vec2 ground_pos(entity->position.x(), entity->position.y());
    bool in_candidate = false;
    for (const auto& aoi : s.aois) {
      auto it = aoi.priors.find(eoi.id);
      if (it == aoi.priors.end() || it->second <= 0.0) continue;
      if (point_in_polygon(ground_pos, aoi.boundary)) {
        in_candidate = true;
        break;
      }
    }
    if (!in_candidate) add("eoi_outside_candidate_aois", eoi.id);

    // Descriptor must be unambiguous among entities inside candidate AOIs.
    for (const auto& aoi : s.aois) {
      auto it = aoi.priors.find(eoi.id);
      if (it == aoi.priors.end() || it->second <= 0.0) continue;
      for (const auto& other : s.entities) {
        if (other.id == entity->id) continue;
        if (other.vehicle_type != eoi.vehicle_type || other.color != eoi.color)
          continue;
        if (point_in_polygon(Vec2(other.position.x(), other.position.y()),
                             aoi.boundary)) {
          add("ambiguous_descriptor", eoi.id,
              "entity " + other.id + " inside candidate AOI " + aoi.id);
        }
      }
    }
  }
  return report;
}

BeliefMap BeliefMap::from_scenario(const Scenario& s) {
  BeliefMap belief;
  const int ne = static_cast<int>(s.eois.size());
  const int na = static_cast<int>(s.aois.size());
  belief.table_ = Eigen::MatrixXd::Zero(ne, na + 1);
  for (int e = 0; e < ne; ++e) {
    double mass = 0.0;
    for (int a = 0; a < na; ++a) {
      auto it = s.aois[a].priors.find(s.eois[e].id);
      const double p = it == s.aois[a].priors.end() ? 0.0 : it->second;
      belief.table_(e, a) = p;
      mass += p;
    }
    belief.table_(e, na) = std::max(0.0, 1.0 - mass);
    belief.renormalize_row(e);
  }
  return belief;
}

void BeliefMap::renormalize_row(int eoi) {
  const double sum = table_.row(eoi).sum();
  if (sum > 0.0) {
    table_.row(eoi) /= sum;
  } else {
    // All mass annihilated: fall back to the residual hypothesis.
    table_.row(eoi).setZero();
    table_(eoi, aoi_count()) = 1.0;
  }
}

void BeliefMap::apply_negative_search(int eoi, int aoi,
                                      double coverage_fraction,
                                      double p_detect_given_covered) {
  const double cq =
      std::clamp(coverage_fraction, 0.0, 1.0) *
      std::clamp(p_detect_given_covered, 0.0, 1.0);
  if (cq <= 0.0) return;
  // p(not detected | in aoi) = 1 - cq; elsewhere the miss is certain.
  table_(eoi, aoi) *= (1.0 - cq);
  renormalize_row(eoi);
}

void BeliefMap::apply_positive_sighting(int eoi, int aoi, double likelihood,
                                        double false_match_rate) {
  const double q = std::clamp(likelihood, 0.0, 1.0);
  const double eps = std::clamp(false_match_rate, 1e-12, 1.0);
  for (int a = 0; a <= aoi_count(); ++a) {
    table_(eoi, a) *= (a == aoi) ? q : eps;
  }
  renormalize_row(eoi);
}

void BeliefMap::collapse(int eoi, int aoi) {
  table_.row(eoi).setZero();
  table_(eoi, aoi < 0 ? aoi_count() : aoi) = 1.0;
}

}  // namespace neusis
