#include "neusis/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "neusis/rng.hpp"

namespace neusis {

namespace {

Polygon2D make_rect(double x0, double y0, double x1, double y1) {
  Polygon2D p;
  p.vertices = {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
  return p;
}

bool rects_overlap(const Rect2D& a, const Rect2D& b, double gap) {
  return a.min.x() - gap < b.max.x() && b.min.x() - gap < a.max.x() &&
         a.min.y() - gap < b.max.y() && b.min.y() - gap < a.max.y();
}

Vec2 sample_in_polygon(Rng& rng, const Polygon2D& poly, int retries) {
  const Rect2D box = bounding_box(poly);
  for (int i = 0; i < retries; ++i) {
    const Vec2 p(rng.uniform(box.min.x(), box.max.x()),
                 rng.uniform(box.min.y(), box.max.y()));
    if (point_strictly_inside(p, poly, 2.0)) return p;
  }
  throw GenerationError("could not sample a point inside polygon");
}

}  // namespace

Scenario generate_scenario(std::uint64_t seed, const GeneratorConfig& cfg) {
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x5bf03635ULL);
  Scenario s;
  s.seed = seed;
  s.name = "gen-" + std::to_string(seed);
  s.map_extent.min = Vec2(0.0, 0.0);
  s.map_extent.max = Vec2(cfg.map_size, cfg.map_size);
  s.time_budget = cfg.time_budget;
  s.uav_start.position = Vec3(20.0, 20.0, 40.0);
  s.uav_start.yaw = 0.0;

  const int n_aois =
      cfg.min_aois + static_cast<int>(rng.uniform_index(
                         static_cast<std::uint64_t>(cfg.max_aois - cfg.min_aois + 1)));
  const int n_eois =
      cfg.min_eois + static_cast<int>(rng.uniform_index(
                         static_cast<std::uint64_t>(cfg.max_eois - cfg.min_eois + 1)));
  const int n_kozs =
      cfg.min_kozs + static_cast<int>(rng.uniform_index(
                         static_cast<std::uint64_t>(cfg.max_kozs - cfg.min_kozs + 1)));

  // AOIs cluster into a few far-apart neighborhoods, so the visit order
  // carries real travel cost. Sequential random placement can paint itself
  // into a corner, so the whole layout restarts on failure.
  const double border = 30.0;
  std::vector<Rect2D> aoi_rects;
  for (int layout = 0; layout < 80 && aoi_rects.size() !=
                                          static_cast<std::size_t>(n_aois);
       ++layout) {
    aoi_rects.clear();
    // Cluster centers, pairwise well separated.
    std::vector<Vec2> clusters;
    for (int attempt = 0;
         attempt < cfg.placement_retries && clusters.size() < 3; ++attempt) {
      const Vec2 c(rng.uniform(110.0, cfg.map_size - 110.0),
                   rng.uniform(110.0, cfg.map_size - 110.0));
      bool ok = true;
      for (const auto& other : clusters) {
        if ((c - other).norm() < 240.0) {
          ok = false;
          break;
        }
      }
      if (ok) clusters.push_back(c);
    }
    if (clusters.size() < 3) continue;
    for (int i = 0; i < n_aois; ++i) {
      const Vec2& cluster = clusters[static_cast<std::size_t>(i) % clusters.size()];
      bool placed = false;
      for (int attempt = 0; attempt < cfg.placement_retries && !placed;
           ++attempt) {
        const double w = rng.uniform(cfg.min_aoi_side, cfg.max_aoi_side);
        const double h = rng.uniform(cfg.min_aoi_side, cfg.max_aoi_side);
        const double x0 = std::clamp(cluster.x() + rng.uniform(-140.0, 140.0) - w / 2.0,
                                     border, cfg.map_size - border - w);
        const double y0 = std::clamp(cluster.y() + rng.uniform(-140.0, 140.0) - h / 2.0,
                                     border, cfg.map_size - border - h);
        Rect2D rect{Vec2(x0, y0), Vec2(x0 + w, y0 + h)};
        bool ok = true;
        for (const auto& other : aoi_rects) {
          if (rects_overlap(rect, other, 20.0)) {
            ok = false;
            break;
          }
        }
        if (ok && rect.contains(Vec2(s.uav_start.position.x(),
                                     s.uav_start.position.y()))) {
          ok = false;
        }
        if (ok) {
          aoi_rects.push_back(rect);
          placed = true;
        }
      }
      if (!placed) break;
    }
  }
  if (aoi_rects.size() != static_cast<std::size_t>(n_aois)) {
    throw GenerationError("could not place non-overlapping AOIs (seed " +
                          std::to_string(seed) + ")");
  }
  for (int i = 0; i < n_aois; ++i) {
    Aoi aoi;
    aoi.id = std::string(1, static_cast<char>('A' + i));
    aoi.boundary = make_rect(aoi_rects[i].min.x(), aoi_rects[i].min.y(),
                             aoi_rects[i].max.x(), aoi_rects[i].max.y());
    s.aois.push_back(std::move(aoi));
  }

  // KOZs: rectangles, roughly half overlapping AOI edges (forcing coverage
  // detours), the rest in open terrain (forcing navigation detours). Never on
  // the launch point and never swallowing most of an AOI.
  for (int i = 0; i < n_kozs; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.placement_retries && !placed; ++attempt) {
      const double w = rng.uniform(cfg.min_koz_side, cfg.max_koz_side);
      const double h = rng.uniform(cfg.min_koz_side, cfg.max_koz_side);
      double x0, y0;
      if (i % 2 == 0 && !aoi_rects.empty()) {
        // Centered inside an AOI: splits sweep lanes and forces coverage
        // detours.
        const auto& r = aoi_rects[rng.uniform_index(aoi_rects.size())];
        const double cx = rng.uniform(r.min.x() + 15.0, r.max.x() - 15.0);
        const double cy = rng.uniform(r.min.y() + 15.0, r.max.y() - 15.0);
        x0 = cx - w / 2.0;
        y0 = cy - h / 2.0;
      } else {
        x0 = rng.uniform(10.0, cfg.map_size - 10.0 - w);
        y0 = rng.uniform(10.0, cfg.map_size - 10.0 - h);
      }
      if (x0 < 10.0 || y0 < 10.0 || x0 + w > cfg.map_size - 10.0 ||
          y0 + h > cfg.map_size - 10.0) {
        continue;
      }
      Rect2D rect{Vec2(x0, y0), Vec2(x0 + w, y0 + h)};
      const Vec2 start(s.uav_start.position.x(), s.uav_start.position.y());
      if (rects_overlap(rect, Rect2D{start - Vec2(15, 15), start + Vec2(15, 15)}, 0.0)) {
        continue;
      }
      // Keep the majority of every AOI searchable.
      bool ok = true;
      for (const auto& ar : aoi_rects) {
        const double ix = std::max(
            0.0, std::min(rect.max.x(), ar.max.x()) - std::max(rect.min.x(), ar.min.x()));
        const double iy = std::max(
            0.0, std::min(rect.max.y(), ar.max.y()) - std::max(rect.min.y(), ar.min.y()));
        const double aoi_area = (ar.max.x() - ar.min.x()) * (ar.max.y() - ar.min.y());
        if (ix * iy > 0.35 * aoi_area) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      Koz koz;
      koz.id = "K" + std::to_string(i + 1);
      koz.boundary = make_rect(rect.min.x(), rect.min.y(), rect.max.x(), rect.max.y());
      s.kozs.push_back(std::move(koz));
      placed = true;
    }
    if (!placed) {
      throw GenerationError("could not place KOZs (seed " + std::to_string(seed) + ")");
    }
  }

  // Occupancy: buildings as occupied boxes. They matter for occlusion and
  // for detection feasibility filtering, not for flight at 40 m.
  const int cells = static_cast<int>(std::ceil(cfg.map_size / cfg.occupancy_cell));
  const int zcells = static_cast<int>(std::ceil(cfg.occupancy_height / cfg.occupancy_cell));
  s.occupancy = OccupancyGrid(Vec2(0.0, 0.0), cfg.occupancy_cell, cells, cells, zcells);
  for (int i = 0; i < cfg.buildings; ++i) {
    const double w = rng.uniform(10.0, 25.0);
    const double h = rng.uniform(10.0, 25.0);
    const double height = rng.uniform(8.0, 20.0);
    const double x0 = rng.uniform(5.0, cfg.map_size - 5.0 - w);
    const double y0 = rng.uniform(5.0, cfg.map_size - 5.0 - h);
    const Vec2 start(s.uav_start.position.x(), s.uav_start.position.y());
    if (x0 - 15.0 < start.x() && start.x() < x0 + w + 15.0 &&
        y0 - 15.0 < start.y() && start.y() < y0 + h + 15.0) {
      continue;  // keep the launch column clear
    }
    s.occupancy.fill_box(Vec3(x0, y0, 0.0), Vec3(x0 + w, y0 + h, height));
  }

  // EOI descriptors: unique (type, color) combinations.
  std::set<std::pair<int, int>> used_combos;
  for (int e = 0; e < n_eois; ++e) {
    int type, color;
    do {
      type = static_cast<int>(rng.uniform_index(kTypeCount));
      color = static_cast<int>(rng.uniform_index(kColorCount));
    } while (!used_combos.insert({type, color}).second);
    EoiDescriptor d;
    d.id = "eoi" + std::to_string(e + 1);
    d.vehicle_type = static_cast<VehicleType>(type);
    d.color = static_cast<Color>(color);
    s.eois.push_back(std::move(d));
  }

  auto ground_free = [&](const Vec2& p) {
    if (s.occupancy.ground_height(p.x(), p.y()) > 0.0) return false;
    for (const auto& koz : s.kozs) {
      if (point_in_polygon(p, koz.boundary, 1.0)) return false;
    }
    return true;
  };
  auto far_from_entities = [&](const Vec2& p, double min_dist) {
    for (const auto& e : s.entities) {
      if ((Vec2(e.position.x(), e.position.y()) - p).norm() < min_dist) {
        return false;
      }
    }
    return true;
  };

  // Priors per EOI: normalized Gamma draws over 2..max_candidate_aois AOIs
  // scaled by (1 - residual), then the containing AOI sampled by the priors.
  for (int e = 0; e < n_eois; ++e) {
    const int max_cand = std::min(cfg.max_candidate_aois, n_aois);
    const int n_candidates =
        max_cand <= 2 ? max_cand
                      : 2 + static_cast<int>(rng.uniform_index(
                                static_cast<std::uint64_t>(max_cand - 1)));
    std::vector<int> order(n_aois);
    for (int i = 0; i < n_aois; ++i) order[i] = i;
    // Deterministic Fisher-Yates.
    for (int i = n_aois - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_index(i + 1));
      std::swap(order[i], order[j]);
    }
    std::vector<int> candidates(order.begin(), order.begin() + n_candidates);
    std::sort(candidates.begin(), candidates.end());

    const double residual = rng.uniform(0.05, 0.15);
    std::vector<double> weights(n_candidates);
    double total = 0.0;
    for (auto& w : weights) {
      w = rng.gamma(cfg.prior_concentration) + 0.15;
      total += w;
    }
    std::vector<double> priors(n_candidates);
    for (int i = 0; i < n_candidates; ++i) {
      priors[i] = (weights[i] / total) * (1.0 - residual);
      s.aois[candidates[i]].priors[s.eois[e].id] = priors[i];
    }

    // Containing AOI sampled proportionally to the priors.
    double pick = rng.uniform() * (1.0 - residual);
    int chosen = candidates.back();
    for (int i = 0; i < n_candidates; ++i) {
      if (pick < priors[i]) {
        chosen = candidates[i];
        break;
      }
      pick -= priors[i];
    }

    bool placed = false;
    for (int attempt = 0; attempt < cfg.placement_retries && !placed; ++attempt) {
      const Vec2 p = sample_in_polygon(rng, s.aois[chosen].boundary,
                                       cfg.placement_retries);
      if (!ground_free(p) || !far_from_entities(p, 25.0)) continue;
      GroundTruthEntity ent;
      ent.id = s.eois[e].id;
      ent.position = Vec3(p.x(), p.y(), 0.9);
      ent.vehicle_type = s.eois[e].vehicle_type;
      ent.color = s.eois[e].color;
      ent.is_eoi = true;
      s.entities.push_back(std::move(ent));
      placed = true;
    }
    if (!placed) {
      throw GenerationError("could not place EOI entity (seed " +
                            std::to_string(seed) + ")");
    }
  }

  // Distractors: exact attribute matches, strictly outside every AOI.
  for (int d = 0; d < cfg.distractors; ++d) {
    const auto& target = s.eois[rng.uniform_index(s.eois.size())];
    bool placed = false;
    for (int attempt = 0; attempt < cfg.placement_retries && !placed; ++attempt) {
      const Vec2 p(rng.uniform(10.0, cfg.map_size - 10.0),
                   rng.uniform(10.0, cfg.map_size - 10.0));
      bool in_aoi = false;
      for (const auto& aoi : s.aois) {
        if (point_in_polygon(p, aoi.boundary, 3.0)) {
          in_aoi = true;
          break;
        }
      }
      if (in_aoi || !ground_free(p) || !far_from_entities(p, 25.0)) continue;
      GroundTruthEntity ent;
      ent.id = "dst" + std::to_string(d + 1);
      ent.position = Vec3(p.x(), p.y(), 0.9);
      ent.vehicle_type = target.vehicle_type;
      ent.color = target.color;
      ent.is_eoi = false;
      s.entities.push_back(std::move(ent));
      placed = true;
    }
    if (!placed) {
      throw GenerationError("could not place distractor (seed " +
                            std::to_string(seed) + ")");
    }
  }

  // Ambient cars: never an exact match for any descriptor, anywhere on free
  // ground (inside AOIs they exercise attribute discrimination).
  for (int c = 0; c < cfg.ambient_cars; ++c) {
    int type, color;
    do {
      type = static_cast<int>(rng.uniform_index(kTypeCount));
      color = static_cast<int>(rng.uniform_index(kColorCount));
    } while (used_combos.count({type, color}) > 0);
    bool placed = false;
    for (int attempt = 0; attempt < cfg.placement_retries && !placed; ++attempt) {
      const Vec2 p(rng.uniform(10.0, cfg.map_size - 10.0),
                   rng.uniform(10.0, cfg.map_size - 10.0));
      if (!ground_free(p) || !far_from_entities(p, 25.0)) continue;
      GroundTruthEntity ent;
      ent.id = "car" + std::to_string(c + 1);
      ent.position = Vec3(p.x(), p.y(), 0.9);
      ent.vehicle_type = static_cast<VehicleType>(type);
      ent.color = static_cast<Color>(color);
      ent.is_eoi = false;
      s.entities.push_back(std::move(ent));
      placed = true;
    }
    if (!placed) {
      throw GenerationError("could not place ambient car (seed " +
                            std::to_string(seed) + ")");
    }
  }

  const ValidationReport report = validate_scenario(s);
  if (!report.ok()) {
    throw GenerationError("generated scenario failed validation (seed " +
                          std::to_string(seed) + "):\n" + report.to_string());
  }
  return s;
}

}  // namespace neusis
