#include "neusis/scenario_io.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace neusis {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& s, int line,
                                  const std::string& key) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ScenarioParseError("line " + std::to_string(line) +
                               ": bad number '" + tok + "' in " + key);
    }
  }
  return out;
}

Polygon2D parse_polygon(const std::string& s, int line) {
  const auto nums = parse_numbers(s, line, "polygon");
  if (nums.size() < 6 || nums.size() % 2 != 0) {
    throw ScenarioParseError("line " + std::to_string(line) +
                             ": polygon needs >= 3 x y pairs");
  }
  Polygon2D poly;
  for (std::size_t i = 0; i + 1 < nums.size(); i += 2) {
    poly.vertices.emplace_back(nums[i], nums[i + 1]);
  }
  return poly;
}

struct Section {
  std::string kind;  // map | aoi | koz | eoi | entity | occupancy | sensor
  std::string id;
  int line = 0;
  std::vector<std::tuple<std::string, std::string, int>> entries;
};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ScenarioParseError("cannot open scenario file: " + path);

  std::vector<Section> sections;
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ScenarioParseError("line " + std::to_string(line_no) +
                                 ": unterminated section header");
      }
      const std::string body = trim(line.substr(1, line.size() - 2));
      const auto space = body.find(' ');
      Section sec;
      sec.kind = space == std::string::npos ? body : body.substr(0, space);
      sec.id = space == std::string::npos ? "" : trim(body.substr(space + 1));
      sec.line = line_no;
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ScenarioParseError("line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    if (sections.empty()) {
      throw ScenarioParseError("line " + std::to_string(line_no) +
                               ": entry outside any section");
    }
    sections.back().entries.emplace_back(trim(line.substr(0, eq)),
                                         trim(line.substr(eq + 1)), line_no);
  }

  Scenario s;
  s.name = std::filesystem::path(path).stem().string();
  bool saw_map = false;

  for (const auto& sec : sections) {
    if (sec.kind == "map") {
      saw_map = true;
      for (const auto& [key, value, ln] : sec.entries) {
        if (key == "min") {
          const auto n = parse_numbers(value, ln, key);
          if (n.size() != 2) throw ScenarioParseError("line " + std::to_string(ln) + ": min needs x y");
          s.map_extent.min = Vec2(n[0], n[1]);
        } else if (key == "max") {
          const auto n = parse_numbers(value, ln, key);
          if (n.size() != 2) throw ScenarioParseError("line " + std::to_string(ln) + ": max needs x y");
          s.map_extent.max = Vec2(n[0], n[1]);
        } else if (key == "time_budget") {
          s.time_budget = parse_numbers(value, ln, key).at(0);
        } else if (key == "uav_start") {
          const auto n = parse_numbers(value, ln, key);
          if (n.size() != 3) throw ScenarioParseError("line " + std::to_string(ln) + ": uav_start needs x y z");
          s.uav_start.position = Vec3(n[0], n[1], n[2]);
        } else if (key == "uav_yaw") {
          s.uav_start.yaw = parse_numbers(value, ln, key).at(0);
        } else if (key == "seed") {
          s.seed = static_cast<std::uint64_t>(parse_numbers(value, ln, key).at(0));
        } else if (key == "name") {
          s.name = value;
        } else {
          throw ScenarioParseError("line " + std::to_string(ln) + ": unknown map key '" + key + "'");
        }
      }
    } else if (sec.kind == "aoi") {
      if (sec.id.empty()) throw ScenarioParseError("line " + std::to_string(sec.line) + ": aoi section needs an id");
      Aoi aoi;
      aoi.id = sec.id;
      for (const auto& [key, value, ln] : sec.entries) {
        if (key == "polygon") {
          aoi.boundary = parse_polygon(value, ln);
        } else if (key.rfind("prior ", 0) == 0) {
          const std::string eoi_id = trim(key.substr(6));
          aoi.priors[eoi_id] = parse_numbers(value, ln, key).at(0);
        } else {
          throw ScenarioParseError("line " + std::to_string(ln) + ": unknown aoi key '" + key + "'");
        }
      }
      s.aois.push_back(std::move(aoi));
    } else if (sec.kind == "koz") {
      if (sec.id.empty()) throw ScenarioParseError("line " + std::to_string(sec.line) + ": koz section needs an id");
      Koz koz;
      koz.id = sec.id;
      for (const auto& [key, value, ln] : sec.entries) {
        if (key == "polygon") {
          koz.boundary = parse_polygon(value, ln);
        } else {
          throw ScenarioParseError("line " + std::to_string(ln) + ": unknown koz key '" + key + "'");
        }
      }
      s.kozs.push_back(std::move(koz));
    } else if (sec.kind == "eoi") {
      if (sec.id.empty()) throw ScenarioParseError("line " + std::to_string(sec.line) + ": eoi section needs an id");
      EoiDescriptor eoi;
      eoi.id = sec.id;
      for (const auto& [key, value, ln] : sec.entries) {
        if (key == "vehicle_type") {
          const auto t = vehicle_type_from_string(value);
          if (!t) throw ScenarioParseError("line " + std::to_string(ln) + ": unknown vehicle_type '" + value + "'");
          eoi.vehicle_type = *t;
        } else if (key == "color") {
          const auto c = color_from_string(value);
          if (!c) throw ScenarioParseError("line " + std::to_string(ln) + ": unknown color '" + value + "'");
          eoi.color = *c;
        } else {
          throw ScenarioParseError("line " + std::to_string(ln) + ": unknown eoi key '" + key + "'");
        }
      }
      s.eois.push_back(std::move(eoi));
    } else if (sec.kind == "entity") {
      if (sec.id.empty()) throw ScenarioParseError("line " + std::to_string(sec.line) + ": entity section needs an id");
      GroundTruthEntity e;
      e.id = sec.id;
      for (const auto& [key, value, ln] : sec.entries) {
        if (key == "position") {
          const auto n = parse_numbers(value, ln, key);
          if (n.size() != 3) throw ScenarioParseError("line " + std::to_string(ln) + ": position needs x y z");
          e.position = Vec3(n[0], n[1], n[2]);
        } else if (key == "vehicle_type") {
          const auto t = vehicle_type_from_string(value);
          if (!t) throw ScenarioParseError("line " + std::to_string(ln) + ": unknown vehicle_type '" + value + "'");
          e.vehicle_type = *t;
        } else if (key == "color") {
          const auto c = color_from_string(value);
          if (!c) throw ScenarioParseError("line " + std::to_string(ln) + ": unknown color '" + value + "'");
          e.color = *c;
        } else if (key == "is_eoi") {
          e.is_eoi = (value == "true" || value == "1");
        } else {
          throw ScenarioParseError("line " + std::to_string(ln) + ": unknown entity key '" + key + "'");
        }
      }
      s.entities.push_back(std::move(e));
    } else if (sec.kind == "occupancy") {
      Vec2 origin(0.0, 0.0);
      double cell_size = 5.0;
      int nx = 0, ny = 0, nz = 0;
      std::string file;
      std::vector<std::array<double, 6>> boxes;
      for (const auto& [key, value, ln] : sec.entries) {
        if (key == "origin") {
          const auto n = parse_numbers(value, ln, key);
          if (n.size() != 2) throw ScenarioParseError("line " + std::to_string(ln) + ": origin needs x y");
          origin = Vec2(n[0], n[1]);
        } else if (key == "cell_size") {
          cell_size = parse_numbers(value, ln, key).at(0);
        } else if (key == "dims") {
          const auto n = parse_numbers(value, ln, key);
          if (n.size() != 3) throw ScenarioParseError("line " + std::to_string(ln) + ": dims needs nx ny nz");
          nx = static_cast<int>(n[0]);
          ny = static_cast<int>(n[1]);
          nz = static_cast<int>(n[2]);
        } else if (key == "file") {
          file = value;
        } else if (key == "box") {
          const auto n = parse_numbers(value, ln, key);
          if (n.size() != 6) throw ScenarioParseError("line " + std::to_string(ln) + ": box needs x0 y0 z0 x1 y1 z1");
          boxes.push_back({n[0], n[1], n[2], n[3], n[4], n[5]});
        } else {
          throw ScenarioParseError("line " + std::to_string(ln) + ": unknown occupancy key '" + key + "'");
        }
      }
      if (cell_size <= 0.0) {
        throw ScenarioParseError("line " + std::to_string(sec.line) + ": cell_size must be > 0");
      }
      if (!file.empty()) {
        const auto grid_path =
            std::filesystem::path(path).parent_path() / file;
        s.occupancy = load_grid_nsog(grid_path.string());
      } else {
        s.occupancy = OccupancyGrid(origin, cell_size, nx, ny, nz);
        for (const auto& b : boxes) {
          s.occupancy.fill_box(Vec3(b[0], b[1], b[2]), Vec3(b[3], b[4], b[5]));
        }
      }
    } else if (sec.kind == "sensor") {
      for (const auto& [key, value, ln] : sec.entries) {
        (void)ln;
        s.sensor_overrides[key] = value;
      }
    } else {
      throw ScenarioParseError("line " + std::to_string(sec.line) +
                               ": unknown section '" + sec.kind + "'");
    }
  }
  if (!saw_map) throw ScenarioParseError("scenario is missing a [map] section");
  return s;
}

Scenario load_scenario(const std::string& path) {
  Scenario s = parse_scenario_file(path);
  const ValidationReport report = validate_scenario(s);
  if (!report.ok()) {
    throw ScenarioValidationError("invalid scenario " + path + ":\n" +
                                  report.to_string());
  }
  return s;
}

namespace {

void emit_polygon(std::ostringstream& os, const Polygon2D& poly) {
  os << "polygon =";
  for (const auto& v : poly.vertices) {
    os << " " << format_double(v.x()) << " " << format_double(v.y());
  }
  os << "\n";
}

// Reconstructs the generator's box list from the grid via maximal-run
// rectangle decomposition, one layer at a time.
std::vector<std::array<double, 6>> grid_to_boxes(const OccupancyGrid& g) {
  std::vector<std::array<double, 6>> boxes;
  const double cs = g.cell_size();
  for (int iz = 0; iz < g.nz(); ++iz) {
    std::vector<std::uint8_t> used(
        static_cast<std::size_t>(g.nx()) * g.ny(), 0);
    auto used_at = [&](int ix, int iy) -> std::uint8_t& {
      return used[static_cast<std::size_t>(iy) * g.nx() + ix];
    };
    for (int iy = 0; iy < g.ny(); ++iy) {
      for (int ix = 0; ix < g.nx(); ++ix) {
        if (!g.occupied(ix, iy, iz) || used_at(ix, iy)) continue;
        int x1 = ix;
        while (x1 + 1 < g.nx() && g.occupied(x1 + 1, iy, iz) &&
               !used_at(x1 + 1, iy)) {
          ++x1;
        }
        int y1 = iy;
        for (bool grow = true; grow && y1 + 1 < g.ny();) {
          for (int x = ix; x <= x1; ++x) {
            if (!g.occupied(x, y1 + 1, iz) || used_at(x, y1 + 1)) {
              grow = false;
              break;
            }
          }
          if (grow) ++y1;
        }
        for (int y = iy; y <= y1; ++y) {
          for (int x = ix; x <= x1; ++x) used_at(x, y) = 1;
        }
        boxes.push_back({g.origin().x() + ix * cs, g.origin().y() + iy * cs,
                         iz * cs, g.origin().x() + (x1 + 1) * cs,
                         g.origin().y() + (y1 + 1) * cs, (iz + 1) * cs});
      }
    }
  }
  return boxes;
}

}  // namespace

std::string serialize_scenario(const Scenario& s,
                               const std::string& occupancy_file) {
  std::ostringstream os;
  os << "# scenario format v1\n";
  os << "[map]\n";
  os << "name = " << s.name << "\n";
  os << "min = " << format_double(s.map_extent.min.x()) << " "
     << format_double(s.map_extent.min.y()) << "\n";
  os << "max = " << format_double(s.map_extent.max.x()) << " "
     << format_double(s.map_extent.max.y()) << "\n";
  os << "time_budget = " << format_double(s.time_budget) << "\n";
  os << "uav_start = " << format_double(s.uav_start.position.x()) << " "
     << format_double(s.uav_start.position.y()) << " "
     << format_double(s.uav_start.position.z()) << "\n";
  os << "uav_yaw = " << format_double(s.uav_start.yaw) << "\n";
  os << "seed = " << s.seed << "\n";

  for (const auto& aoi : s.aois) {
    os << "\n[aoi " << aoi.id << "]\n";
    emit_polygon(os, aoi.boundary);
    for (const auto& [eoi_id, p] : aoi.priors) {
      os << "prior " << eoi_id << " = " << format_double(p) << "\n";
    }
  }
  for (const auto& koz : s.kozs) {
    os << "\n[koz " << koz.id << "]\n";
    emit_polygon(os, koz.boundary);
  }
  for (const auto& eoi : s.eois) {
    os << "\n[eoi " << eoi.id << "]\n";
    os << "vehicle_type = " << to_string(eoi.vehicle_type) << "\n";
    os << "color = " << to_string(eoi.color) << "\n";
  }
  for (const auto& e : s.entities) {
    os << "\n[entity " << e.id << "]\n";
    os << "position = " << format_double(e.position.x()) << " "
       << format_double(e.position.y()) << " "
       << format_double(e.position.z()) << "\n";
    os << "vehicle_type = " << to_string(e.vehicle_type) << "\n";
    os << "color = " << to_string(e.color) << "\n";
    os << "is_eoi = " << (e.is_eoi ? "true" : "false") << "\n";
  }
  if (!s.occupancy.empty()) {
    os << "\n[occupancy]\n";
    if (!occupancy_file.empty()) {
      os << "file = " << occupancy_file << "\n";
    } else {
      os << "origin = " << format_double(s.occupancy.origin().x()) << " "
         << format_double(s.occupancy.origin().y()) << "\n";
      os << "cell_size = " << format_double(s.occupancy.cell_size()) << "\n";
      os << "dims = " << s.occupancy.nx() << " " << s.occupancy.ny() << " "
         << s.occupancy.nz() << "\n";
      for (const auto& b : grid_to_boxes(s.occupancy)) {
        os << "box =";
        for (double v : b) os << " " << format_double(v);
        os << "\n";
      }
    }
  }
  if (!s.sensor_overrides.empty()) {
    os << "\n[sensor]\n";
    for (const auto& [key, value] : s.sensor_overrides) {
      os << key << " = " << value << "\n";
    }
  }
  return os.str();
}

void save_scenario(const Scenario& s, const std::string& path,
                   bool external_grid) {
  std::string occupancy_file;
  if (external_grid && !s.occupancy.empty()) {
    occupancy_file = std::filesystem::path(path).stem().string() + ".occ";
    const auto grid_path =
        std::filesystem::path(path).parent_path() / occupancy_file;
    save_grid_nsog(s.occupancy, grid_path.string());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write scenario file: " + path);
  os << serialize_scenario(s, occupancy_file);
}

}  // namespace neusis
