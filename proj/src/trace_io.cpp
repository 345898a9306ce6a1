#include "neusis/trace_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace neusis {

namespace {

using Json = nlohmann::ordered_json;

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json report_json(const EoiReport& r) {
  Json j;
  j["type"] = r.online ? "report" : "offline_report";
  j["t"] = r.timestamp;
  j["eoi"] = r.eoi_id;
  j["pos"] = vec3_json(r.reported_position);
  j["confidence"] = r.confidence;
  return j;
}

Vec3 vec3_from(const Json& j) { return Vec3(j[0], j[1], j[2]); }

}  // namespace

std::string serialize_trace(const MissionTrace& trace) {
  std::ostringstream os;
  {
    Json header;
    header["type"] = "header";
    header["format"] = 1;
    header["scenario"] = trace.scenario_name;
    header["label"] = trace.label;
    header["seed"] = trace.seed;
    header["time_budget"] = trace.time_budget;
    header["frame_period"] = trace.frame_period;
    Json eois = Json::array();
    for (const auto& [id, pos] : trace.gt_eois) {
      Json e;
      e["id"] = id;
      e["pos"] = vec3_json(pos);
      eois.push_back(e);
    }
    header["eois"] = eois;
    Json kozs = Json::array();
    for (const auto& koz : trace.raw_kozs) {
      Json poly = Json::array();
      for (const auto& v : koz.vertices) poly.push_back(Json::array({v.x(), v.y()}));
      kozs.push_back(poly);
    }
    header["kozs"] = kozs;
    header["config"] = Json(trace.config_echo);
    os << header.dump() << "\n";
  }
  for (const auto& w : trace.warnings) {
    Json j;
    j["type"] = "warning";
    j["message"] = w;
    os << j.dump() << "\n";
  }

  // Merge frames, plans, coverage events and reports in time order, with a
  // fixed precedence so the byte stream is a pure function of the mission.
  struct Item {
    double t;
    int precedence;
    std::size_t seq;
    Json record;
  };
  std::vector<Item> items;
  std::size_t seq = 0;
  for (const auto& p : trace.plans) {
    Json j;
    j["type"] = "plan";
    j["t"] = p.t;
    Json legs = Json::array();
    for (const auto& leg : p.plan.legs) {
      legs.push_back(Json::array({leg.aoi_id, leg.allocated_time}));
    }
    j["legs"] = legs;
    j["expected_gain"] = p.plan.expected_gain;
    j["total_time"] = p.plan.total_time;
    j["travel_time"] = p.plan.travel_time;
    j["infeasible"] = p.plan.infeasible;
    items.push_back({p.t, 0, seq++, std::move(j)});
  }
  for (const auto& f : trace.frames) {
    Json j;
    j["type"] = "frame";
    j["t"] = f.t;
    j["pos"] = vec3_json(f.position);
    j["yaw"] = f.yaw;
    j["dets"] = f.detections;
    j["tracks"] = f.tracks;
    items.push_back({f.t, 1, seq++, std::move(j)});
  }
  for (const auto& r : trace.online_reports) {
    items.push_back({r.timestamp, 2, seq++, report_json(r)});
  }
  for (const auto& c : trace.coverage_events) {
    Json j;
    j["type"] = "coverage";
    j["t"] = c.t;
    j["aoi"] = c.aoi_id;
    j["outcome"] = to_string(c.outcome);
    j["fraction"] = c.fraction;
    items.push_back({c.t, 3, seq++, std::move(j)});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.precedence != b.precedence) return a.precedence < b.precedence;
    return a.seq < b.seq;
  });
  for (const auto& item : items) os << item.record.dump() << "\n";

  for (const auto& r : trace.offline_reports) os << report_json(r).dump() << "\n";
  {
    Json j;
    j["type"] = "outcome";
    Json found;
    for (const auto& [id, t] : trace.first_report_time) found[id] = t;
    j["found"] = found;
    j["end_t"] = trace.end_time;
    j["end_reason"] = trace.end_reason;
    j["frames"] = trace.frames.size();
    os << j.dump() << "\n";
  }
  return os.str();
}

void save_trace(const MissionTrace& trace, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write trace file: " + tmp);
    os << serialize_trace(trace);
  }
  std::filesystem::rename(tmp, path);
}

MissionTrace load_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open trace file: " + path);
  MissionTrace trace;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    const std::string type = j.at("type");
    if (type == "header") {
      trace.scenario_name = j.at("scenario");
      trace.label = j.at("label");
      trace.seed = j.at("seed");
      trace.time_budget = j.at("time_budget");
      trace.frame_period = j.at("frame_period");
      for (const auto& e : j.at("eois")) {
        trace.gt_eois.emplace_back(e.at("id"), vec3_from(e.at("pos")));
      }
      for (const auto& poly : j.at("kozs")) {
        Polygon2D p;
        for (const auto& v : poly) p.vertices.emplace_back(v[0], v[1]);
        trace.raw_kozs.push_back(std::move(p));
      }
      for (auto it = j.at("config").begin(); it != j.at("config").end(); ++it) {
        trace.config_echo[it.key()] = it.value().get<std::string>();
      }
    } else if (type == "frame") {
      TraceFrame f;
      f.t = j.at("t");
      f.position = vec3_from(j.at("pos"));
      f.yaw = j.at("yaw");
      f.detections = j.at("dets");
      f.tracks = j.at("tracks");
      trace.frames.push_back(f);
    } else if (type == "report" || type == "offline_report") {
      EoiReport r;
      r.eoi_id = j.at("eoi");
      r.timestamp = j.at("t");
      r.reported_position = vec3_from(j.at("pos"));
      r.confidence = j.at("confidence");
      r.online = (type == "report");
      (r.online ? trace.online_reports : trace.offline_reports).push_back(r);
    } else if (type == "coverage") {
      CoverageEvent c;
      c.t = j.at("t");
      c.aoi_id = j.at("aoi");
      c.fraction = j.at("fraction");
      const std::string outcome = j.at("outcome");
      if (outcome == "completed") c.outcome = CoverageOutcome::completed;
      else if (outcome == "time_expired") c.outcome = CoverageOutcome::time_expired;
      else if (outcome == "eois_found") c.outcome = CoverageOutcome::eois_found;
      else c.outcome = CoverageOutcome::preempted;
      trace.coverage_events.push_back(std::move(c));
    } else if (type == "outcome") {
      trace.end_time = j.at("end_t");
      trace.end_reason = j.at("end_reason");
      for (auto it = j.at("found").begin(); it != j.at("found").end(); ++it) {
        trace.first_report_time[it.key()] = it.value();
      }
    } else if (type == "warning") {
      trace.warnings.push_back(j.at("message"));
    } else if (type == "plan") {
      PlanEvent p;
      p.t = j.at("t");
      p.plan.expected_gain = j.at("expected_gain");
      p.plan.total_time = j.at("total_time");
      p.plan.travel_time = j.at("travel_time");
      p.plan.infeasible = j.at("infeasible");
      for (const auto& leg : j.at("legs")) {
        ItineraryLeg l;
        l.aoi_id = leg[0];
        l.allocated_time = leg[1];
        p.plan.legs.push_back(std::move(l));
      }
      trace.plans.push_back(std::move(p));
    }
  }
  return trace;
}

}  // namespace neusis
