#include "neusis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace neusis {

MatchResult match_reports(const std::vector<EoiReport>& reports,
                          const std::vector<std::pair<std::string, Vec3>>& gt,
                          double radius) {
  MatchResult result;
  std::set<int> claimed_valid;  // report indices accounted for
  for (std::size_t e = 0; e < gt.size(); ++e) {
    // Reports claiming this EOI id, closest first; ties by report order.
    std::vector<std::pair<double, int>> candidates;
    for (std::size_t r = 0; r < reports.size(); ++r) {
      if (reports[r].eoi_id != gt[e].first) continue;
      const double d = (reports[r].reported_position - gt[e].second).norm();
      candidates.emplace_back(d, static_cast<int>(r));
    }
    std::sort(candidates.begin(), candidates.end());
    bool matched = false;
    for (const auto& [d, r] : candidates) {
      if (d > radius) break;
      if (!matched) {
        result.matches.emplace_back(r, static_cast<int>(e));
        matched = true;
      } else {
        result.duplicates.push_back(r);
      }
      claimed_valid.insert(r);
    }
    if (!matched) result.missed_eois.push_back(static_cast<int>(e));
  }
  for (std::size_t r = 0; r < reports.size(); ++r) {
    if (claimed_valid.count(static_cast<int>(r)) == 0) {
      result.false_positives.push_back(static_cast<int>(r));
    }
  }
  return result;
}

double success_rate(const std::vector<MissionTrace>& traces, double radius) {
  int matched = 0;
  int total = 0;
  for (const auto& trace : traces) {
    total += static_cast<int>(trace.gt_eois.size());
    for (const auto& [id, pos] : trace.gt_eois) {
      bool ok = false;
      for (const auto& r : trace.online_reports) {
        if (r.eoi_id == id && (r.reported_position - pos).norm() <= radius) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        for (const auto& r : trace.offline_reports) {
          if (r.eoi_id == id && (r.reported_position - pos).norm() <= radius) {
            ok = true;
            break;
          }
        }
      }
      if (ok) ++matched;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(matched) / total;
}

PrfCounts prf(const std::vector<MissionTrace>& traces, ReportMode mode,
              double radius) {
  PrfCounts counts;
  int reports_seen = 0;
  for (const auto& trace : traces) {
    const auto& reports = mode == ReportMode::online ? trace.online_reports
                                                     : trace.offline_reports;
    reports_seen += static_cast<int>(reports.size());
    const MatchResult m = match_reports(reports, trace.gt_eois, radius);
    counts.matched += static_cast<int>(m.matches.size());
    counts.false_positives += static_cast<int>(m.false_positives.size());
    counts.duplicates += static_cast<int>(m.duplicates.size());
    counts.total_eois += static_cast<int>(trace.gt_eois.size());
  }
  const int distinct_claims = counts.matched + counts.false_positives;
  counts.precision_undefined = reports_seen == 0;
  counts.precision = distinct_claims == 0
                         ? 0.0
                         : static_cast<double>(counts.matched) / distinct_claims;
  counts.recall = counts.total_eois == 0
                      ? 0.0
                      : static_cast<double>(counts.matched) / counts.total_eois;
  counts.f1 = (counts.precision + counts.recall) <= 0.0
                  ? 0.0
                  : 2.0 * counts.precision * counts.recall /
                        (counts.precision + counts.recall);
  return counts;
}

std::array<std::optional<double>, 4> search_times(
    const std::vector<MissionTrace>& traces, double radius) {
  std::array<std::vector<double>, 4> per_rank;
  for (const auto& trace : traces) {
    // First correct online report per EOI.
    std::vector<double> firsts;
    for (const auto& [id, pos] : trace.gt_eois) {
      double first = -1.0;
      for (const auto& r : trace.online_reports) {
        if (r.eoi_id != id) continue;
        if ((r.reported_position - pos).norm() > radius) continue;
        if (first < 0.0 || r.timestamp < first) first = r.timestamp;
      }
      if (first >= 0.0) firsts.push_back(first);
    }
    std::sort(firsts.begin(), firsts.end());
    for (std::size_t k = 0; k < firsts.size() && k < 4; ++k) {
      per_rank[k].push_back(firsts[k]);
    }
  }
  std::array<std::optional<double>, 4> out;
  for (std::size_t k = 0; k < 4; ++k) {
    if (per_rank[k].empty()) continue;
    double sum = 0.0;
    for (double v : per_rank[k]) sum += v;
    out[k] = sum / static_cast<double>(per_rank[k].size());
  }
  return out;
}

MetricsSummary evaluate_traces(const std::vector<MissionTrace>& traces,
                               double radius, const std::string& label) {
  MetricsSummary summary;
  summary.label = label;
  summary.missions = static_cast<int>(traces.size());
  for (const auto& trace : traces) {
    summary.total_eois += static_cast<int>(trace.gt_eois.size());
  }
  summary.success_rate_micro = success_rate(traces, radius);
  double macro = 0.0;
  int macro_count = 0;
  for (const auto& trace : traces) {
    if (trace.gt_eois.empty()) continue;
    macro += success_rate({trace}, radius);
    ++macro_count;
  }
  summary.success_rate_macro = macro_count == 0 ? 0.0 : macro / macro_count;
  summary.online = prf(traces, ReportMode::online, radius);
  summary.offline = prf(traces, ReportMode::offline, radius);
  summary.search_times = search_times(traces, radius);

  double err_sum = 0.0;
  int err_count = 0;
  for (const auto& trace : traces) {
    const MatchResult m = match_reports(trace.offline_reports, trace.gt_eois, radius);
    for (const auto& [r, e] : m.matches) {
      err_sum += (trace.offline_reports[static_cast<std::size_t>(r)].reported_position -
                  trace.gt_eois[static_cast<std::size_t>(e)].second)
                     .norm();
      ++err_count;
    }
  }
  summary.mean_matched_error = err_count == 0 ? 0.0 : err_sum / err_count;
  summary.matched_error_count = err_count;
  return summary;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fmt_time(const std::optional<double>& t) {
  if (!t) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *t);
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "label,missions,total_eois,sr_micro,sr_macro,f1_offline,f1_online,"
         "precision_offline,precision_online,recall_offline,recall_online,"
         "match_error,match_count,t1,t2,t3,t4";
}

std::string metrics_csv_row(const MetricsSummary& m) {
  std::ostringstream os;
  os << m.label << "," << m.missions << "," << m.total_eois << ","
     << fmt(m.success_rate_micro) << "," << fmt(m.success_rate_macro) << ","
     << fmt(m.offline.f1) << "," << fmt(m.online.f1) << ","
     << fmt(m.offline.precision) << "," << fmt(m.online.precision) << ","
     << fmt(m.offline.recall) << "," << fmt(m.online.recall) << ","
     << fmt(m.mean_matched_error) << "," << m.matched_error_count;
  for (const auto& t : m.search_times) os << "," << fmt_time(t);
  return os.str();
}

std::string metrics_markdown_table(const std::vector<MetricsSummary>& rows) {
  std::ostringstream os;
  os << "| Config | SR | F1 (off) | F1 (on) | P (off) | P (on) | R (off) | "
        "R (on) | 1st | 2nd | 3rd | 4th |\n";
  os << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& m : rows) {
    os << "| " << m.label << " | " << fmt(100.0 * m.success_rate_micro) << " | "
       << fmt(100.0 * m.offline.f1) << " | " << fmt(100.0 * m.online.f1)
       << " | " << fmt(100.0 * m.offline.precision) << " | "
       << fmt(100.0 * m.online.precision) << " | "
       << fmt(100.0 * m.offline.recall) << " | " << fmt(100.0 * m.online.recall);
    for (const auto& t : m.search_times) os << " | " << fmt_time(t);
    os << " |\n";
  }
  return os.str();
}

}  // namespace neusis
