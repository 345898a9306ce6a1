#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "neusis/mission.hpp"

namespace neusis {

struct MatchResult {
  // (report index, eoi index) accepted pairs, at most one per EOI.
  std::vector<std::pair<int, int>> matches;
  std::vector<int> duplicates;       // extra in-radius reports for matched EOIs
  std::vector<int> false_positives;  // out-of-radius or unknown-id reports
  std::vector<int> missed_eois;      // EOI indices with no accepted report
};

// Greedy minimum-distance one-to-one matching between each EOI and the
// reports claiming its id, accepting pairs within `radius`.
MatchResult match_reports(const std::vector<EoiReport>& reports,
                          const std::vector<std::pair<std::string, Vec3>>& gt,
                          double radius);

struct PrfCounts {
  int matched = 0;
  int false_positives = 0;
  int duplicates = 0;
  int total_eois = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // no reports at all
};

enum class ReportMode { online, offline };

struct MetricsSummary {
  std::string label;
  int missions = 0;
  int total_eois = 0;
  double success_rate_micro = 0.0;  // matched EOIs / total EOIs
  double success_rate_macro = 0.0;  // mean per-mission rate
  PrfCounts online;
  PrfCounts offline;
  std::array<std::optional<double>, 4> search_times;  // 1st..4th
  // Mean 3D error of matched offline reports (localization quality).
  double mean_matched_error = 0.0;
  int matched_error_count = 0;
};

double success_rate(const std::vector<MissionTrace>& traces, double radius);
PrfCounts prf(const std::vector<MissionTrace>& traces, ReportMode mode,
              double radius);
std::array<std::optional<double>, 4> search_times(
    const std::vector<MissionTrace>& traces, double radius);

MetricsSummary evaluate_traces(const std::vector<MissionTrace>& traces,
                               double radius, const std::string& label = "");

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsSummary& m);
std::string metrics_markdown_table(const std::vector<MetricsSummary>& rows);

}  // namespace neusis
