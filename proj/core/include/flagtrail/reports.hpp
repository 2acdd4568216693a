#pragma once

// Report renderings and the file formats around analytics.
//
// Structured reports are JSON documents; plain-text renderings are meant for
// people. Plot data and external marks are comma-separated with a header row:
//
//   vicinity_pairs.csv   challenge_id,window_minutes,cumulative_pairs
//   chain_deltas.csv     chain_id,from_challenge,to_challenge,player_id,delta_seconds,min_solve_seconds
//   hint_latency.csv     hint_id,challenge_id,player_id,latency_seconds
//   marks (input)        player_id,<column>,<column>,...   (empty cell = missing)

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "flagtrail/analytics.hpp"

namespace flagtrail {

std::string incidents_json(const std::vector<Incident>& incidents);
std::string incidents_text(const std::vector<Incident>& incidents);

std::string hint_latency_json(const std::vector<HintLatencyStats>& stats);
std::string hint_latency_text(const std::vector<HintLatencyStats>& stats);

std::string metrics_json(const std::vector<PlayerMetrics>& metrics);
std::string metrics_text(const std::vector<PlayerMetrics>& metrics);

std::string correlations_json(const CorrelationReport& report);
std::string correlations_text(const CorrelationReport& report);

std::string vicinity_curve_csv(const std::vector<VicinityCurvePoint>& curve);
std::string chain_deltas_csv(const std::vector<ChainDelta>& deltas);
std::string hint_latency_csv(const std::vector<HintLatencyStats>& stats);

/// Throws ImportError naming the offending line.
MarksTable parse_marks_csv(const std::string& text);

/// One JSON object per line: {"kind":..., "players":[...], "challenge":...}.
std::string encode_incident_keys(const std::vector<IncidentKey>& keys);
std::vector<IncidentKey> decode_incident_keys(const std::string& text);

enum class ReportKind { Incidents, HintLatency, Metrics, Correlations, Plots };
enum class ReportFormat { Json, Text };

/// Accepts incidents, hint-latency (or hints), metrics, correlations, plots, all.
std::set<ReportKind> parse_report_list(const std::string& comma_separated);

struct AnalysisOptions {
  std::set<ReportKind> reports{ReportKind::Incidents, ReportKind::HintLatency, ReportKind::Metrics,
                               ReportKind::Correlations, ReportKind::Plots};
  ReportFormat format = ReportFormat::Json;
  std::optional<Duration> window;
  std::size_t min_displays = 11;
  Duration session_gap = minutes(30);
  SpearmanOptions spearman;
  DownloadRule download_rule = DownloadRule::AnyRequired;
  MarksTable marks;
};

/// File name -> content for every selected report.
std::map<std::string, std::string> run_analysis(const std::vector<GameEvent>& log, const GameConfig& config,
                                                const AnalysisOptions& options);

}  // namespace flagtrail
