#pragma once

// Flag-sharing detectors, hint-latency statistics, per-player metrics and
// rank correlation, all computed from an event log and the game definition.
// Every function here is a pure function of its arguments.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flagtrail/model.hpp"

namespace flagtrail {

enum class IncidentKind : std::uint8_t { TimeVicinity, CrossFlag, MissingDownload, QuickChainSolve };
enum class Severity : std::uint8_t { Strong, Weak };  // Strong sorts first

const char* to_string(IncidentKind k);
const char* to_string(Severity s);
IncidentKind parse_incident_kind(std::string_view text);

/// Time vicinity is weak evidence; the other three detectors are strong.
Severity severity_of(IncidentKind k);

struct Incident {
  IncidentKind kind = IncidentKind::TimeVicinity;
  Severity severity = Severity::Weak;
  std::vector<std::string> players;  // 2 for time_vicinity (sorted), else 1
  std::string challenge_id;          // the challenge the finding is about
  std::string related_challenge_id;  // cross_flag: challenge whose flag was used; quick solve: predecessor
  std::vector<std::uint64_t> event_seqs;  // evidence events in the log
  Timestamp at{};                          // time of the latest evidence event
  std::optional<Duration> delta;           // vicinity gap, chain delta, or cross-flag lag
  std::optional<Duration> threshold;       // vicinity window or min solve time

  bool operator==(const Incident&) const = default;
};

/// Identity of an incident independent of evidence details.
struct IncidentKey {
  IncidentKind kind = IncidentKind::TimeVicinity;
  std::vector<std::string> players;
  std::string challenge_id;

  auto operator<=>(const IncidentKey&) const = default;
};

IncidentKey key_of(const Incident& incident);

struct VicinityCurvePoint {
  std::string challenge_id;
  long long window_minutes = 0;
  long long cumulative_pairs = 0;
};

struct TimeVicinityResult {
  std::vector<Incident> incidents;
  std::vector<VicinityCurvePoint> curve;  // 1-minute steps from 0 to the window, per challenge
};

struct ChainDelta {
  std::string chain_id;
  std::string from_challenge;
  std::string to_challenge;
  std::string player_id;
  Duration delta{};
  Duration min_solve{};
};

struct QuickSolveResult {
  std::vector<Incident> incidents;
  std::vector<ChainDelta> deltas;
};

/// First correct submission per (player, challenge), in log order.
struct Solve {
  std::string player_id;
  std::string challenge_id;
  Timestamp at{};
  std::uint64_t seq = 0;
};
std::vector<Solve> correct_solves(std::span<const GameEvent> log);

/// Pairs of distinct players whose correct submissions for the same challenge
/// are at most `window` apart. Throws Error(InvalidArgument) for window <= 0.
TimeVicinityResult detect_time_vicinity(std::span<const GameEvent> log, Duration window);

/// Wrong or locked-rejected submissions whose trimmed text is another
/// challenge's flag.
std::vector<Incident> detect_cross_flag(std::span<const GameEvent> log, const GameConfig& config);

enum class DownloadRule : std::uint8_t { AnyRequired, AllRequired };

/// Solves of challenges with required assets that were not preceded by a
/// download by the same player.
std::vector<Incident> detect_missing_download(std::span<const GameEvent> log, const GameConfig& config,
                                              DownloadRule rule = DownloadRule::AnyRequired);

/// Consecutive chain solves faster than the successor's minimal solve time.
QuickSolveResult detect_quick_chain_solves(std::span<const GameEvent> log, const GameConfig& config);

struct IncidentReportOptions {
  std::optional<Duration> window;  // defaults to config.vicinity_window
  DownloadRule download_rule = DownloadRule::AnyRequired;
};

/// All four detectors merged and sorted by (severity, first player, time, kind, challenge).
std::vector<Incident> incident_report(std::span<const GameEvent> log, const GameConfig& config,
                                      const IncidentReportOptions& options = {});

// ---------------------------------------------------------------------------

struct DistributionSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

/// Quartiles by linear interpolation between order statistics. Requires a
/// non-empty sample.
DistributionSummary summarize(std::vector<double> values);

struct HintLatencyStats {
  std::string hint_id;
  std::string challenge_id;
  std::size_t display_count = 0;
  std::vector<std::pair<std::string, Duration>> latencies;  // (player, solve - display)
  std::optional<DistributionSummary> seconds;  // over latencies, in seconds
};

/// Per-hint latency between display and the player's correct submission,
/// for hints displayed at least `min_displays` times.
std::vector<HintLatencyStats> hint_latency_report(std::span<const GameEvent> log, const GameConfig& config,
                                                  std::size_t min_displays = 11);

struct PlayerMetrics {
  std::string player_id;
  long long total_score = 0;            // non-bonus points minus hint costs
  long long bonus_inclusive_score = 0;  // all points minus hint costs
  long long wrong_flag_count = 0;
  Duration session_duration{};
  std::optional<Duration> first_to_last_solve;

  bool operator==(const PlayerMetrics&) const = default;
};

/// One row per player account that appears in the log, sorted by player id.
std::vector<PlayerMetrics> player_metrics(std::span<const GameEvent> log, const GameConfig& config,
                                          Duration session_gap = minutes(30));

/// Active time: sum over runs of events no more than `gap` apart of (last - first).
Duration session_duration(std::span<const Timestamp> sorted_times, Duration gap);

// ---------------------------------------------------------------------------

struct CorrelationResult {
  std::string variable_x;
  std::string variable_y;
  std::size_t n = 0;
  double rho = 0;
  double p_value = 1;
};

struct SpearmanOptions {
  std::size_t permutations = 10'000;
  std::uint64_t seed = 20200101;
};

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average-rank vectors with a two-sided permutation
/// p-value. Throws Error(InvalidArgument) on length mismatch, n < 3 or a
/// constant input.
CorrelationResult spearman(std::span<const double> xs, std::span<const double> ys, const SpearmanOptions& options = {});

/// External marks: player id -> (column -> value).
struct MarksTable {
  std::vector<std::string> columns;
  std::map<std::string, std::map<std::string, double>> rows;
};

struct CorrelationEntry {
  CorrelationResult result;
  bool masked = false;
  std::string reason;  // why masked: "p > 0.05", "fewer than 3 players", "constant input"
};

struct CorrelationReport {
  std::vector<std::string> variables;
  std::vector<CorrelationEntry> entries;  // upper triangle, row-major over `variables`
  double alpha = 0.05;
};

CorrelationReport correlation_report(const std::vector<PlayerMetrics>& metrics, const MarksTable& marks,
                                     const SpearmanOptions& options = {}, double alpha = 0.05);

}  // namespace flagtrail
