#pragma once

// Labeled synthetic event logs for detector testing and demos.
//
// Solve times are laid out in per-player lanes so that honest players never
// trip a detector: correct submissions of one challenge by different players
// are always more than the vicinity window apart, consecutive chain solves
// leave more than the successor's minimal solve time, and required files are
// downloaded first. Misbehavior is planted in separate time regions:
//
//   colluding pair (source, copier) on chain pair (a, b):
//     - copier submits b's flag to a while b is still locked  -> cross_flag
//     - copier solves a, then b shortly after                 -> quick_chain_solve
//     - copier submits b a short lag after the source         -> time_vicinity
//   non-downloader: solves one challenge with required files without
//     downloading any of them                                 -> missing_download

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flagtrail/analytics.hpp"
#include "flagtrail/engine.hpp"
#include "flagtrail/model.hpp"

namespace flagtrail {

struct LogNormalMinutes {
  double mu = 3.0;  // of ln(minutes)
  double sigma = 0.8;

  bool operator==(const LogNormalMinutes&) const = default;
};

struct CohortSpec {
  std::uint64_t seed = 7;
  std::size_t n_honest = 20;
  std::size_t n_colluding_pairs = 0;
  std::size_t n_non_downloaders = 0;

  // Keyed by difficulty: basic, medium, advanced (bonus categories map to these).
  std::map<std::string, LogNormalMinutes> work_minutes{
      {"basic", {3.0, 0.8}}, {"medium", {4.0, 0.9}}, {"advanced", {5.0, 1.0}}};
  std::map<std::string, double> solve_probability{{"basic", 0.95}, {"medium", 0.85}, {"advanced", 0.7}};
  double hint_probability = 0.4;
  double wrong_rate = 1.5;  // mean wrong submissions per attempted challenge
  double feedback_probability = 0.3;

  // Honesty margins beyond the detector thresholds.
  Duration vicinity_margin = minutes(1);
  Duration chain_margin = seconds(30);

  // Copier behavior.
  Duration lag_min = seconds(14);
  Duration quick_min = seconds(9);

  bool operator==(const CohortSpec&) const = default;
};

CohortSpec parse_cohort_spec(const std::string& yaml_text);
std::string serialize_cohort_spec(const CohortSpec& spec);

struct GroundTruth {
  std::vector<IncidentKey> expected;  // sorted
};

struct SynthResult {
  std::vector<GameEvent> log;
  GroundTruth truth;
};

/// Deterministic for a fixed cohort spec and config. Players are taken from the
/// config's player accounts in order: colluding pairs first, then
/// non-downloaders, then honest players. Throws Error(InvalidArgument) when
/// the cohort margins or counts do not fit the config.
SynthResult generate(const CohortSpec& spec, const GameConfig& config);

/// Imports `log` into a fresh store and replays it through an Engine.
/// Throws ConsistencyError naming the first event the rules reject.
GameState replay_log(const std::vector<GameEvent>& log, const GameConfig& config);

}  // namespace flagtrail
