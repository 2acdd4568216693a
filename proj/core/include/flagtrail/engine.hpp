#pragma once

// Game rules over the event store: linear unlocking, flag adjudication,
// hint economics, scoring and the scoreboard.
//
// Every mutation follows the same path: decide, append the event, then apply
// it to the state with apply_event(). Replay runs apply_event() over a stored
// log, so live state and replayed state cannot diverge.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "flagtrail/event_store.hpp"
#include "flagtrail/model.hpp"

namespace flagtrail {

struct PlayerState {
  std::map<std::string, Timestamp> solved;           // challenge -> solve time
  std::set<std::string> unlocked;                    // chain members unlocked via challenge_unlock
  std::map<std::string, Timestamp> hints_displayed;  // hint -> first display
  std::set<std::string> hints_offered;
  std::map<std::string, Timestamp> first_view;  // challenge -> earliest challenge_view
  std::set<std::string> feedback_given;
  long long score = 0;
  bool logged_in = false;
  std::optional<Timestamp> last_solve_at;

  bool operator==(const PlayerState&) const = default;
};

struct GameState {
  std::map<std::string, PlayerState> players;
  std::map<std::string, int> solve_counts;
  std::uint64_t last_seq = 0;

  const PlayerState* player(std::string_view id) const;
  bool operator==(const GameState&) const = default;
};

struct HintSummary {
  std::string hint_id;
  int cost = 0;
  std::string topic_label;
  bool displayed = false;
};

struct ChallengeSummary {
  std::string challenge_id;
  std::string title;
  Category category = Category::Basic;
  int points = 0;
  bool solved = false;
  std::vector<HintSummary> hints;  // released hints only
};

struct AssetSummary {
  std::string asset_id;
  std::string filename;
};

struct ChallengeDetail {
  ChallengeSummary summary;
  std::string description;
  std::vector<AssetSummary> assets;
};

struct SubmitResult {
  Verdict verdict = Verdict::Wrong;
  int points_awarded = 0;
  std::uint64_t seq = 0;
};

struct HintOffer {
  std::string challenge_id;
  std::string hint_id;

  bool operator==(const HintOffer&) const = default;
};

struct AssetDownload {
  FileAsset asset;
  std::string bytes;
};

/// Whether `challenge_id` is visible to the player: not a chain member, a
/// chain head, or a member whose predecessor the player solved.
bool is_visible(const GameConfig& config, const GameState& state, std::string_view player_id,
                std::string_view challenge_id);

/// The verdict a submission receives in the given state. Does not check roles.
Verdict adjudicate(const GameConfig& config, const GameState& state, std::string_view player_id,
                   std::string_view challenge_id, std::string_view text, Timestamp now);

/// Checks `event` against the rules and folds it into `state`. Throws
/// ConsistencyError naming event.seq if the engine could not have produced it.
void apply_event(const GameConfig& config, GameState& state, const GameEvent& event);

/// Rebuilds state from a log by re-adjudicating every event.
GameState replay(const GameConfig& config, const std::vector<GameEvent>& events);

std::vector<ChallengeSummary> visible_challenges(const GameConfig& config, const GameState& state,
                                                 std::string_view player_id, Timestamp now);

/// Offers due at `now` without logging anything.
std::vector<HintOffer> due_hint_offers(const GameConfig& config, const GameState& state, std::string_view player_id,
                                       Timestamp now);

/// One entry per logged-in player account, pseudonymized with `salt`.
std::vector<ScoreboardEntry> scoreboard(const GameConfig& config, const GameState& state, std::string_view salt);

class Engine {
 public:
  using AssetSource = std::function<std::string(const FileAsset&)>;
  using HintListener = std::function<void(const Hint&)>;

  /// Replays whatever `store` already holds. The store must outlive the engine.
  Engine(GameConfig config, EventStore& store);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void set_asset_source(AssetSource source);
  /// Called (under the writer lock) after add_hint accepts a hint.
  void set_hint_listener(HintListener listener);

  GameConfig config() const;
  GameState state() const;
  const EventStore& store() const { return store_; }

  /// Throws Error(AuthFailure) for unknown tokens.
  PlayerRecord authenticate(std::string_view token) const;

  std::uint64_t login(std::string_view player_id, Timestamp now);

  std::vector<ChallengeSummary> visible_challenges(std::string_view player_id, Timestamp now) const;
  /// Logs a challenge_view. Locked or unknown challenges throw Error(NotFound).
  ChallengeDetail view_challenge(std::string_view player_id, std::string_view challenge_id, Timestamp now);
  SubmitResult submit_flag(std::string_view player_id, std::string_view challenge_id, std::string_view text,
                           Timestamp now);
  std::string display_hint(std::string_view player_id, std::string_view hint_id, Timestamp now);
  std::string add_hint(std::string_view instructor_id, std::string_view challenge_id, Hint hint, Timestamp now);
  /// Due offers not made before; each returned offer is logged as hint_offer.
  std::vector<HintOffer> pending_hint_offers(std::string_view player_id, Timestamp now);
  std::vector<ScoreboardEntry> scoreboard() const;
  std::uint64_t record_feedback(std::string_view player_id, std::string_view challenge_id, int rating,
                                std::optional<std::string> comment, Timestamp now);
  AssetDownload download_asset(std::string_view player_id, std::string_view asset_id, Timestamp now);

 private:
  const PlayerRecord& require_player(std::string_view player_id) const;
  std::uint64_t commit(std::string_view player_id, EventPayload payload, Timestamp now);

  mutable std::shared_mutex mutex_;
  GameConfig config_;
  EventStore& store_;
  GameState state_;
  AssetSource asset_source_;
  HintListener hint_listener_;
};

}  // namespace flagtrail
