#pragma once

// Static game definition and the shared event vocabulary.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flagtrail/time.hpp"

namespace flagtrail {

enum class Category : std::uint8_t { Basic, Medium, Advanced, BonusBasic, BonusMedium, BonusAdvanced };

enum class Role : std::uint8_t { Player, Instructor };

const char* to_string(Category c);
const char* to_string(Role r);
Category parse_category(std::string_view text);
Role parse_role(std::string_view text);
inline bool is_bonus_category(Category c) { return c >= Category::BonusBasic; }

struct Hint {
  std::string hint_id;
  std::string challenge_id;
  int cost = 0;
  std::string topic_label;
  std::string body;
  std::optional<Timestamp> released_at;  // absent: released with the challenge

  bool released_by(Timestamp now) const { return !released_at || *released_at <= now; }
  bool operator==(const Hint&) const = default;
};

struct FileAsset {
  std::string asset_id;
  std::string challenge_id;
  std::string filename;
  std::string content_digest;  // lowercase hex SHA-256
  bool required_for_solve = false;

  bool operator==(const FileAsset&) const = default;
};

struct Challenge {
  std::string challenge_id;
  std::string title;
  std::string description;
  Category category = Category::Basic;
  int points = 0;
  std::string flag;
  std::vector<Hint> hints;
  std::vector<FileAsset> assets;
  Duration min_solve{seconds(60)};
  bool is_bonus = false;

  bool operator==(const Challenge&) const = default;
};

struct Chain {
  std::string chain_id;
  std::vector<std::string> members;

  bool operator==(const Chain&) const = default;
};

struct PlayerRecord {
  std::string player_id;
  std::string display_name;
  std::string auth_token;
  Role role = Role::Player;

  bool operator==(const PlayerRecord&) const = default;
};

struct GameConfig {
  std::string game_id;
  std::string title;
  Timestamp opens_at{};
  Timestamp closes_at{};
  std::vector<Challenge> challenges;
  std::vector<Chain> chains;
  std::vector<PlayerRecord> players;
  std::string anonymization_salt;
  Duration hint_offer_dwell{minutes(30)};
  Duration vicinity_window{minutes(10)};
  int points_min = 5;
  int points_max = 25;
  std::string flag_pattern;  // ECMAScript regex, empty = any non-empty flag

  const Challenge* find_challenge(std::string_view id) const;
  Challenge* find_challenge(std::string_view id);
  const Hint* find_hint(std::string_view hint_id) const;
  const FileAsset* find_asset(std::string_view asset_id) const;
  const PlayerRecord* find_player(std::string_view player_id) const;
  const PlayerRecord* find_player_by_token(std::string_view token) const;

  /// Chain position of a challenge: the chain and the member index, if any.
  struct ChainPosition {
    const Chain* chain = nullptr;
    std::size_t index = 0;
  };
  std::optional<ChainPosition> chain_position(std::string_view challenge_id) const;
  /// The member that must be solved before `challenge_id` becomes visible.
  std::optional<std::string> predecessor(std::string_view challenge_id) const;
  std::optional<std::string> successor(std::string_view challenge_id) const;

  bool operator==(const GameConfig&) const = default;
};

/// Every invariant violation, one human-readable line each. Empty means valid.
std::vector<std::string> validate_config(const GameConfig& config);

/// Keyed pseudonym shown on the scoreboard, e.g. `quiet-heron-4f1a`.
/// Throws Error(InvalidArgument) for an empty player id.
std::string alias_for(std::string_view player_id, std::string_view salt);

/// Flags compare byte-exact after trimming surrounding whitespace.
std::string_view normalize_flag(std::string_view text);
bool flag_matches(const Challenge& challenge, std::string_view submitted);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

// ---------------------------------------------------------------------------
// Events

enum class EventKind : std::uint8_t {
  Login,
  ChallengeView,
  FileDownload,
  FlagSubmission,
  HintDisplay,
  HintOffer,
  ChallengeUnlock,
  FeedbackSubmit,
};

inline constexpr EventKind kAllEventKinds[] = {
    EventKind::Login,       EventKind::ChallengeView, EventKind::FileDownload,    EventKind::FlagSubmission,
    EventKind::HintDisplay, EventKind::HintOffer,     EventKind::ChallengeUnlock, EventKind::FeedbackSubmit,
};

const char* to_string(EventKind k);
EventKind parse_event_kind(std::string_view text);

enum class Verdict : std::uint8_t { Correct, Wrong, RejectedLocked, RejectedClosed, RejectedAlreadySolved };

const char* to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct LoginPayload {
  bool operator==(const LoginPayload&) const = default;
};
struct ChallengeViewPayload {
  std::string challenge_id;
  bool operator==(const ChallengeViewPayload&) const = default;
};
struct FileDownloadPayload {
  std::string asset_id;
  bool operator==(const FileDownloadPayload&) const = default;
};
struct FlagSubmissionPayload {
  std::string challenge_id;
  std::string submitted_text;
  Verdict verdict = Verdict::Wrong;
  bool operator==(const FlagSubmissionPayload&) const = default;
};
struct HintDisplayPayload {
  std::string hint_id;
  bool operator==(const HintDisplayPayload&) const = default;
};
struct HintOfferPayload {
  std::string challenge_id;
  std::string hint_id;
  bool operator==(const HintOfferPayload&) const = default;
};
struct ChallengeUnlockPayload {
  std::string challenge_id;
  bool operator==(const ChallengeUnlockPayload&) const = default;
};
struct FeedbackPayload {
  std::string challenge_id;
  int rating = 0;
  std::optional<std::string> comment;
  bool operator==(const FeedbackPayload&) const = default;
};

// Alternative order mirrors EventKind.
using EventPayload = std::variant<LoginPayload, ChallengeViewPayload, FileDownloadPayload, FlagSubmissionPayload,
                                  HintDisplayPayload, HintOfferPayload, ChallengeUnlockPayload, FeedbackPayload>;

struct GameEvent {
  std::uint64_t seq = 0;
  Timestamp at{};
  std::string player_id;
  EventPayload payload;

  EventKind kind() const { return static_cast<EventKind>(payload.index()); }
  /// Challenge the event concerns, when the payload names one directly.
  const std::string* challenge_id() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&payload);
  }

  bool operator==(const GameEvent&) const = default;
};

struct ScoreboardEntry {
  std::string alias;
  long long score = 0;
  std::optional<Timestamp> last_solve_at;
  int rank = 0;

  bool operator==(const ScoreboardEntry&) const = default;
};

/// Scoreboard order: score descending, earlier last solve first (no solve sorts
/// last), then alias ascending.
bool scoreboard_before(const ScoreboardEntry& a, const ScoreboardEntry& b);

}  // namespace flagtrail
