#include "flagtrail/model.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <array>
#include <map>
#include <regex>
#include <set>

#include "flagtrail/error.hpp"

namespace flagtrail {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::AppendFailed: return "append-failed";
    case ErrorCode::ImportFailed: return "import-failed";
    case ErrorCode::PreconditionViolation: return "precondition-violation";
    case ErrorCode::RejectedLocked: return "rejected-locked";
    case ErrorCode::Forbidden: return "forbidden";
    case ErrorCode::AuthFailure: return "auth-failure";
    case ErrorCode::ConsistencyViolation: return "consistency-violation";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::pair<Category, const char*>, 6> kCategoryNames{{
    {Category::Basic, "basic"},
    {Category::Medium, "medium"},
    {Category::Advanced, "advanced"},
    {Category::BonusBasic, "bonus-basic"},
    {Category::BonusMedium, "bonus-medium"},
    {Category::BonusAdvanced, "bonus-advanced"},
}};

constexpr std::array<const char*, 8> kEventKindNames{
    "login",       "challenge_view", "file_download",    "flag_submission",
    "hint_display", "hint_offer",    "challenge_unlock", "feedback_submit",
};

constexpr std::array<const char*, 5> kVerdictNames{
    "correct", "wrong", "rejected_locked", "rejected_closed", "rejected_already_solved",
};

// 64 x 64 words, indexed by keyed-hash bytes.
constexpr std::array<const char*, 64> kAdjectives{
    "amber",  "ancient", "azure",  "bold",   "brave",  "bright", "brisk",  "calm",   "clever", "cobalt", "cosmic",
    "crisp",  "curious", "daring", "dawn",   "deft",   "eager",  "early",  "fancy",  "fierce", "gentle", "glad",
    "golden", "grand",   "happy",  "hidden", "humble", "icy",    "jolly",  "keen",   "kind",   "lively", "lucky",
    "lunar",  "mellow",  "merry",  "mighty", "misty",  "noble",  "nimble", "olive",  "proud",  "quick",  "quiet",
    "rapid",  "royal",   "rustic", "scarlet", "silent", "silver", "sleek",  "smooth", "solar",  "steady", "stormy",
    "sunny",  "swift",   "tidy",   "urban",  "vivid",  "wild",   "wise",   "witty",  "zesty",
};
constexpr std::array<const char*, 64> kAnimals{
    "badger", "bear",    "beaver",  "bison",   "bobcat",  "camel",  "cheetah", "cobra",  "condor", "coyote", "crane",
    "crow",   "deer",    "dingo",   "dolphin", "eagle",   "falcon", "ferret",  "finch",  "fox",    "gecko",  "gibbon",
    "heron",  "hornet",  "husky",   "ibex",    "iguana",  "jackal", "jaguar",  "koala",  "lemur",  "leopard", "lion",
    "lynx",   "magpie",  "marmot",  "marten",  "mole",    "moose",  "narwhal", "newt",   "ocelot", "orca",   "osprey",
    "otter",  "owl",     "panda",   "panther", "pelican", "puffin", "quail",   "raven",  "salmon", "seal",   "shark",
    "sparrow", "stork",  "swan",    "tapir",   "tiger",   "toucan", "viper",   "walrus", "wolf",
};

template <class Enum, std::size_t N>
Enum lookup(const std::array<const char*, N>& names, std::string_view text, const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (text == names[i]) return static_cast<Enum>(i);
  }
  throw Error(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + std::string(text) + "'");
}

std::string to_hex(const unsigned char* data, std::size_t len) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xf]);
  }
  return out;
}

}  // namespace

const char* to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)].second; }

const char* to_string(Role r) { return r == Role::Instructor ? "instructor" : "player"; }

Category parse_category(std::string_view text) {
  for (const auto& [cat, name] : kCategoryNames) {
    if (text == name) return cat;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown category '" + std::string(text) + "'");
}

Role parse_role(std::string_view text) {
  if (text == "player") return Role::Player;
  if (text == "instructor") return Role::Instructor;
  throw Error(ErrorCode::InvalidArgument, "unknown role '" + std::string(text) + "'");
}

const char* to_string(EventKind k) { return kEventKindNames[static_cast<std::size_t>(k)]; }

EventKind parse_event_kind(std::string_view text) { return lookup<EventKind>(kEventKindNames, text, "event kind"); }

const char* to_string(Verdict v) { return kVerdictNames[static_cast<std::size_t>(v)]; }

Verdict parse_verdict(std::string_view text) { return lookup<Verdict>(kVerdictNames, text, "verdict"); }

const Challenge* GameConfig::find_challenge(std::string_view id) const {
  auto it = std::find_if(challenges.begin(), challenges.end(), [&](const Challenge& c) { return c.challenge_id == id; });
  return it == challenges.end() ? nullptr : &*it;
}

Challenge* GameConfig::find_challenge(std::string_view id) {
  return const_cast<Challenge*>(static_cast<const GameConfig*>(this)->find_challenge(id));
}

const Hint* GameConfig::find_hint(std::string_view hint_id) const {
  for (const auto& c : challenges) {
    for (const auto& h : c.hints) {
      if (h.hint_id == hint_id) return &h;
    }
  }
  return nullptr;
}

const FileAsset* GameConfig::find_asset(std::string_view asset_id) const {
  for (const auto& c : challenges) {
    for (const auto& a : c.assets) {
      if (a.asset_id == asset_id) return &a;
    }
  }
  return nullptr;
}

const PlayerRecord* GameConfig::find_player(std::string_view player_id) const {
  auto it = std::find_if(players.begin(), players.end(), [&](const PlayerRecord& p) { return p.player_id == player_id; });
  return it == players.end() ? nullptr : &*it;
}

const PlayerRecord* GameConfig::find_player_by_token(std::string_view token) const {
  if (token.empty()) return nullptr;
  auto it = std::find_if(players.begin(), players.end(), [&](const PlayerRecord& p) { return p.auth_token == token; });
  return it == players.end() ? nullptr : &*it;
}

std::optional<GameConfig::ChainPosition> GameConfig::chain_position(std::string_view challenge_id) const {
  for (const auto& chain : chains) {
    for (std::size_t i = 0; i < chain.members.size(); ++i) {
      if (chain.members[i] == challenge_id) return ChainPosition{&chain, i};
    }
  }
  return std::nullopt;
}

std::optional<std::string> GameConfig::predecessor(std::string_view challenge_id) const {
  auto pos = chain_position(challenge_id);
  if (!pos || pos->index == 0) return std::nullopt;
  return pos->chain->members[pos->index - 1];
}

std::optional<std::string> GameConfig::successor(std::string_view challenge_id) const {
  auto pos = chain_position(challenge_id);
  if (!pos || pos->index + 1 >= pos->chain->members.size()) return std::nullopt;
  return pos->chain->members[pos->index + 1];
}

std::vector<std::string> validate_config(const GameConfig& config) {
  std::vector<std::string> out;
  auto violation = [&](std::string msg) { out.push_back(std::move(msg)); };

  if (config.game_id.empty()) violation("game_id is empty");
  if (!(config.opens_at < config.closes_at)) violation("opens_at must be before closes_at");
  if (config.vicinity_window <= Duration::zero()) violation("vicinity_window must be positive");
  if (config.hint_offer_dwell <= Duration::zero()) violation("hint_offer_dwell must be positive");
  if (config.points_min > config.points_max) violation("points range is empty");

  std::optional<std::regex> pattern;
  if (!config.flag_pattern.empty()) {
    try {
      pattern.emplace(config.flag_pattern, std::regex::ECMAScript);
    } catch (const std::regex_error&) {
      violation("flag_pattern '" + config.flag_pattern + "' is not a valid regular expression");
    }
  }

  std::set<std::string> challenge_ids, hint_ids, asset_ids;
  std::map<std::string, std::string> flag_owner;
  for (const auto& c : config.challenges) {
    const std::string where = "challenge '" + c.challenge_id + "'";
    if (c.challenge_id.empty()) violation("challenge with empty id");
    if (!challenge_ids.insert(c.challenge_id).second) violation("duplicate challenge id '" + c.challenge_id + "'");
    if (c.points < config.points_min || c.points > config.points_max) {
      violation(where + ": points " + std::to_string(c.points) + " outside range " + std::to_string(config.points_min) +
                "-" + std::to_string(config.points_max));
    }
    const auto flag = normalize_flag(c.flag);
    if (flag.empty()) {
      violation(where + ": flag is empty");
    } else {
      if (pattern && !std::regex_match(flag.begin(), flag.end(), *pattern)) {
        violation(where + ": flag does not match flag_pattern");
      }
      auto [it, inserted] = flag_owner.emplace(std::string(flag), c.challenge_id);
      if (!inserted) violation(where + ": flag identical to challenge '" + it->second + "'");
    }
    if (c.min_solve <= Duration::zero()) violation(where + ": min_solve must be positive");
    if (c.is_bonus != is_bonus_category(c.category)) violation(where + ": is_bonus disagrees with category");
    for (const auto& h : c.hints) {
      if (h.hint_id.empty()) violation(where + ": hint with empty id");
      if (!hint_ids.insert(h.hint_id).second) violation("duplicate hint id '" + h.hint_id + "'");
      if (h.challenge_id != c.challenge_id) violation("hint '" + h.hint_id + "' names a different challenge");
      if (h.cost < 0) violation("hint '" + h.hint_id + "': negative cost");
      if (h.topic_label.empty()) violation("hint '" + h.hint_id + "': topic_label is empty");
    }
    for (const auto& a : c.assets) {
      if (a.asset_id.empty()) violation(where + ": asset with empty id");
      if (!asset_ids.insert(a.asset_id).second) violation("duplicate asset id '" + a.asset_id + "'");
      if (a.challenge_id != c.challenge_id) violation("asset '" + a.asset_id + "' names a different challenge");
      if (a.filename.empty()) violation("asset '" + a.asset_id + "': filename is empty");
    }
  }

  std::set<std::string> chain_ids;
  std::map<std::string, std::string> member_of;
  for (const auto& chain : config.chains) {
    const std::string where = "chain '" + chain.chain_id + "'";
    if (!chain_ids.insert(chain.chain_id).second) violation("duplicate chain id '" + chain.chain_id + "'");
    if (chain.members.size() < 2) violation(where + ": needs at least 2 members");
    for (const auto& m : chain.members) {
      if (!challenge_ids.count(m)) {
        violation(where + ": unknown challenge '" + m + "'");
        continue;
      }
      auto [it, inserted] = member_of.emplace(m, chain.chain_id);
      if (!inserted) {
        violation("challenge '" + m + "' appears in both chain '" + it->second + "' and " + where);
      }
    }
  }

  std::set<std::string> player_ids, tokens;
  std::map<std::string, std::string> aliases;
  for (const auto& p : config.players) {
    if (p.player_id.empty()) {
      violation("player with empty id");
      continue;
    }
    if (!player_ids.insert(p.player_id).second) violation("duplicate player id '" + p.player_id + "'");
    if (p.auth_token.empty()) violation("player '" + p.player_id + "': auth_token is empty");
    else if (!tokens.insert(p.auth_token).second) violation("player '" + p.player_id + "': auth_token not unique");
    auto [it, inserted] = aliases.emplace(alias_for(p.player_id, config.anonymization_salt), p.player_id);
    if (!inserted && it->second != p.player_id) {
      violation("alias collision between players '" + it->second + "' and '" + p.player_id + "'");
    }
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  return to_hex(md, len);
}

std::string alias_for(std::string_view player_id, std::string_view salt) {
  if (player_id.empty()) throw Error(ErrorCode::InvalidArgument, "alias_for: empty player id");
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
       reinterpret_cast<const unsigned char*>(player_id.data()), player_id.size(), md, &len);
  std::string alias = kAdjectives[md[0] & 63];
  alias += '-';
  alias += kAnimals[md[1] & 63];
  alias += '-';
  alias += to_hex(md + 2, 2);
  return alias;
}

std::string_view normalize_flag(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

bool flag_matches(const Challenge& challenge, std::string_view submitted) {
  const auto expected = normalize_flag(challenge.flag);
  return !expected.empty() && normalize_flag(submitted) == expected;
}

const std::string* GameEvent::challenge_id() const {
  return std::visit(
      [](const auto& p) -> const std::string* {
        using T = std::decay_t<decltype(p)>;
        if constexpr (requires { p.challenge_id; }) {
          return &p.challenge_id;
        } else {
          (void)sizeof(T);
          return nullptr;
        }
      },
      payload);
}

bool scoreboard_before(const ScoreboardEntry& a, const ScoreboardEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.last_solve_at != b.last_solve_at) {
    if (!a.last_solve_at) return false;
    if (!b.last_solve_at) return true;
    return *a.last_solve_at < *b.last_solve_at;
  }
  return a.alias < b.alias;
}

}  // namespace flagtrail
