#include "flagtrail/engine.hpp"

#include <algorithm>
#include <mutex>

#include "flagtrail/error.hpp"

namespace flagtrail {

const PlayerState* GameState::player(std::string_view id) const {
  auto it = players.find(std::string(id));
  return it == players.end() ? nullptr : &it->second;
}

bool is_visible(const GameConfig& config, const GameState& state, std::string_view player_id,
                std::string_view challenge_id) {
  const auto pred = config.predecessor(challenge_id);
  if (!pred) return true;
  const auto* ps = state.player(player_id);
  return ps && ps->solved.count(*pred);
}

Verdict adjudicate(const GameConfig& config, const GameState& state, std::string_view player_id,
                   std::string_view challenge_id, std::string_view text, Timestamp now) {
  const auto* challenge = config.find_challenge(challenge_id);
  if (!challenge) throw Error(ErrorCode::NotFound, "unknown challenge '" + std::string(challenge_id) + "'");
  if (now < config.opens_at || now >= config.closes_at) return Verdict::RejectedClosed;
  if (!is_visible(config, state, player_id, challenge_id)) return Verdict::RejectedLocked;
  const auto* ps = state.player(player_id);
  if (ps && ps->solved.count(challenge->challenge_id)) return Verdict::RejectedAlreadySolved;
  return flag_matches(*challenge, text) ? Verdict::Correct : Verdict::Wrong;
}

namespace {

struct Applier {
  const GameConfig& config;
  GameState& state;
  const GameEvent& event;
  PlayerState& ps;

  [[noreturn]] void violation(const std::string& msg) const { throw ConsistencyError(event.seq, msg); }

  const Challenge& challenge(const std::string& id) const {
    const auto* c = config.find_challenge(id);
    if (!c) violation("unknown challenge '" + id + "'");
    return *c;
  }

  void require_visible(const std::string& cid) const {
    if (!is_visible(config, state, event.player_id, cid)) violation("challenge '" + cid + "' is locked for player");
  }

  void operator()(const LoginPayload&) const { ps.logged_in = true; }

  void operator()(const ChallengeViewPayload& p) const {
    challenge(p.challenge_id);
    require_visible(p.challenge_id);
    ps.first_view.emplace(p.challenge_id, event.at);
  }

  void operator()(const FileDownloadPayload& p) const {
    const auto* asset = config.find_asset(p.asset_id);
    if (!asset) violation("unknown asset '" + p.asset_id + "'");
    require_visible(asset->challenge_id);
  }

  void operator()(const FlagSubmissionPayload& p) const {
    const auto& c = challenge(p.challenge_id);
    const auto* record = config.find_player(event.player_id);
    if (record->role == Role::Instructor) violation("instructor submitted a flag");
    const Verdict expected = adjudicate(config, state, event.player_id, p.challenge_id, p.submitted_text, event.at);
    if (expected != p.verdict) {
      violation(std::string("recorded verdict ") + to_string(p.verdict) + " but rules give " + to_string(expected));
    }
    if (p.verdict == Verdict::Correct) {
      ps.solved.emplace(c.challenge_id, event.at);
      ps.score += c.points;
      ps.last_solve_at = event.at;
      ++state.solve_counts[c.challenge_id];
    }
  }

  void operator()(const HintDisplayPayload& p) const {
    const auto* hint = config.find_hint(p.hint_id);
    if (!hint) violation("unknown hint '" + p.hint_id + "'");
    if (!hint->released_by(event.at)) violation("hint '" + p.hint_id + "' displayed before release");
    require_visible(hint->challenge_id);
    if (!ps.hints_displayed.emplace(hint->hint_id, event.at).second) {
      violation("hint '" + p.hint_id + "' displayed twice");
    }
    ps.score -= hint->cost;
  }

  void operator()(const HintOfferPayload& p) const {
    const auto* hint = config.find_hint(p.hint_id);
    if (!hint || hint->challenge_id != p.challenge_id) violation("offer names unknown hint '" + p.hint_id + "'");
    if (!ps.hints_offered.insert(p.hint_id).second) violation("hint '" + p.hint_id + "' offered twice");
  }

  void operator()(const ChallengeUnlockPayload& p) const {
    challenge(p.challenge_id);
    if (!config.predecessor(p.challenge_id)) violation("'" + p.challenge_id + "' is not a lockable chain member");
    require_visible(p.challenge_id);
    if (!ps.unlocked.insert(p.challenge_id).second) violation("'" + p.challenge_id + "' unlocked twice");
  }

  void operator()(const FeedbackPayload& p) const {
    challenge(p.challenge_id);
    if (p.rating < 1 || p.rating > 5) violation("rating out of range");
    if (!ps.solved.count(p.challenge_id)) violation("feedback before solving '" + p.challenge_id + "'");
    if (!ps.feedback_given.insert(p.challenge_id).second) violation("duplicate feedback for '" + p.challenge_id + "'");
  }
};

}  // namespace

void apply_event(const GameConfig& config, GameState& state, const GameEvent& event) {
  if (event.seq <= state.last_seq) throw ConsistencyError(event.seq, "seq not increasing");
  if (!config.find_player(event.player_id)) throw ConsistencyError(event.seq, "unknown player '" + event.player_id + "'");
  // Handlers check before they mutate, so a violation only has to undo the
  // player entry created here.
  auto [it, created] = state.players.try_emplace(event.player_id);
  try {
    std::visit(Applier{config, state, event, it->second}, event.payload);
  } catch (...) {
    if (created) state.players.erase(it);
    throw;
  }
  state.last_seq = event.seq;
}

GameState replay(const GameConfig& config, const std::vector<GameEvent>& events) {
  GameState state;
  for (const auto& e : events) apply_event(config, state, e);
  return state;
}

std::vector<ChallengeSummary> visible_challenges(const GameConfig& config, const GameState& state,
                                                 std::string_view player_id, Timestamp now) {
  std::vector<ChallengeSummary> out;
  if (now < config.opens_at) return out;
  const auto* ps = state.player(player_id);
  for (const auto& c : config.challenges) {
    if (!is_visible(config, state, player_id, c.challenge_id)) continue;
    ChallengeSummary s;
    s.challenge_id = c.challenge_id;
    s.title = c.title;
    s.category = c.category;
    s.points = c.points;
    s.solved = ps && ps->solved.count(c.challenge_id);
    for (const auto& h : c.hints) {
      if (!h.released_by(now)) continue;
      s.hints.push_back({h.hint_id, h.cost, h.topic_label, ps && ps->hints_displayed.count(h.hint_id) > 0});
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<HintOffer> due_hint_offers(const GameConfig& config, const GameState& state, std::string_view player_id,
                                       Timestamp now) {
  std::vector<HintOffer> out;
  if (now < config.opens_at || now >= config.closes_at) return out;
  const auto* ps = state.player(player_id);
  if (!ps) return out;
  for (const auto& c : config.challenges) {
    auto view = ps->first_view.find(c.challenge_id);
    if (view == ps->first_view.end() || ps->solved.count(c.challenge_id)) continue;
    if (!is_visible(config, state, player_id, c.challenge_id)) continue;
    if (now - view->second <= config.hint_offer_dwell) continue;
    for (const auto& h : c.hints) {
      if (h.released_by(now) && !ps->hints_displayed.count(h.hint_id)) {
        out.push_back({c.challenge_id, h.hint_id});
        break;
      }
    }
  }
  return out;
}

std::vector<ScoreboardEntry> scoreboard(const GameConfig& config, const GameState& state, std::string_view salt) {
  std::vector<ScoreboardEntry> out;
  for (const auto& p : config.players) {
    if (p.role != Role::Player) continue;
    const auto* ps = state.player(p.player_id);
    if (!ps || !ps->logged_in) continue;
    out.push_back({alias_for(p.player_id, salt), ps->score, ps->last_solve_at, 0});
  }
  std::sort(out.begin(), out.end(), scoreboard_before);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

// ---------------------------------------------------------------------------

Engine::Engine(GameConfig config, EventStore& store) : config_(std::move(config)), store_(store) {
  store_.index_config(config_);
  state_ = flagtrail::replay(config_, store_.snapshot());
}

void Engine::set_asset_source(AssetSource source) {
  std::unique_lock lock(mutex_);
  asset_source_ = std::move(source);
}

void Engine::set_hint_listener(HintListener listener) {
  std::unique_lock lock(mutex_);
  hint_listener_ = std::move(listener);
}

GameConfig Engine::config() const {
  std::shared_lock lock(mutex_);
  return config_;
}

GameState Engine::state() const {
  std::shared_lock lock(mutex_);
  return state_;
}

PlayerRecord Engine::authenticate(std::string_view token) const {
  std::shared_lock lock(mutex_);
  const auto* p = config_.find_player_by_token(token);
  if (!p) throw Error(ErrorCode::AuthFailure, "unknown or missing token");
  return *p;
}

const PlayerRecord& Engine::require_player(std::string_view player_id) const {
  const auto* p = config_.find_player(player_id);
  if (!p) throw Error(ErrorCode::NotFound, "unknown player '" + std::string(player_id) + "'");
  return *p;
}

std::uint64_t Engine::commit(std::string_view player_id, EventPayload payload, Timestamp now) {
  const auto seq = store_.append(std::string(player_id), std::move(payload), now);
  auto event = store_.at_seq(seq);
  apply_event(config_, state_, *event);
  return seq;
}

std::uint64_t Engine::login(std::string_view player_id, Timestamp now) {
  std::unique_lock lock(mutex_);
  require_player(player_id);
  return commit(player_id, LoginPayload{}, now);
}

std::vector<ChallengeSummary> Engine::visible_challenges(std::string_view player_id, Timestamp now) const {
  std::shared_lock lock(mutex_);
  require_player(player_id);
  return flagtrail::visible_challenges(config_, state_, player_id, now);
}

ChallengeDetail Engine::view_challenge(std::string_view player_id, std::string_view challenge_id, Timestamp now) {
  std::unique_lock lock(mutex_);
  require_player(player_id);
  const auto* c = config_.find_challenge(challenge_id);
  if (!c || now < config_.opens_at || !is_visible(config_, state_, player_id, challenge_id)) {
    throw Error(ErrorCode::NotFound, "no such challenge '" + std::string(challenge_id) + "'");
  }
  commit(player_id, ChallengeViewPayload{c->challenge_id}, now);
  ChallengeDetail d;
  for (auto& s : flagtrail::visible_challenges(config_, state_, player_id, now)) {
    if (s.challenge_id == c->challenge_id) d.summary = std::move(s);
  }
  d.description = c->description;
  for (const auto& a : c->assets) d.assets.push_back({a.asset_id, a.filename});
  return d;
}

SubmitResult Engine::submit_flag(std::string_view player_id, std::string_view challenge_id, std::string_view text,
                                 Timestamp now) {
  std::unique_lock lock(mutex_);
  const auto& player = require_player(player_id);
  if (player.role == Role::Instructor) throw Error(ErrorCode::Forbidden, "instructors cannot submit flags");
  const Verdict verdict = adjudicate(config_, state_, player_id, challenge_id, text, now);
  const auto* c = config_.find_challenge(challenge_id);
  SubmitResult result;
  result.verdict = verdict;
  result.seq = commit(player_id, FlagSubmissionPayload{c->challenge_id, std::string(text), verdict}, now);
  if (verdict == Verdict::Correct) {
    result.points_awarded = c->points;
    if (auto next = config_.successor(c->challenge_id)) commit(player_id, ChallengeUnlockPayload{*next}, now);
  }
  return result;
}

std::string Engine::display_hint(std::string_view player_id, std::string_view hint_id, Timestamp now) {
  std::unique_lock lock(mutex_);
  require_player(player_id);
  const auto* hint = config_.find_hint(hint_id);
  if (!hint || !hint->released_by(now)) throw Error(ErrorCode::NotFound, "no such hint '" + std::string(hint_id) + "'");
  if (!is_visible(config_, state_, player_id, hint->challenge_id)) {
    throw Error(ErrorCode::RejectedLocked, "hint belongs to a locked challenge");
  }
  const auto* ps = state_.player(player_id);
  if (!ps || !ps->hints_displayed.count(hint->hint_id)) commit(player_id, HintDisplayPayload{hint->hint_id}, now);
  return hint->body;
}

std::string Engine::add_hint(std::string_view instructor_id, std::string_view challenge_id, Hint hint, Timestamp now) {
  std::unique_lock lock(mutex_);
  const auto& caller = require_player(instructor_id);
  if (caller.role != Role::Instructor) throw Error(ErrorCode::Forbidden, "only instructors may add hints");
  auto* c = config_.find_challenge(challenge_id);
  if (!c) throw Error(ErrorCode::NotFound, "unknown challenge '" + std::string(challenge_id) + "'");
  if (now >= config_.closes_at) throw Error(ErrorCode::PreconditionViolation, "game is closed");
  if (hint.cost < 0) throw Error(ErrorCode::InvalidArgument, "hint cost must be non-negative");
  if (hint.topic_label.empty()) throw Error(ErrorCode::InvalidArgument, "hint topic must not be empty");
  if (hint.hint_id.empty()) {
    for (std::size_t n = c->hints.size() + 1;; ++n) {
      auto candidate = c->challenge_id + "-h" + std::to_string(n);
      if (!config_.find_hint(candidate)) {
        hint.hint_id = std::move(candidate);
        break;
      }
    }
  } else if (config_.find_hint(hint.hint_id)) {
    throw Error(ErrorCode::InvalidArgument, "hint id '" + hint.hint_id + "' already exists");
  }
  hint.challenge_id = c->challenge_id;
  if (!hint.released_at || *hint.released_at < now) hint.released_at = now;
  c->hints.push_back(hint);
  store_.map_reference(hint.hint_id, c->challenge_id);
  if (hint_listener_) hint_listener_(hint);
  return hint.hint_id;
}

std::vector<HintOffer> Engine::pending_hint_offers(std::string_view player_id, Timestamp now) {
  std::unique_lock lock(mutex_);
  require_player(player_id);
  std::vector<HintOffer> fresh;
  for (auto& offer : due_hint_offers(config_, state_, player_id, now)) {
    const auto* ps = state_.player(player_id);
    if (ps && ps->hints_offered.count(offer.hint_id)) continue;
    commit(player_id, HintOfferPayload{offer.challenge_id, offer.hint_id}, now);
    fresh.push_back(std::move(offer));
  }
  return fresh;
}

std::vector<ScoreboardEntry> Engine::scoreboard() const {
  std::shared_lock lock(mutex_);
  return flagtrail::scoreboard(config_, state_, config_.anonymization_salt);
}

std::uint64_t Engine::record_feedback(std::string_view player_id, std::string_view challenge_id, int rating,
                                      std::optional<std::string> comment, Timestamp now) {
  std::unique_lock lock(mutex_);
  require_player(player_id);
  const auto* c = config_.find_challenge(challenge_id);
  if (!c) throw Error(ErrorCode::NotFound, "unknown challenge '" + std::string(challenge_id) + "'");
  if (rating < 1 || rating > 5) throw Error(ErrorCode::InvalidArgument, "rating must be within 1-5");
  const auto* ps = state_.player(player_id);
  if (!ps || !ps->solved.count(c->challenge_id)) {
    throw Error(ErrorCode::PreconditionViolation, "feedback requires a solved challenge");
  }
  if (ps->feedback_given.count(c->challenge_id)) {
    throw Error(ErrorCode::PreconditionViolation, "feedback already recorded for this challenge");
  }
  return commit(player_id, FeedbackPayload{c->challenge_id, rating, std::move(comment)}, now);
}

AssetDownload Engine::download_asset(std::string_view player_id, std::string_view asset_id, Timestamp now) {
  std::unique_lock lock(mutex_);
  require_player(player_id);
  const auto* asset = config_.find_asset(asset_id);
  if (!asset || now < config_.opens_at) throw Error(ErrorCode::NotFound, "no such asset '" + std::string(asset_id) + "'");
  if (!is_visible(config_, state_, player_id, asset->challenge_id)) {
    throw Error(ErrorCode::RejectedLocked, "asset belongs to a locked challenge");
  }
  AssetDownload out{*asset, {}};
  if (asset_source_) {
    out.bytes = asset_source_(*asset);
    if (!asset->content_digest.empty() && sha256_hex(out.bytes) != asset->content_digest) {
      throw Error(ErrorCode::IoError, "asset '" + asset->asset_id + "' does not match its digest");
    }
  }
  commit(player_id, FileDownloadPayload{asset->asset_id}, now);
  return out;
}

}  // namespace flagtrail
