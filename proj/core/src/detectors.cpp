#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "flagtrail/analytics.hpp"
#include "flagtrail/error.hpp"

namespace flagtrail {

namespace {

constexpr std::array<const char*, 4> kIncidentKindNames{"time_vicinity", "cross_flag", "missing_download",
                                                        "quick_chain_solve"};

}  // namespace

const char* to_string(IncidentKind k) { return kIncidentKindNames[static_cast<std::size_t>(k)]; }

const char* to_string(Severity s) { return s == Severity::Strong ? "strong" : "weak"; }

IncidentKind parse_incident_kind(std::string_view text) {
  for (std::size_t i = 0; i < kIncidentKindNames.size(); ++i) {
    if (text == kIncidentKindNames[i]) return static_cast<IncidentKind>(i);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown incident kind '" + std::string(text) + "'");
}

Severity severity_of(IncidentKind k) { return k == IncidentKind::TimeVicinity ? Severity::Weak : Severity::Strong; }

IncidentKey key_of(const Incident& incident) { return {incident.kind, incident.players, incident.challenge_id}; }

std::vector<Solve> correct_solves(std::span<const GameEvent> log) {
  std::vector<Solve> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : log) {
    const auto* sub = e.as<FlagSubmissionPayload>();
    if (!sub || sub->verdict != Verdict::Correct) continue;
    if (!seen.emplace(e.player_id, sub->challenge_id).second) continue;
    out.push_back({e.player_id, sub->challenge_id, e.at, e.seq});
  }
  return out;
}

TimeVicinityResult detect_time_vicinity(std::span<const GameEvent> log, Duration window) {
  if (window <= Duration::zero()) throw Error(ErrorCode::InvalidArgument, "vicinity window must be positive");
  std::map<std::string, std::vector<Solve>> by_challenge;
  for (auto& s : correct_solves(log)) by_challenge[s.challenge_id].push_back(std::move(s));

  TimeVicinityResult result;
  const long long max_minutes = std::chrono::duration_cast<std::chrono::minutes>(window).count();
  for (auto& [cid, solves] : by_challenge) {
    // correct_solves is in log order, which is time order.
    std::vector<long long> pair_deltas_ms;
    for (std::size_t i = 0; i < solves.size(); ++i) {
      for (std::size_t j = i + 1; j < solves.size(); ++j) {
        const Duration delta = solves[j].at - solves[i].at;
        if (delta > window) break;
        pair_deltas_ms.push_back(delta.count());
        Incident inc;
        inc.kind = IncidentKind::TimeVicinity;
        inc.severity = severity_of(inc.kind);
        inc.players = {solves[i].player_id, solves[j].player_id};
        std::sort(inc.players.begin(), inc.players.end());
        inc.challenge_id = cid;
        inc.event_seqs = {solves[i].seq, solves[j].seq};
        inc.at = solves[j].at;
        inc.delta = delta;
        inc.threshold = window;
        result.incidents.push_back(std::move(inc));
      }
    }
    std::sort(pair_deltas_ms.begin(), pair_deltas_ms.end());
    for (long long m = 0; m <= max_minutes; ++m) {
      const long long limit = m * 60'000;
      const auto count = std::upper_bound(pair_deltas_ms.begin(), pair_deltas_ms.end(), limit) - pair_deltas_ms.begin();
      result.curve.push_back({cid, m, static_cast<long long>(count)});
    }
  }
  return result;
}

std::vector<Incident> detect_cross_flag(std::span<const GameEvent> log, const GameConfig& config) {
  std::map<std::string, std::string, std::less<>> flag_owner;
  for (const auto& c : config.challenges) {
    const auto flag = normalize_flag(c.flag);
    if (!flag.empty()) flag_owner.emplace(std::string(flag), c.challenge_id);
  }
  std::map<std::string, const Solve*> earliest;
  const auto solves = correct_solves(log);
  for (const auto& s : solves) earliest.emplace(s.challenge_id, &s);

  std::vector<Incident> out;
  for (const auto& e : log) {
    const auto* sub = e.as<FlagSubmissionPayload>();
    if (!sub || (sub->verdict != Verdict::Wrong && sub->verdict != Verdict::RejectedLocked)) continue;
    auto owner = flag_owner.find(normalize_flag(sub->submitted_text));
    if (owner == flag_owner.end() || owner->second == sub->challenge_id) continue;
    Incident inc;
    inc.kind = IncidentKind::CrossFlag;
    inc.severity = severity_of(inc.kind);
    inc.players = {e.player_id};
    inc.challenge_id = sub->challenge_id;
    inc.related_challenge_id = owner->second;
    inc.event_seqs = {e.seq};
    inc.at = e.at;
    if (auto it = earliest.find(owner->second); it != earliest.end()) {
      inc.event_seqs.push_back(it->second->seq);
      std::sort(inc.event_seqs.begin(), inc.event_seqs.end());
      inc.delta = e.at - it->second->at;
    }
    out.push_back(std::move(inc));
  }
  return out;
}

std::vector<Incident> detect_missing_download(std::span<const GameEvent> log, const GameConfig& config,
                                              DownloadRule rule) {
  std::map<std::string, std::set<std::string>> required;  // challenge -> asset ids
  std::map<std::string, std::string> asset_challenge;
  for (const auto& c : config.challenges) {
    for (const auto& a : c.assets) {
      asset_challenge[a.asset_id] = c.challenge_id;
      if (a.required_for_solve) required[c.challenge_id].insert(a.asset_id);
    }
  }
  // (player, challenge) -> required assets downloaded so far
  std::map<std::pair<std::string, std::string>, std::set<std::string>> downloaded;
  std::set<std::pair<std::string, std::string>> judged;
  std::vector<Incident> out;
  for (const auto& e : log) {
    if (const auto* d = e.as<FileDownloadPayload>()) {
      auto it = asset_challenge.find(d->asset_id);
      if (it != asset_challenge.end()) downloaded[{e.player_id, it->second}].insert(d->asset_id);
      continue;
    }
    const auto* sub = e.as<FlagSubmissionPayload>();
    if (!sub || sub->verdict != Verdict::Correct) continue;
    auto req = required.find(sub->challenge_id);
    if (req == required.end() || req->second.empty()) continue;
    const std::pair key{e.player_id, sub->challenge_id};
    if (!judged.insert(key).second) continue;
    std::size_t have = 0;
    if (auto it = downloaded.find(key); it != downloaded.end()) {
      for (const auto& a : it->second) have += req->second.count(a);
    }
    const bool ok = rule == DownloadRule::AnyRequired ? have > 0 : have == req->second.size();
    if (ok) continue;
    Incident inc;
    inc.kind = IncidentKind::MissingDownload;
    inc.severity = severity_of(inc.kind);
    inc.players = {e.player_id};
    inc.challenge_id = sub->challenge_id;
    inc.event_seqs = {e.seq};
    inc.at = e.at;
    out.push_back(std::move(inc));
  }
  return out;
}

QuickSolveResult detect_quick_chain_solves(std::span<const GameEvent> log, const GameConfig& config) {
  std::map<std::pair<std::string, std::string>, Solve> solved;  // (player, challenge)
  std::set<std::string> players;
  for (auto& s : correct_solves(log)) {
    players.insert(s.player_id);
    solved.emplace(std::pair{s.player_id, s.challenge_id}, std::move(s));
  }
  QuickSolveResult result;
  for (const auto& chain : config.chains) {
    for (std::size_t k = 0; k + 1 < chain.members.size(); ++k) {
      const auto& from = chain.members[k];
      const auto& to = chain.members[k + 1];
      const auto* target = config.find_challenge(to);
      if (!target) continue;
      for (const auto& p : players) {
        auto a = solved.find({p, from});
        auto b = solved.find({p, to});
        if (a == solved.end() || b == solved.end()) continue;
        const Duration delta = b->second.at - a->second.at;
        result.deltas.push_back({chain.chain_id, from, to, p, delta, target->min_solve});
        if (delta >= target->min_solve) continue;
        Incident inc;
        inc.kind = IncidentKind::QuickChainSolve;
        inc.severity = severity_of(inc.kind);
        inc.players = {p};
        inc.challenge_id = to;
        inc.related_challenge_id = from;
        inc.event_seqs = {a->second.seq, b->second.seq};
        inc.at = b->second.at;
        inc.delta = delta;
        inc.threshold = target->min_solve;
        result.incidents.push_back(std::move(inc));
      }
    }
  }
  return result;
}

std::vector<Incident> incident_report(std::span<const GameEvent> log, const GameConfig& config,
                                      const IncidentReportOptions& options) {
  std::vector<Incident> all = detect_time_vicinity(log, options.window.value_or(config.vicinity_window)).incidents;
  auto append = [&all](std::vector<Incident> more) {
    all.insert(all.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  append(detect_cross_flag(log, config));
  append(detect_missing_download(log, config, options.download_rule));
  append(detect_quick_chain_solves(log, config).incidents);
  std::sort(all.begin(), all.end(), [](const Incident& a, const Incident& b) {
    return std::tie(a.severity, a.players, a.at, a.kind, a.challenge_id, a.event_seqs) <
           std::tie(b.severity, b.players, b.at, b.kind, b.challenge_id, b.event_seqs);
  });
  return all;
}

}  // namespace flagtrail
