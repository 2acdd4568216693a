#include "flagtrail/synth.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "flagtrail/error.hpp"
#include "flagtrail/event_store.hpp"

namespace flagtrail {

// ---------------------------------------------------------------------------
// Spec file

namespace {

[[noreturn]] void spec_error(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, "cohort spec: " + msg); }

Duration yaml_duration(const YAML::Node& n, const char* key, Duration fallback) {
  if (!n || !n[key]) return fallback;
  return parse_duration(n[key].as<std::string>());
}

const char* difficulty(Category c) {
  switch (c) {
    case Category::Basic:
    case Category::BonusBasic: return "basic";
    case Category::Medium:
    case Category::BonusMedium: return "medium";
    case Category::Advanced:
    case Category::BonusAdvanced: return "advanced";
  }
  return "basic";
}

}  // namespace

CohortSpec parse_cohort_spec(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    spec_error(e.what());
  }
  if (!root.IsMap()) spec_error("expected a mapping");
  static const std::set<std::string> known{"seed",           "honest",           "colluding_pairs",
                                           "non_downloaders", "work_minutes",     "solve_probability",
                                           "hint_probability", "wrong_rate",      "feedback_probability",
                                           "margins",         "collusion"};
  for (const auto& kv : root) {
    if (!known.count(kv.first.as<std::string>())) spec_error("unknown key '" + kv.first.as<std::string>() + "'");
  }
  CohortSpec s;
  try {
    if (root["seed"]) s.seed = root["seed"].as<std::uint64_t>();
    if (root["honest"]) s.n_honest = root["honest"].as<std::size_t>();
    if (root["colluding_pairs"]) s.n_colluding_pairs = root["colluding_pairs"].as<std::size_t>();
    if (root["non_downloaders"]) s.n_non_downloaders = root["non_downloaders"].as<std::size_t>();
    if (const auto w = root["work_minutes"]) {
      for (const auto& kv : w) {
        s.work_minutes[kv.first.as<std::string>()] = {kv.second["mu"].as<double>(), kv.second["sigma"].as<double>()};
      }
    }
    if (const auto p = root["solve_probability"]) {
      for (const auto& kv : p) s.solve_probability[kv.first.as<std::string>()] = kv.second.as<double>();
    }
    if (root["hint_probability"]) s.hint_probability = root["hint_probability"].as<double>();
    if (root["wrong_rate"]) s.wrong_rate = root["wrong_rate"].as<double>();
    if (root["feedback_probability"]) s.feedback_probability = root["feedback_probability"].as<double>();
    s.vicinity_margin = yaml_duration(root["margins"], "vicinity", s.vicinity_margin);
    s.chain_margin = yaml_duration(root["margins"], "chain", s.chain_margin);
    s.lag_min = yaml_duration(root["collusion"], "lag_min", s.lag_min);
    s.quick_min = yaml_duration(root["collusion"], "quick_min", s.quick_min);
  } catch (const YAML::Exception& e) {
    spec_error(e.what());
  }
  return s;
}

std::string serialize_cohort_spec(const CohortSpec& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "honest" << YAML::Value << s.n_honest;
  out << YAML::Key << "colluding_pairs" << YAML::Value << s.n_colluding_pairs;
  out << YAML::Key << "non_downloaders" << YAML::Value << s.n_non_downloaders;
  out << YAML::Key << "work_minutes" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : s.work_minutes) {
    out << YAML::Key << k << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "mu" << YAML::Value << v.mu
        << YAML::Key << "sigma" << YAML::Value << v.sigma << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::Key << "solve_probability" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : s.solve_probability) out << YAML::Key << k << YAML::Value << v;
  out << YAML::EndMap;
  out << YAML::Key << "hint_probability" << YAML::Value << s.hint_probability;
  out << YAML::Key << "wrong_rate" << YAML::Value << s.wrong_rate;
  out << YAML::Key << "feedback_probability" << YAML::Value << s.feedback_probability;
  out << YAML::Key << "margins" << YAML::Value << YAML::BeginMap << YAML::Key << "vicinity" << YAML::Value
      << format_duration(s.vicinity_margin) << YAML::Key << "chain" << YAML::Value << format_duration(s.chain_margin)
      << YAML::EndMap;
  out << YAML::Key << "collusion" << YAML::Value << YAML::BeginMap << YAML::Key << "lag_min" << YAML::Value
      << format_duration(s.lag_min) << YAML::Key << "quick_min" << YAML::Value << format_duration(s.quick_min)
      << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Generation

namespace {

enum class ActionType { Login, View, Download, Submit, Hint, Feedback };

struct Action {
  Timestamp at{};
  std::size_t player = 0;
  std::size_t order = 0;
  ActionType type = ActionType::View;
  std::string ref;
  std::string text;
  Verdict expect = Verdict::Wrong;
  int rating = 0;
};

struct Group {
  std::vector<const Challenge*> members;
  std::vector<Duration> offsets;  // member offsets from the group base
  const Chain* chain = nullptr;
  Timestamp base{};
  std::vector<std::size_t> lane_of;  // participant -> lane
  std::size_t regions = 0;
};

struct PairPlan {
  std::size_t source = 0;
  std::size_t copier = 0;
  std::size_t group = 0;
  std::size_t index_a = 0;  // member index of a; b is index_a + 1
  std::size_t region = 0;
  Duration x{}, d{}, lead{}, lag{};  // source offset, copier quick solve, probe lead, copy lag
};

class Generator {
 public:
  Generator(const CohortSpec& spec, const GameConfig& config) : spec_(spec), config_(config), rng_(spec.seed) {}

  SynthResult run();

 private:
  using Rng = std::mt19937_64;

  Duration uniform(Rng& rng, Duration lo, Duration hi) {
    if (hi <= lo) return lo;
    return Duration{std::uniform_int_distribution<long long>(lo.count(), hi.count())(rng)};
  }
  double chance(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

  void validate();
  void layout_groups();
  void plan_pairs();
  void plan_player(std::size_t p);
  void plan_solved(std::size_t p, Rng& rng, const Challenge& c, Timestamp unlock, Timestamp solve, bool skip_downloads,
                   std::optional<Duration> cross_flag_lead);
  void plan_attempt(std::size_t p, Rng& rng, const Challenge& c, Timestamp unlock);
  void add(std::size_t p, Timestamp at, ActionType type, std::string ref, std::string text = {},
           Verdict expect = Verdict::Wrong, int rating = 0);
  std::string wrong_text(Rng& rng);
  std::vector<GameEvent> execute();

  const CohortSpec& spec_;
  const GameConfig& config_;
  Rng rng_;
  std::vector<const PlayerRecord*> participants_;
  std::size_t n_colluders_ = 0;
  std::size_t n_nondl_ = 0;
  Duration lane_{};
  Duration jitter_{};
  std::vector<Group> groups_;
  std::vector<PairPlan> pairs_;
  std::map<std::size_t, std::string> nondl_target_;  // participant -> challenge
  std::set<std::string> flags_;
  std::vector<Action> actions_;
  std::size_t order_ = 0;
  std::vector<IncidentKey> truth_;
};

void Generator::validate() {
  const Duration window = config_.vicinity_window;
  if (auto v = validate_config(config_); !v.empty()) spec_error("game definition invalid: " + v.front());
  if (spec_.vicinity_margin <= Duration::zero()) spec_error("vicinity margin must be positive");
  if (spec_.chain_margin <= Duration::zero()) spec_error("chain margin must be positive");
  if (spec_.lag_min <= Duration::zero() || spec_.lag_min > window) spec_error("lag_min must lie in (0, window]");
  if (spec_.quick_min <= Duration::zero()) spec_error("quick_min must be positive");
  for (double p : {spec_.hint_probability, spec_.feedback_probability}) {
    if (p < 0 || p > 1) spec_error("probabilities must lie in [0, 1]");
  }
  for (const auto& [k, p] : spec_.solve_probability) {
    if (p < 0 || p > 1) spec_error("solve probability for '" + k + "' outside [0, 1]");
  }
  for (const char* d : {"basic", "medium", "advanced"}) {
    if (!spec_.work_minutes.count(d) || !spec_.solve_probability.count(d)) {
      spec_error(std::string("missing parameters for difficulty '") + d + "'");
    }
    if (spec_.work_minutes.at(d).sigma < 0) spec_error("sigma must be non-negative");
  }
  if (spec_.wrong_rate < 0) spec_error("wrong_rate must be non-negative");

  lane_ = 2 * window + 3 * spec_.vicinity_margin;
  jitter_ = spec_.vicinity_margin / 2;
  for (const auto& chain : config_.chains) {
    for (std::size_t k = 1; k < chain.members.size(); ++k) {
      const auto* c = config_.find_challenge(chain.members[k]);
      if (c->min_solve + spec_.chain_margin + jitter_ > lane_) {
        spec_error("min_solve of '" + c->challenge_id + "' plus chain margin exceeds the lane width");
      }
    }
  }

  for (const auto* p : [&] {
         std::vector<const PlayerRecord*> v;
         for (const auto& rec : config_.players) {
           if (rec.role == Role::Player) v.push_back(&rec);
         }
         return v;
       }()) {
    participants_.push_back(p);
  }
  n_colluders_ = 2 * spec_.n_colluding_pairs;
  n_nondl_ = spec_.n_non_downloaders;
  const std::size_t need = n_colluders_ + n_nondl_ + spec_.n_honest;
  if (participants_.size() < need) {
    spec_error("cohort needs " + std::to_string(need) + " player accounts, game defines " +
               std::to_string(participants_.size()));
  }
  participants_.resize(need);
  for (const auto& c : config_.challenges) flags_.insert(std::string(normalize_flag(c.flag)));
}

void Generator::layout_groups() {
  std::set<std::string> in_chain;
  for (const auto& chain : config_.chains) {
    Group g;
    g.chain = &chain;
    for (const auto& m : chain.members) {
      g.members.push_back(config_.find_challenge(m));
      in_chain.insert(m);
    }
    groups_.push_back(std::move(g));
  }
  for (const auto& c : config_.challenges) {
    if (in_chain.count(c.challenge_id)) continue;
    Group g;
    g.members.push_back(&c);
    groups_.push_back(std::move(g));
  }
  for (auto& g : groups_) {
    g.offsets.push_back(Duration::zero());
    for (std::size_t k = 1; k < g.members.size(); ++k) {
      g.offsets.push_back(g.offsets.back() + g.members[k]->min_solve + spec_.chain_margin + jitter_ +
                          uniform(rng_, Duration::zero(), hours(2)));
    }
    std::vector<std::size_t> lanes(participants_.size());
    std::iota(lanes.begin(), lanes.end(), 0);
    std::shuffle(lanes.begin(), lanes.end(), rng_);
    g.lane_of = std::move(lanes);
  }
}

void Generator::plan_pairs() {
  if (spec_.n_colluding_pairs == 0) return;
  const Duration window = config_.vicinity_window;
  struct Candidate {
    std::size_t group;
    std::size_t index_a;
  };
  std::vector<Candidate> candidates;
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const auto& g = groups_[gi];
    if (!g.chain) continue;
    for (std::size_t k = 0; k + 1 < g.members.size(); ++k) {
      const Duration min_b = g.members[k + 1]->min_solve;
      // Room for a copy lag covering the quick solve and the locked-flag probe.
      if (min_b > spec_.quick_min + Duration{1} && min_b + seconds(12) <= window) candidates.push_back({gi, k});
    }
  }
  if (candidates.empty()) spec_error("colluding pairs need a chain pair whose min_solve fits inside the window");
  for (std::size_t j = 0; j < spec_.n_colluding_pairs; ++j) {
    const auto& pick = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
    PairPlan plan{2 * j, 2 * j + 1, pick.group, pick.index_a, groups_[pick.group].regions++};
    const Duration min_b = groups_[pick.group].members[pick.index_a + 1]->min_solve;
    plan.x = uniform(rng_, Duration::zero(), jitter_);
    plan.d = uniform(rng_, spec_.quick_min, min_b - Duration{1});
    plan.lead = uniform(rng_, seconds(2), seconds(10));
    plan.lag = uniform(rng_, std::max(spec_.lag_min, plan.d + plan.lead + seconds(1)), window);
    pairs_.push_back(plan);
  }
}

void Generator::add(std::size_t p, Timestamp at, ActionType type, std::string ref, std::string text, Verdict expect,
                    int rating) {
  if (at >= config_.closes_at || at < config_.opens_at) {
    spec_error("game window too short for this cohort (planned action at " + format_timestamp(at) + ")");
  }
  actions_.push_back({at, p, order_++, type, std::move(ref), std::move(text), expect, rating});
}

std::string Generator::wrong_text(Rng& rng) {
  static constexpr char hex[] = "0123456789abcdef";
  for (;;) {
    std::string t = "FLAG{guess-";
    for (int i = 0; i < 8; ++i) t.push_back(hex[std::uniform_int_distribution<int>(0, 15)(rng)]);
    t += "}";
    if (!flags_.count(t)) return t;
  }
}

void Generator::plan_solved(std::size_t p, Rng& rng, const Challenge& c, Timestamp unlock, Timestamp solve,
                            bool skip_downloads, std::optional<Duration> cross_flag_lead) {
  const auto& lw = spec_.work_minutes.at(difficulty(c.category));
  const double work_min = std::exp(std::normal_distribution<double>(lw.mu, lw.sigma)(rng));
  const auto work = Duration{static_cast<long long>(std::min(work_min, 60.0 * 24 * 30) * 60'000.0)};
  Timestamp view = std::max(unlock + seconds(1), solve - work);
  if (cross_flag_lead) view = std::min(view, solve - *cross_flag_lead - seconds(1));
  if (view >= solve - Duration{8}) view = unlock + (solve - unlock) / 4;
  const auto span = solve - view;
  auto at_fraction = [&](double lo, double hi) {
    const double f = std::uniform_real_distribution<double>(lo, hi)(rng);
    return view + Duration{std::max<long long>(1, static_cast<long long>(f * static_cast<double>(span.count())))};
  };

  add(p, view, ActionType::View, c.challenge_id);
  if (!skip_downloads) {
    for (const auto& a : c.assets) add(p, at_fraction(0.02, 0.2), ActionType::Download, a.asset_id);
  }
  if (!cross_flag_lead) {
    for (const auto& h : c.hints) {
      if (chance(rng) >= spec_.hint_probability) continue;
      const auto when = at_fraction(0.25, 0.9);
      if (h.released_by(when)) add(p, when, ActionType::Hint, h.hint_id);
    }
    const int wrong = std::poisson_distribution<int>(spec_.wrong_rate)(rng);
    for (int i = 0; i < wrong; ++i) {
      add(p, at_fraction(0.2, 0.95), ActionType::Submit, c.challenge_id, wrong_text(rng), Verdict::Wrong);
    }
  }
  add(p, solve, ActionType::Submit, c.challenge_id, c.flag, Verdict::Correct);
  if (chance(rng) < spec_.feedback_probability) {
    const auto when = solve + uniform(rng, seconds(5), minutes(5));
    if (when < config_.closes_at) {
      add(p, when, ActionType::Feedback, c.challenge_id, {}, Verdict::Wrong,
          std::uniform_int_distribution<int>(1, 5)(rng));
    }
  }
}

void Generator::plan_attempt(std::size_t p, Rng& rng, const Challenge& c, Timestamp unlock) {
  if (chance(rng) >= 0.5) return;
  const Timestamp latest = config_.closes_at - hours(1);
  if (unlock + seconds(2) >= latest) return;
  const Timestamp view = unlock + uniform(rng, seconds(1), std::min<Duration>(hours(72), latest - unlock - seconds(1)));
  add(p, view, ActionType::View, c.challenge_id);
  const int wrong = std::poisson_distribution<int>(spec_.wrong_rate)(rng);
  for (int i = 0; i < wrong; ++i) {
    const auto when = view + uniform(rng, seconds(1), hours(2));
    if (when < latest) add(p, when, ActionType::Submit, c.challenge_id, wrong_text(rng), Verdict::Wrong);
  }
  for (const auto& h : c.hints) {
    const auto when = view + uniform(rng, seconds(1), hours(1));
    if (chance(rng) < spec_.hint_probability && when < latest && h.released_by(when)) {
      add(p, when, ActionType::Hint, h.hint_id);
    }
  }
}

void Generator::plan_player(std::size_t p) {
  std::seed_seq seq{spec_.seed, static_cast<std::uint64_t>(p), std::uint64_t{0x5eed}};
  Rng rng(seq);
  const PairPlan* pair = nullptr;
  for (const auto& pp : pairs_) {
    if (pp.source == p || pp.copier == p) pair = &pp;
  }
  const auto target = nondl_target_.find(p);

  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const auto& g = groups_[gi];
    const std::size_t len = g.members.size();
    const bool planted = pair && pair->group == gi;

    std::size_t forced = 0;  // members [0, forced) must be solved
    if (planted) forced = pair->index_a + 2;
    if (target != nondl_target_.end()) {
      for (std::size_t k = 0; k < len; ++k) {
        if (g.members[k]->challenge_id == target->second) forced = k + 1;
      }
    }

    // Solve times for the prefix this player completes.
    std::vector<Timestamp> solve_at;
    const Duration x = planted ? pair->x : Duration{}, d = planted ? pair->d : Duration{};
    const Duration lead = planted ? pair->lead : Duration{}, lag = planted ? pair->lag : Duration{};
    for (std::size_t k = 0; k < len; ++k) {
      const bool solves = k < forced || chance(rng) < spec_.solve_probability.at(difficulty(g.members[k]->category));
      if (!solves) break;
      Timestamp t;
      if (planted) {
        const Duration region_width = static_cast<long long>(len + 5) * lane_;
        const Timestamp start = g.base + g.offsets.back() + static_cast<long long>(participants_.size() + 1) * lane_ +
                                static_cast<long long>(pair->region) * region_width;
        const bool copier = pair->copier == p;
        const std::size_t i = pair->index_a;
        const Timestamp t0 = start + static_cast<long long>(i) * lane_;
        const Timestamp t1 = t0 + 2 * lane_ + x + lag;
        if (k < i) t = start + static_cast<long long>(k) * lane_ + (copier ? lane_ / 2 : Duration{});
        else if (k == i) t = copier ? t0 + lane_ + x + lag - d : t0;
        else if (k == i + 1) t = t0 + lane_ + x + (copier ? lag : Duration{});
        else t = t1 + static_cast<long long>(k - i - 1) * lane_ + (copier ? lane_ / 2 : Duration{});
      } else {
        t = g.base + g.offsets[k] + static_cast<long long>(g.lane_of[p]) * lane_ + uniform(rng, Duration::zero(), jitter_);
      }
      solve_at.push_back(t);
    }

    for (std::size_t k = 0; k < solve_at.size(); ++k) {
      const auto& c = *g.members[k];
      const Timestamp unlock = k == 0 ? config_.opens_at + minutes(1) : solve_at[k - 1];
      const bool skip_dl = target != nondl_target_.end() && target->second == c.challenge_id;
      std::optional<Duration> cross_lead;
      if (planted && pair->copier == p && (k == pair->index_a || k == pair->index_a + 1)) {
        // The copier neither struggles nor asks for hints on the copied pair.
        cross_lead = k == pair->index_a ? lead : d / 3;
      }
      plan_solved(p, rng, c, unlock, solve_at[k], skip_dl, cross_lead);
      if (planted && pair->copier == p && k == pair->index_a) {
        const auto* b = g.members[k + 1];
        add(p, solve_at[k] - lead, ActionType::Submit, c.challenge_id, b->flag, Verdict::Wrong);
      }
    }
    if (solve_at.size() < len) {
      const Timestamp unlock = solve_at.empty() ? config_.opens_at + minutes(1) : solve_at.back();
      plan_attempt(p, rng, *g.members[solve_at.size()], unlock);
    }
  }
}

std::vector<GameEvent> Generator::execute() {
  std::sort(actions_.begin(), actions_.end(), [](const Action& a, const Action& b) {
    return std::tie(a.at, a.player, a.order) < std::tie(b.at, b.player, b.order);
  });
  // One login per player, just before their first action.
  std::map<std::size_t, Timestamp> first;
  for (const auto& a : actions_) first.emplace(a.player, a.at);
  for (const auto& [p, at] : first) {
    actions_.push_back({std::max(config_.opens_at, at - minutes(1)), p, 0, ActionType::Login, {}, {}, Verdict::Wrong, 0});
  }
  std::sort(actions_.begin(), actions_.end(), [](const Action& a, const Action& b) {
    const bool la = a.type == ActionType::Login, lb = b.type == ActionType::Login;
    return std::tie(a.at, a.player, lb, a.order) < std::tie(b.at, b.player, la, b.order);
  });

  EventStore store;
  Engine engine(config_, store);
  for (const auto& a : actions_) {
    const auto& pid = participants_[a.player]->player_id;
    switch (a.type) {
      case ActionType::Login: engine.login(pid, a.at); break;
      case ActionType::View: engine.view_challenge(pid, a.ref, a.at); break;
      case ActionType::Download: engine.download_asset(pid, a.ref, a.at); break;
      case ActionType::Hint: engine.display_hint(pid, a.ref, a.at); break;
      case ActionType::Feedback: engine.record_feedback(pid, a.ref, a.rating, std::nullopt, a.at); break;
      case ActionType::Submit: {
        const auto r = engine.submit_flag(pid, a.ref, a.text, a.at);
        if (r.verdict != a.expect) {
          throw std::logic_error("synth: planned " + std::string(to_string(a.expect)) + " for " + pid + " on " + a.ref +
                                 " but engine returned " + to_string(r.verdict));
        }
        break;
      }
    }
  }
  return store.snapshot();
}

SynthResult Generator::run() {
  validate();
  layout_groups();
  plan_pairs();

  // Non-downloader targets.
  if (n_nondl_ > 0) {
    std::vector<const Challenge*> with_files;
    for (const auto& c : config_.challenges) {
      if (std::any_of(c.assets.begin(), c.assets.end(), [](const FileAsset& a) { return a.required_for_solve; })) {
        with_files.push_back(&c);
      }
    }
    if (with_files.empty()) spec_error("non-downloaders need a challenge with required files");
    for (std::size_t i = 0; i < n_nondl_; ++i) {
      const auto* c = with_files[std::uniform_int_distribution<std::size_t>(0, with_files.size() - 1)(rng_)];
      nondl_target_[n_colluders_ + i] = c->challenge_id;
    }
  }

  // Place each group's base so its lanes and planted regions fit in the game.
  const Duration game = config_.closes_at - config_.opens_at;
  for (auto& g : groups_) {
    const Duration region_width = static_cast<long long>(g.members.size() + 5) * lane_;
    const Duration span = g.offsets.back() + static_cast<long long>(participants_.size() + 1) * lane_ +
                          static_cast<long long>(g.regions) * region_width + jitter_;
    const Duration slack = game - span - hours(3);
    if (slack < Duration::zero()) spec_error("game window too short for this cohort");
    g.base = config_.opens_at + hours(1) + uniform(rng_, Duration::zero(), slack);
  }

  for (std::size_t p = 0; p < participants_.size(); ++p) plan_player(p);

  for (const auto& pair : pairs_) {
    const auto& g = groups_[pair.group];
    const auto& a = g.members[pair.index_a]->challenge_id;
    const auto& b = g.members[pair.index_a + 1]->challenge_id;
    const auto& source = participants_[pair.source]->player_id;
    const auto& copier = participants_[pair.copier]->player_id;
    std::vector<std::string> both{source, copier};
    std::sort(both.begin(), both.end());
    truth_.push_back({IncidentKind::TimeVicinity, both, b});
    truth_.push_back({IncidentKind::QuickChainSolve, {copier}, b});
    truth_.push_back({IncidentKind::CrossFlag, {copier}, a});
  }
  for (const auto& [p, cid] : nondl_target_) {
    truth_.push_back({IncidentKind::MissingDownload, {participants_[p]->player_id}, cid});
  }
  std::sort(truth_.begin(), truth_.end());

  SynthResult result;
  result.log = execute();
  result.truth.expected = std::move(truth_);
  return result;
}

}  // namespace

SynthResult generate(const CohortSpec& spec, const GameConfig& config) { return Generator(spec, config).run(); }

GameState replay_log(const std::vector<GameEvent>& log, const GameConfig& config) {
  std::stringstream buffer;
  write_event_log(buffer, log);
  EventStore store;
  store.import_from(buffer);
  Engine engine(config, store);
  return engine.state();
}

}  // namespace flagtrail
