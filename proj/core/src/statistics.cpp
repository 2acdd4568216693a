#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "flagtrail/analytics.hpp"
#include "flagtrail/error.hpp"

namespace flagtrail {

DistributionSummary summarize(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "summarize: empty sample");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  DistributionSummary s;
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

std::vector<HintLatencyStats> hint_latency_report(std::span<const GameEvent> log, const GameConfig& config,
                                                  std::size_t min_displays) {
  if (min_displays < 1) throw Error(ErrorCode::InvalidArgument, "min_displays must be at least 1");
  struct Display {
    std::string player;
    Timestamp at;
    std::uint64_t seq;
  };
  std::map<std::string, std::vector<Display>> displays;
  for (const auto& e : log) {
    if (const auto* h = e.as<HintDisplayPayload>()) displays[h->hint_id].push_back({e.player_id, e.at, e.seq});
  }
  std::map<std::pair<std::string, std::string>, Solve> solved;
  for (auto& s : correct_solves(log)) solved.emplace(std::pair{s.player_id, s.challenge_id}, std::move(s));

  std::vector<HintLatencyStats> out;
  for (const auto& c : config.challenges) {
    for (const auto& h : c.hints) {
      auto it = displays.find(h.hint_id);
      if (it == displays.end() || it->second.size() < min_displays) continue;
      HintLatencyStats stats;
      stats.hint_id = h.hint_id;
      stats.challenge_id = c.challenge_id;
      stats.display_count = it->second.size();
      std::vector<double> secs;
      for (const auto& d : it->second) {
        auto s = solved.find({d.player, c.challenge_id});
        if (s == solved.end() || s->second.seq < d.seq) continue;
        const Duration latency = s->second.at - d.at;
        stats.latencies.emplace_back(d.player, latency);
        secs.push_back(to_seconds(latency));
      }
      if (!secs.empty()) stats.seconds = summarize(std::move(secs));
      out.push_back(std::move(stats));
    }
  }
  return out;
}

Duration session_duration(std::span<const Timestamp> sorted_times, Duration gap) {
  Duration total{};
  if (sorted_times.empty()) return total;
  Timestamp run_start = sorted_times.front();
  for (std::size_t i = 1; i < sorted_times.size(); ++i) {
    if (sorted_times[i] - sorted_times[i - 1] > gap) {
      total += sorted_times[i - 1] - run_start;
      run_start = sorted_times[i];
    }
  }
  total += sorted_times.back() - run_start;
  return total;
}

std::vector<PlayerMetrics> player_metrics(std::span<const GameEvent> log, const GameConfig& config,
                                          Duration session_gap) {
  if (session_gap <= Duration::zero()) throw Error(ErrorCode::InvalidArgument, "session gap must be positive");
  struct Acc {
    PlayerMetrics m;
    std::vector<Timestamp> times;
    std::vector<Timestamp> solves;
  };
  std::map<std::string, Acc> acc;
  for (const auto& e : log) {
    const auto* record = config.find_player(e.player_id);
    if (record && record->role != Role::Player) continue;
    auto& a = acc[e.player_id];
    a.m.player_id = e.player_id;
    a.times.push_back(e.at);
    if (const auto* sub = e.as<FlagSubmissionPayload>()) {
      if (sub->verdict == Verdict::Wrong) ++a.m.wrong_flag_count;
      if (sub->verdict == Verdict::Correct) {
        a.solves.push_back(e.at);
        if (const auto* c = config.find_challenge(sub->challenge_id)) {
          a.m.bonus_inclusive_score += c->points;
          if (!c->is_bonus) a.m.total_score += c->points;
        }
      }
    } else if (const auto* h = e.as<HintDisplayPayload>()) {
      if (const auto* hint = config.find_hint(h->hint_id)) {
        a.m.total_score -= hint->cost;
        a.m.bonus_inclusive_score -= hint->cost;
      }
    }
  }
  std::vector<PlayerMetrics> out;
  for (auto& [id, a] : acc) {
    a.m.session_duration = session_duration(a.times, session_gap);
    if (a.solves.size() >= 2) a.m.first_to_last_solve = a.solves.back() - a.solves.front();
    out.push_back(std::move(a.m));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share rank mean((i+1)..(j+1))
    const double r = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Integer arithmetic on doubled ranks keeps the statistic exact for the
// sample sizes this is used with; larger inputs fall back to doubles.
constexpr std::size_t kExactLimit = 20'000;

void check_input(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "spearman: length mismatch");
  if (xs.size() < 3) throw Error(ErrorCode::InvalidArgument, "spearman: need at least 3 observations");
  for (auto span : {xs, ys}) {
    for (double v : span) {
      if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, "spearman: NaN input");
    }
    if (std::all_of(span.begin(), span.end(), [&](double v) { return v == span.front(); })) {
      throw Error(ErrorCode::InvalidArgument, "spearman: constant input");
    }
  }
}

CorrelationResult spearman_exact(const std::vector<double>& rx, const std::vector<double>& ry,
                                 const SpearmanOptions& options) {
  const auto n = static_cast<long long>(rx.size());
  std::vector<long long> a(rx.size()), b(ry.size());
  for (std::size_t i = 0; i < rx.size(); ++i) {
    a[i] = std::llround(2 * rx[i]);
    b[i] = std::llround(2 * ry[i]);
  }
  long long sa = 0, sb = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  auto cross = [&](const std::vector<long long>& bb) {
    long long sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) sab += a[i] * bb[i];
    return n * sab - sa * sb;
  };
  const long long sxx = n * saa - sa * sa;
  const long long syy = n * sbb - sb * sb;
  const long long sxy = cross(b);

  CorrelationResult r;
  r.n = rx.size();
  r.rho = std::clamp(static_cast<double>(sxy) / std::sqrt(static_cast<double>(sxx) * static_cast<double>(syy)), -1.0, 1.0);

  std::mt19937_64 rng(options.seed);
  std::vector<long long> shuffled = b;
  const long long observed = sxy < 0 ? -sxy : sxy;
  std::size_t extreme = 0;
  for (std::size_t k = 0; k < options.permutations; ++k) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const long long s = cross(shuffled);
    if ((s < 0 ? -s : s) >= observed) ++extreme;
  }
  r.p_value = static_cast<double>(extreme + 1) / static_cast<double>(options.permutations + 1);
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

CorrelationResult spearman_float(const std::vector<double>& rx, const std::vector<double>& ry,
                                 const SpearmanOptions& options) {
  CorrelationResult r;
  r.n = rx.size();
  r.rho = std::clamp(pearson(rx, ry), -1.0, 1.0);
  std::mt19937_64 rng(options.seed);
  std::vector<double> shuffled = ry;
  const double observed = std::abs(r.rho) * (1 - 1e-12);
  std::size_t extreme = 0;
  for (std::size_t k = 0; k < options.permutations; ++k) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (std::abs(pearson(rx, shuffled)) >= observed) ++extreme;
  }
  r.p_value = static_cast<double>(extreme + 1) / static_cast<double>(options.permutations + 1);
  return r;
}

}  // namespace

CorrelationResult spearman(std::span<const double> xs, std::span<const double> ys, const SpearmanOptions& options) {
  check_input(xs, ys);
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return xs.size() <= kExactLimit ? spearman_exact(rx, ry, options) : spearman_float(rx, ry, options);
}

CorrelationReport correlation_report(const std::vector<PlayerMetrics>& metrics, const MarksTable& marks,
                                     const SpearmanOptions& options, double alpha) {
  // variable -> (player -> value)
  std::vector<std::pair<std::string, std::map<std::string, double>>> columns;
  auto add = [&](std::string name) -> std::map<std::string, double>& {
    columns.emplace_back(std::move(name), std::map<std::string, double>{});
    return columns.back().second;
  };
  {
    auto& total = add("total_score");
    for (const auto& m : metrics) total[m.player_id] = static_cast<double>(m.total_score);
    auto& bonus = add("bonus_inclusive_score");
    for (const auto& m : metrics) bonus[m.player_id] = static_cast<double>(m.bonus_inclusive_score);
  }
  for (const auto& col : marks.columns) {
    auto& values = add(col);
    for (const auto& [player, row] : marks.rows) {
      if (auto it = row.find(col); it != row.end() && !std::isnan(it->second)) values[player] = it->second;
    }
  }
  {
    auto& wrong = add("wrong_flag_count");
    for (const auto& m : metrics) wrong[m.player_id] = static_cast<double>(m.wrong_flag_count);
    auto& session = add("session_duration_s");
    for (const auto& m : metrics) session[m.player_id] = to_seconds(m.session_duration);
    auto& span = add("first_to_last_solve_s");
    for (const auto& m : metrics) {
      if (m.first_to_last_solve) span[m.player_id] = to_seconds(*m.first_to_last_solve);
    }
  }

  CorrelationReport report;
  report.alpha = alpha;
  for (const auto& [name, values] : columns) report.variables.push_back(name);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      const auto& [xname, xv] = columns[i];
      const auto& [yname, yv] = columns[j];
      std::vector<double> xs, ys;
      for (const auto& [player, x] : xv) {
        if (auto it = yv.find(player); it != yv.end()) {
          xs.push_back(x);
          ys.push_back(it->second);
        }
      }
      CorrelationEntry entry;
      entry.result.variable_x = xname;
      entry.result.variable_y = yname;
      entry.result.n = xs.size();
      const auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double d) { return d == v.front(); });
      };
      if (xs.size() < 3) {
        entry.masked = true;
        entry.reason = "fewer than 3 players";
      } else if (constant(xs) || constant(ys)) {
        entry.masked = true;
        entry.reason = "constant input";
      } else {
        auto r = spearman(xs, ys, options);
        entry.result.rho = r.rho;
        entry.result.p_value = r.p_value;
        if (r.p_value > alpha) {
          entry.masked = true;
          entry.reason = "p > " + std::to_string(alpha).substr(0, 4);
        }
      }
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

}  // namespace flagtrail
