#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "flagtrail/analytics.hpp"
#include "flagtrail/error.hpp"
#include "log_builder.hpp"

using namespace flagtrail;
using flagtrail::testing::LogBuilder;
using flagtrail::testing::small_game;
using flagtrail::testing::ts;

namespace {
const Timestamp T0 = ts("2020-01-08T12:00:00.000Z");

double spearman_rho(std::vector<double> x, std::vector<double> y) { return spearman(x, y, {200, 1}).rho; }
}  // namespace

TEST(Summarize, LinearInterpolationQuartiles) {
  const auto s = summarize({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.q1, 1.75);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.q3, 3.25);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  const auto one = summarize({7});
  EXPECT_EQ(one.min, 7);
  EXPECT_EQ(one.q3, 7);
  EXPECT_THROW(summarize({}), Error);
}

TEST(HintLatency, SixtySeconds) {
  const auto g = small_game();
  LogBuilder b(T0);
  b.at(seconds(0)).hint("alice", "web2-h1").at(seconds(60)).solve("alice", "web2");
  const auto r = hint_latency_report(b.events(), g, 1);
  ASSERT_EQ(r.size(), 1u);
  ASSERT_EQ(r[0].latencies.size(), 1u);
  EXPECT_EQ(r[0].latencies[0].second, seconds(60));
}

TEST(HintLatency, TenDisplaysExcludedElevenIncluded) {
  const auto g = small_game();
  LogBuilder b(T0);
  for (int i = 0; i < 10; ++i) b.at(seconds(i)).hint(("p" + std::to_string(i)).c_str(), "web2-h1");
  EXPECT_TRUE(hint_latency_report(b.events(), g, 11).empty());
  b.at(seconds(10)).hint("p10", "web2-h1");
  EXPECT_EQ(hint_latency_report(b.events(), g, 11).size(), 1u);
}

TEST(HintLatency, OneMinuteMedian) {
  const auto g = small_game();
  LogBuilder b(T0);
  for (const char* p : {"alice", "bob", "carol"}) {
    b.at(minutes(10)).hint(p, "bonus1-h1");
  }
  for (const char* p : {"alice", "bob", "carol"}) b.at(minutes(11)).solve(p, "bonus1");
  const auto r = hint_latency_report(b.events(), g, 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].seconds->median, 60.0);
  EXPECT_EQ(r[0].seconds->mean, 60.0);
}

TEST(HintLatency, DisplayAfterSolveNotALatency) {
  const auto g = small_game();
  LogBuilder b(T0);
  b.solve("alice", "web2").at(seconds(5)).hint("alice", "web2-h1");
  const auto r = hint_latency_report(b.events(), g, 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].display_count, 1u);
  EXPECT_TRUE(r[0].latencies.empty());
  EXPECT_FALSE(r[0].seconds);
}

TEST(Session, GapSplitsRuns) {
  const std::vector<Timestamp> t{T0, T0 + minutes(10), T0 + minutes(70)};
  EXPECT_EQ(session_duration(t, minutes(30)), minutes(10));
  EXPECT_EQ(session_duration(t, minutes(60)), minutes(70));
  EXPECT_EQ(session_duration({}, minutes(30)), Duration::zero());
}

TEST(Metrics, CountsAndScores) {
  const auto g = small_game();
  LogBuilder b(T0);
  for (int i = 0; i < 5; ++i) b.submit("alice", "web2", "FLAG{no}");
  b.solve("alice", "web2").hint("alice", "web2-h1");
  b.at(hours(24 * 19)).solve("alice", "bonus1");
  b.submit("prof", "web1", "FLAG{robots}");
  const auto m = player_metrics(b.events(), g);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].wrong_flag_count, 5);
  EXPECT_EQ(m[0].total_score, 13);
  EXPECT_EQ(m[0].bonus_inclusive_score, 23);
  EXPECT_EQ(m[0].first_to_last_solve, hours(24 * 19));
  EXPECT_EQ(m[0].session_duration, Duration::zero());
}

TEST(Spearman, Examples) {
  EXPECT_EQ(spearman_rho({1, 2, 3}, {10, 20, 30}), 1.0);
  EXPECT_EQ(spearman_rho({1, 2, 3}, {30, 20, 10}), -1.0);
  EXPECT_EQ(spearman_rho({1, 2, 3, 4}, {2, 1, 4, 3}), 0.6);
}

TEST(Spearman, Errors) {
  EXPECT_THROW(spearman_rho({1, 2}, {1, 2}), Error);
  EXPECT_THROW(spearman_rho({1, 2, 3}, {1, 2}), Error);
  EXPECT_THROW(spearman_rho({1, 1, 1}, {1, 2, 3}), Error);
  EXPECT_THROW(spearman_rho({1, 2, std::nan("")}, {1, 2, 3}), Error);
}

TEST(Spearman, AverageRanks) {
  const std::vector<double> v{10, 20, 20, 5, 20};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{2, 4, 4, 1, 4}));
}

TEST(Spearman, PermutationPValue) {
  std::vector<double> x(30), y(30);
  for (int i = 0; i < 30; ++i) x[i] = y[i] = i;
  const auto r = spearman(x, y, {999, 5});
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 1000.0);
  const auto same = spearman(x, y, {999, 5});
  EXPECT_EQ(same.p_value, r.p_value);
}

TEST(Correlation, CoMonotoneUnmasked) {
  std::vector<PlayerMetrics> metrics;
  MarksTable marks;
  marks.columns = {"midterm"};
  for (int i = 0; i < 25; ++i) {
    PlayerMetrics m;
    m.player_id = "p" + std::to_string(100 + i);
    m.total_score = i * 3;
    m.bonus_inclusive_score = i * 4;
    m.wrong_flag_count = i % 4;
    m.session_duration = minutes(i);
    metrics.push_back(m);
    marks.rows[m.player_id]["midterm"] = 50 + i * i;
  }
  const auto rep = correlation_report(metrics, marks, {999, 3});
  bool found = false;
  for (const auto& e : rep.entries) {
    if (e.result.variable_x == "bonus_inclusive_score" && e.result.variable_y == "midterm") {
      found = true;
      EXPECT_FALSE(e.masked);
      EXPECT_DOUBLE_EQ(e.result.rho, 1.0);
    }
    if (e.result.variable_y == "first_to_last_solve_s") {
      EXPECT_TRUE(e.masked);
      EXPECT_EQ(e.reason, "fewer than 3 players");
    }
  }
  EXPECT_TRUE(found);
}

TEST(Correlation, IndependentColumnsMostlyMasked) {
  int masked = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 100);
    std::vector<PlayerMetrics> metrics;
    MarksTable marks;
    marks.columns = {"midterm"};
    for (int i = 0; i < 30; ++i) {
      PlayerMetrics m;
      m.player_id = "p" + std::to_string(i);
      m.total_score = static_cast<long long>(u(rng) * 1000);
      metrics.push_back(m);
      marks.rows[m.player_id]["midterm"] = u(rng);
    }
    const auto rep = correlation_report(metrics, marks, {499, static_cast<std::uint64_t>(seed)});
    for (const auto& e : rep.entries) {
      if (e.result.variable_x == "total_score" && e.result.variable_y == "midterm") masked += e.masked;
    }
  }
  EXPECT_GT(masked, 80);
}
