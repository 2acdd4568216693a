#include <gtest/gtest.h>

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
}

TEST(TimeVicinity, InsideAndOutsideWindow) {
  LogBuilder in(T0);
  in.at(minutes(0)).solve("alice", "web1").at(minutes(3)).solve("bob", "web1");
  const auto r = detect_time_vicinity(in.events(), minutes(10));
  ASSERT_EQ(r.incidents.size(), 1u);
  EXPECT_EQ(r.incidents[0].players, (std::vector<std::string>{"alice", "bob"}));
  EXPECT_EQ(r.incidents[0].severity, Severity::Weak);
  EXPECT_EQ(r.incidents[0].delta, minutes(3));

  LogBuilder out(T0);
  out.at(minutes(0)).solve("alice", "web1").at(minutes(11)).solve("bob", "web1");
  EXPECT_TRUE(detect_time_vicinity(out.events(), minutes(10)).incidents.empty());
}

TEST(TimeVicinity, BoundaryIsInclusive) {
  LogBuilder b(T0);
  b.at(minutes(0)).solve("alice", "web1").at(minutes(10)).solve("bob", "web1");
  EXPECT_EQ(detect_time_vicinity(b.events(), minutes(10)).incidents.size(), 1u);
}

TEST(TimeVicinity, ThreePlayersThreePairsMatchBruteForce) {
  LogBuilder b(T0);
  b.at(minutes(0)).solve("carol", "web1").at(minutes(4)).solve("alice", "web1").at(minutes(9)).solve("bob", "web1");
  b.at(minutes(30)).solve("dave", "web1");
  const auto r = detect_time_vicinity(b.events(), minutes(10));
  // Brute force over all pairs.
  std::size_t expected = 0;
  const auto solves = correct_solves(b.events());
  for (std::size_t i = 0; i < solves.size(); ++i) {
    for (std::size_t j = i + 1; j < solves.size(); ++j) {
      const auto d = solves[j].at - solves[i].at;
      if (solves[i].challenge_id == solves[j].challenge_id && d <= minutes(10) && d >= -minutes(10)) ++expected;
    }
  }
  EXPECT_EQ(expected, 3u);
  EXPECT_EQ(r.incidents.size(), expected);
}

TEST(TimeVicinity, OnlyFirstCorrectCounts) {
  LogBuilder b(T0);
  b.at(minutes(0)).solve("alice", "web1");
  b.at(minutes(40)).solve("bob", "web1").submit("alice", "web1", "ok", Verdict::RejectedAlreadySolved);
  EXPECT_TRUE(detect_time_vicinity(b.events(), minutes(10)).incidents.empty());
}

TEST(TimeVicinity, CurveIsCumulative) {
  LogBuilder b(T0);
  b.at(seconds(0)).solve("a", "web1").at(seconds(90)).solve("b", "web1").at(seconds(330)).solve("c", "web1");
  const auto r = detect_time_vicinity(b.events(), minutes(5));
  // Pair deltas: 90 s, 240 s, 330 s.
  std::vector<long long> counts;
  for (const auto& p : r.curve) counts.push_back(p.cumulative_pairs);
  EXPECT_EQ(counts, (std::vector<long long>{0, 0, 1, 1, 2, 2}));
  EXPECT_THROW(detect_time_vicinity(b.events(), Duration::zero()), Error);
}

TEST(CrossFlag, LockedFlagToPredecessor) {
  const auto g = small_game();
  LogBuilder b(T0);
  b.at(minutes(0)).solve("bob", "t1").solve("bob", "t2").at(minutes(5)).solve("bob", "t3");
  b.at(minutes(20)).solve("carol", "t1").at(minutes(21)).submit("carol", "t2", "FLAG{roof}");
  b.at(minutes(22)).submit("carol", "t3", " FLAG{roof} ", Verdict::RejectedLocked);  // its own flag
  b.at(minutes(23)).submit("carol", "t3", "FLAG{stairs}", Verdict::RejectedLocked);
  const auto inc = detect_cross_flag(b.events(), g);
  ASSERT_EQ(inc.size(), 2u);
  EXPECT_EQ(inc[0].challenge_id, "t2");
  EXPECT_EQ(inc[0].related_challenge_id, "t3");
  EXPECT_EQ(inc[0].severity, Severity::Strong);
  EXPECT_EQ(inc[0].delta, minutes(16));
  EXPECT_EQ(inc[0].event_seqs, (std::vector<std::uint64_t>{3, 5}));
  EXPECT_EQ(inc[1].challenge_id, "t3");
  EXPECT_EQ(inc[1].related_challenge_id, "t2");
  EXPECT_EQ(inc[1].players, (std::vector<std::string>{"carol"}));
}

TEST(CrossFlag, NoMatchNoIncidentAndSelfConfusionCounts) {
  const auto g = small_game();
  LogBuilder b(T0);
  b.submit("alice", "web1", "FLAG{what}");
  EXPECT_TRUE(detect_cross_flag(b.events(), g).empty());
  b.at(minutes(1)).submit("alice", "web1", "FLAG{robots}", Verdict::Correct);
  b.at(minutes(2)).submit("alice", "web2", "FLAG{robots}");
  const auto inc = detect_cross_flag(b.events(), g);
  ASSERT_EQ(inc.size(), 1u);
  EXPECT_EQ(inc[0].players, (std::vector<std::string>{"alice"}));
  EXPECT_EQ(inc[0].severity, Severity::Strong);
}

TEST(MissingDownload, RulesAndBoundaries) {
  auto g = small_game();
  g.challenges[1].assets.push_back({"web2-a2", "web2", "more.bin", "", true});
  LogBuilder b(T0);
  b.solve("alice", "web2");                          // zero downloads
  b.download("bob", "web2-a2").solve("bob", "web2");  // one of two
  b.solve("carol", "web1");                          // no assets at all
  b.solve("dave", "web2").download("dave", "web2-a1");  // download after the solve
  const auto any = detect_missing_download(b.events(), g, DownloadRule::AnyRequired);
  ASSERT_EQ(any.size(), 2u);
  EXPECT_EQ(any[0].players[0], "alice");
  EXPECT_EQ(any[1].players[0], "dave");
  const auto all = detect_missing_download(b.events(), g, DownloadRule::AllRequired);
  EXPECT_EQ(all.size(), 3u);
}

TEST(MissingDownload, OptionalAssetsDoNotCount) {
  auto g = small_game();
  g.challenges[1].assets[0].required_for_solve = false;
  LogBuilder b(T0);
  b.solve("alice", "web2");
  EXPECT_TRUE(detect_missing_download(b.events(), g).empty());
}

TEST(QuickSolve, NineSecondsAgainstSeventyFive) {
  const auto g = small_game();
  LogBuilder b(T0);
  b.at(seconds(0)).solve("alice", "t1").at(seconds(9)).solve("alice", "t2");
  b.at(seconds(100)).solve("bob", "t1").at(seconds(176)).solve("bob", "t2");
  b.at(seconds(200)).solve("carol", "t1").at(seconds(275)).solve("carol", "t2");
  b.at(seconds(300)).solve("dave", "t1");
  const auto r = detect_quick_chain_solves(b.events(), g);
  ASSERT_EQ(r.incidents.size(), 1u);
  EXPECT_EQ(r.incidents[0].players[0], "alice");
  EXPECT_EQ(r.incidents[0].delta, seconds(9));
  EXPECT_EQ(r.incidents[0].threshold, seconds(75));
  EXPECT_EQ(r.incidents[0].related_challenge_id, "t1");
  EXPECT_EQ(r.deltas.size(), 3u);  // dave never solved t2
}

TEST(IncidentReport, MergedAndOrdered) {
  const auto g = small_game();
  LogBuilder b(T0);
  b.at(seconds(0)).solve("bob", "web1").at(seconds(30)).solve("alice", "web1");
  b.at(minutes(2)).solve("alice", "t1").at(minutes(2) + seconds(5)).solve("alice", "t2");
  b.at(minutes(3)).submit("bob", "web2", "FLAG{stairs}");
  b.at(minutes(4)).solve("carol", "web2");
  const auto all = incident_report(b.events(), g);
  ASSERT_EQ(all.size(), 4u);
  for (std::size_t i = 0; i + 1 < all.size(); ++i) EXPECT_LE(all[i].severity, all[i + 1].severity);
  EXPECT_EQ(all.back().kind, IncidentKind::TimeVicinity);
  EXPECT_EQ(all[0].players[0], "alice");
  EXPECT_EQ(all[0].kind, IncidentKind::QuickChainSolve);

  IncidentReportOptions narrow;
  narrow.window = seconds(10);
  EXPECT_EQ(incident_report(b.events(), g, narrow).size(), 3u);
}

TEST(IncidentReport, EmptyLog) { EXPECT_TRUE(incident_report({}, small_game()).empty()); }
