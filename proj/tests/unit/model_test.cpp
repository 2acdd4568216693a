#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "fixtures.hpp"
#include "flagtrail/error.hpp"
#include "flagtrail/model.hpp"

using namespace flagtrail;
using flagtrail::testing::small_game;

TEST(Validate, SmallGameIsValid) { EXPECT_TRUE(validate_config(small_game()).empty()); }

TEST(Validate, CollectsEveryViolation) {
  auto g = small_game();
  g.challenges[0].points = 40;
  g.challenges[1].flag = g.challenges[2].flag;
  g.chains.push_back({"loop", {"web1", "web1"}});
  g.players[1].auth_token = g.players[0].auth_token;
  g.closes_at = g.opens_at;
  const auto v = validate_config(g);
  EXPECT_GE(v.size(), 5u);
}

TEST(Validate, ChallengeInTwoChainsRejected) {
  auto g = small_game();
  g.chains.push_back({"other", {"web1", "t2"}});
  EXPECT_FALSE(validate_config(g).empty());
}

TEST(Validate, FlagPattern) {
  auto g = small_game();
  g.flag_pattern = R"(^FLAG\{[a-z]+\}$)";
  EXPECT_TRUE(validate_config(g).empty());
  g.challenges[0].flag = "flag-robots";
  EXPECT_EQ(validate_config(g).size(), 1u);
}

TEST(Alias, StableReadableAndKeyed) {
  const auto a = alias_for("alice", "pepper");
  EXPECT_EQ(a, alias_for("alice", "pepper"));
  EXPECT_NE(a, alias_for("alice", "salt"));
  EXPECT_NE(a, alias_for("bob", "pepper"));
  EXPECT_TRUE(std::regex_match(a, std::regex("[a-z]+-[a-z]+-[0-9a-f]{4}"))) << a;
  EXPECT_EQ(a.find("alice"), std::string::npos);
  EXPECT_THROW(alias_for("", "pepper"), Error);
}

TEST(Alias, FewCollisionsOverAClass) {
  std::set<std::string> seen;
  for (int i = 0; i < 500; ++i) seen.insert(alias_for("student" + std::to_string(i), "k"));
  EXPECT_EQ(seen.size(), 500u);
}

TEST(Flags, TrimmedExactMatch) {
  const auto g = small_game();
  const auto& c = *g.find_challenge("web1");
  EXPECT_TRUE(flag_matches(c, "FLAG{robots}"));
  EXPECT_TRUE(flag_matches(c, "  FLAG{robots}\n"));
  EXPECT_FALSE(flag_matches(c, "flag{robots}"));
  EXPECT_FALSE(flag_matches(c, "FLAG{robots} x"));
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Chains, Navigation) {
  const auto g = small_game();
  EXPECT_EQ(g.predecessor("t2"), "t1");
  EXPECT_EQ(g.successor("t2"), "t3");
  EXPECT_FALSE(g.predecessor("t1"));
  EXPECT_FALSE(g.successor("t3"));
  EXPECT_FALSE(g.chain_position("web1"));
}

TEST(Scoreboard, Ordering) {
  const auto t = flagtrail::testing::ts("2020-01-07T00:00:00Z");
  ScoreboardEntry a{"a", 10, t, 0}, b{"b", 10, t + seconds(1), 0}, c{"c", 20, t + hours(1), 0}, d{"d", 10, {}, 0},
      e{"e", 10, t, 0};
  EXPECT_TRUE(scoreboard_before(c, a));
  EXPECT_TRUE(scoreboard_before(a, b));
  EXPECT_TRUE(scoreboard_before(b, d));
  EXPECT_TRUE(scoreboard_before(a, e));
  EXPECT_FALSE(scoreboard_before(e, a));
}

TEST(Events, KindMatchesPayload) {
  GameEvent e;
  e.payload = FlagSubmissionPayload{"web1", "x", Verdict::Wrong};
  EXPECT_EQ(e.kind(), EventKind::FlagSubmission);
  ASSERT_NE(e.challenge_id(), nullptr);
  EXPECT_EQ(*e.challenge_id(), "web1");
  e.payload = HintDisplayPayload{"web2-h1"};
  EXPECT_EQ(e.challenge_id(), nullptr);
  for (auto k : kAllEventKinds) EXPECT_EQ(parse_event_kind(to_string(k)), k);
}
