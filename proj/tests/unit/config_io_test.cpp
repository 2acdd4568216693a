#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "flagtrail/config_io.hpp"
#include "flagtrail/error.hpp"

using namespace flagtrail;
using flagtrail::testing::cohort_game;
using flagtrail::testing::small_game;

TEST(ConfigIo, RoundTripSmallGame) {
  auto g = small_game();
  g.challenges[1].hints[0].released_at = g.opens_at + hours(5);
  g.flag_pattern = R"(^FLAG\{.+\}$)";
  EXPECT_EQ(parse_config(serialize_config(g)), g);
}

TEST(ConfigIo, RoundTripRandomized) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = cohort_game(1 + rng() % 30, 3 + rng() % 20, rng() % 3);
    g.hint_offer_dwell = Duration{static_cast<long long>(1 + rng() % 10'000'000)};
    g.vicinity_window = Duration{static_cast<long long>(1 + rng() % 10'000'000)};
    for (auto& c : g.challenges) {
      c.min_solve = Duration{static_cast<long long>(1 + rng() % 1'000'000)};
      c.description = "line one\nline: \"two\" # not a comment";
      for (auto& h : c.hints) h.cost = static_cast<int>(rng() % 5);
    }
    ASSERT_EQ(parse_config(serialize_config(g)), g) << "trial " << trial;
  }
}

TEST(ConfigIo, UnknownKeyNamesLine) {
  const std::string text =
      "game_id: g\n"
      "opens_at: 2020-01-01T00:00:00Z\n"
      "closes_at: 2020-01-02T00:00:00Z\n"
      "challenges:\n"
      "  - id: a\n"
      "    points: 5\n"
      "    colour: red\n";
  try {
    parse_config(text);
    FAIL() << "accepted an unknown key";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
  }
}

TEST(ConfigIo, MissingRequiredKey) {
  EXPECT_THROW(parse_config("game_id: g\n"), Error);
  EXPECT_THROW(parse_config("- just\n- a list\n"), Error);
  EXPECT_THROW(parse_config("game_id: [unclosed\n"), Error);
}

TEST(ConfigIo, SecretsSplitAndApply) {
  const auto g = small_game();
  auto [published, secrets] = split_secrets(g);
  for (const auto& c : published.challenges) EXPECT_TRUE(c.flag.empty());
  for (const auto& p : published.players) EXPECT_TRUE(p.auth_token.empty());
  const auto text = serialize_config(published);
  EXPECT_EQ(text.find("FLAG{"), std::string::npos);
  EXPECT_EQ(text.find("tok-"), std::string::npos);

  auto restored = parse_config(text);
  apply_secrets(restored, parse_secrets(serialize_secrets(secrets)));
  EXPECT_EQ(restored, g);
}

TEST(ConfigIo, SecretsForUnknownIdsRejected) {
  auto g = small_game();
  Secrets s;
  s.flags["nope"] = "FLAG{x}";
  EXPECT_THROW(apply_secrets(g, s), Error);
  Secrets t;
  t.tokens["ghost"] = "tok";
  EXPECT_THROW(apply_secrets(g, t), Error);
}
