#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flagtrail/analytics.hpp"
#include "flagtrail/error.hpp"
#include "flagtrail/synth.hpp"

using namespace flagtrail;
using flagtrail::testing::cohort_game;

namespace {

std::vector<IncidentKey> detected(const SynthResult& r, const GameConfig& g) {
  std::vector<IncidentKey> keys;
  for (const auto& inc : incident_report(r.log, g)) keys.push_back(key_of(inc));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

}  // namespace

TEST(Synth, HonestCohortIsClean) {
  const auto g = cohort_game(40);
  CohortSpec spec;
  spec.n_honest = 40;
  const auto r = generate(spec, g);
  EXPECT_GT(r.log.size(), 1000u);
  EXPECT_TRUE(r.truth.expected.empty());
  EXPECT_TRUE(incident_report(r.log, g).empty());
}

TEST(Synth, PlantedIncidentsDetectedExactly) {
  const auto g = cohort_game(60);
  CohortSpec spec;
  spec.seed = 3;
  spec.n_honest = 50;
  spec.n_colluding_pairs = 3;
  spec.n_non_downloaders = 2;
  const auto r = generate(spec, g);
  EXPECT_EQ(r.truth.expected.size(), 3u * 3 + 2);
  EXPECT_EQ(detected(r, g), r.truth.expected);
}

TEST(Synth, Deterministic) {
  const auto g = cohort_game(30);
  CohortSpec spec;
  spec.n_honest = 26;
  spec.n_colluding_pairs = 1;
  spec.n_non_downloaders = 1;
  const auto a = generate(spec, g);
  const auto b = generate(spec, g);
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.truth.expected, b.truth.expected);
  spec.seed = 8;
  EXPECT_NE(generate(spec, g).log, a.log);
}

TEST(Synth, ReplaysCleanly) {
  const auto g = cohort_game(20);
  CohortSpec spec;
  spec.n_honest = 16;
  spec.n_colluding_pairs = 2;
  const auto r = generate(spec, g);
  EXPECT_EQ(replay_log(r.log, g), replay(g, r.log));
}

TEST(Synth, RejectsImpossibleSpecs) {
  const auto g = cohort_game(10);
  CohortSpec too_many;
  too_many.n_honest = 11;
  EXPECT_THROW(generate(too_many, g), Error);

  CohortSpec bad_margin;
  bad_margin.n_honest = 5;
  bad_margin.vicinity_margin = Duration::zero();
  EXPECT_THROW(generate(bad_margin, g), Error);

  auto no_chains = cohort_game(10, 6, 0);
  CohortSpec pairs;
  pairs.n_honest = 2;
  pairs.n_colluding_pairs = 1;
  EXPECT_THROW(generate(pairs, no_chains), Error);

  auto short_game = g;
  short_game.closes_at = short_game.opens_at + hours(4);
  CohortSpec few;
  few.n_honest = 5;
  EXPECT_THROW(generate(few, short_game), Error);
}

TEST(Synth, SpecRoundTrip) {
  CohortSpec s;
  s.seed = 42;
  s.n_colluding_pairs = 4;
  s.work_minutes["basic"] = {2.5, 0.5};
  s.lag_min = seconds(20);
  EXPECT_EQ(parse_cohort_spec(serialize_cohort_spec(s)), s);
  EXPECT_THROW(parse_cohort_spec("seed: 1\nhonesty: 3\n"), Error);
}
