#include "fixtures.hpp"

#include <cstdio>

namespace flagtrail::testing {

GameConfig small_game() {
  GameConfig g;
  g.game_id = "unit";
  g.title = "Unit game";
  g.opens_at = ts("2020-01-06T08:00:00.000Z");
  g.closes_at = ts("2020-01-20T20:00:00.000Z");
  g.anonymization_salt = "pepper";

  Challenge web1{"web1", "Robots", "Look around.", Category::Basic, 5, "FLAG{robots}", {}, {}, seconds(60), false};
  Challenge web2{"web2", "Cookies", "Eat one.", Category::Medium, 15, "FLAG{cookies}", {}, {}, seconds(120), false};
  web2.hints.push_back({"web2-h1", "web2", 2, "cookies", "Check the session cookie.", std::nullopt});
  web2.assets.push_back({"web2-a1", "web2", "jar.bin", "", true});
  Challenge t1{"t1", "Gate", "", Category::Basic, 5, "FLAG{gate}", {}, {}, seconds(60), false};
  Challenge t2{"t2", "Stairs", "", Category::Medium, 15, "FLAG{stairs}", {}, {}, seconds(75), false};
  Challenge t3{"t3", "Roof", "", Category::Advanced, 25, "FLAG{roof}", {}, {}, seconds(300), false};
  Challenge bonus1{"bonus1", "Extra", "", Category::BonusBasic, 10, "FLAG{extra}", {}, {}, seconds(60), true};
  bonus1.hints.push_back({"bonus1-h1", "bonus1", 0, "start", "Begin at the end.", std::nullopt});
  g.challenges = {web1, web2, t1, t2, t3, bonus1};
  g.chains = {{"tower", {"t1", "t2", "t3"}}};
  for (const char* id : {"alice", "bob", "carol", "dave"}) {
    g.players.push_back({id, std::string("Real ") + id, std::string("tok-") + id, Role::Player});
  }
  g.players.push_back({"prof", "Professor Real", "tok-prof", Role::Instructor});
  return g;
}

GameConfig cohort_game(std::size_t players, std::size_t challenges, std::size_t chains) {
  GameConfig g;
  g.game_id = "cohort";
  g.title = "Cohort game";
  g.opens_at = ts("2020-02-03T08:00:00.000Z");
  g.closes_at = ts("2020-02-24T20:00:00.000Z");
  g.anonymization_salt = "cohort-salt";
  const Category cats[] = {Category::Basic, Category::Medium, Category::Advanced};
  const int points[] = {5, 15, 25};
  char id[32];
  for (std::size_t i = 0; i < challenges; ++i) {
    std::snprintf(id, sizeof id, "c%02zu", i);
    Challenge c;
    c.challenge_id = id;
    c.title = std::string("Challenge ") + id;
    c.category = cats[i % 3];
    c.points = points[i % 3];
    c.flag = std::string("FLAG{") + id + "-" + std::to_string(i * 7919 % 1000) + "}";
    c.min_solve = seconds(60);
    if (i % 3 == 0) c.assets.push_back({c.challenge_id + "-a1", c.challenge_id, c.challenge_id + ".bin", "", true});
    if (i % 4 == 0) c.hints.push_back({c.challenge_id + "-h1", c.challenge_id, 0, "start", "A nudge.", std::nullopt});
    g.challenges.push_back(std::move(c));
  }
  for (std::size_t k = 0; k < chains && 3 * k + 3 <= challenges; ++k) {
    Chain chain;
    chain.chain_id = "chain" + std::to_string(k);
    for (std::size_t m = 0; m < 3; ++m) {
      // Chains use the tail of the challenge list.
      auto& c = g.challenges[challenges - 1 - 3 * k - (2 - m)];
      if (m > 0) c.min_solve = seconds(75);
      chain.members.push_back(c.challenge_id);
    }
    g.chains.push_back(std::move(chain));
  }
  for (std::size_t i = 0; i < players; ++i) {
    std::snprintf(id, sizeof id, "p%03zu", i);
    g.players.push_back({id, std::string("Name ") + id, std::string("tok-") + id, Role::Player});
  }
  g.players.push_back({"prof", "Professor", "tok-prof", Role::Instructor});
  return g;
}

}  // namespace flagtrail::testing
