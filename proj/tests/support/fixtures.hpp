#pragma once

#include <string>
#include <vector>

#include "flagtrail/model.hpp"
#include "flagtrail/time.hpp"

namespace flagtrail::testing {

inline Timestamp ts(const char* iso) { return parse_timestamp(iso); }

/// 2020-01-06 08:00 to 2020-01-20 20:00. Challenges:
///   web1 (basic, 5), web2 (medium, 15, hint web2-h1 cost 2, asset web2-a1 required),
///   chain "tower": t1 (basic 5) -> t2 (medium 15, min_solve 75s) -> t3 (advanced 25)
///   bonus1 (bonus-basic, 10, hint bonus1-h1 free)
/// Players alice, bob, carol, dave (players) and prof (instructor); token "tok-<id>".
GameConfig small_game();

/// `players` player accounts p000.. plus instructor "prof", `challenges`
/// challenges c00.. (every third has a required asset, every fourth a free hint)
/// and `chains` chains of three members each. Flags "FLAG{cNN-<tag>}".
GameConfig cohort_game(std::size_t players, std::size_t challenges = 20, std::size_t chains = 2);

}  // namespace flagtrail::testing
