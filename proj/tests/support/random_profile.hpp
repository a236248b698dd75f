// Random profiles for property checks.
#pragma once

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "popdyn/profile.hpp"

namespace popdyn::testing {

/// Profile with up to four groups per role, shares in twentieths and
/// thresholds in hundredths, drawn until the uniqueness check passes.
inline PopulationProfile random_profile(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_int_distribution<int> level(1, 99);
  for (;;) {
    const int p = count(rng);
    const int q = count(rng);
    const int groups = p + q;
    if (groups == 0) continue;
    // Split 20 twentieths into `groups` positive parts.
    std::vector<int> cuts{0, 20};
    std::uniform_int_distribution<int> cut(1, 19);
    while (static_cast<int>(cuts.size()) < groups + 1) {
      const int c = cut(rng);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<Subpopulation> anti, coord;
    std::vector<int> used;
    bool distinct = true;
    for (int g = 0; g < groups; ++g) {
      const int t = level(rng);
      if (std::find(used.begin(), used.end(), t) != used.end()) distinct = false;
      used.push_back(t);
      Subpopulation s{Rational(cuts[g + 1] - cuts[g], 20), Rational(t, 100)};
      (g < p ? anti : coord).push_back(s);
    }
    if (!distinct) continue;
    auto profile = PopulationProfile::make(std::move(anti), std::move(coord));
    if (profile.validation().status == ValidationStatus::Pass) return profile;
  }
}

}  // namespace popdyn::testing
