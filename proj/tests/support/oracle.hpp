// Brute-force reference implementations. They follow the definitions
// literally (agent by agent, rational comparisons, dense reachability) and
// share no code with the library beyond the profile container.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "popdyn/profile.hpp"

namespace popdyn::oracle {

using Counts = std::vector<std::int64_t>;

/// Probability numerator (over 2) that one agent ends up playing A.
inline int prefers_a_twice(const PopulationProfile& profile, std::size_t p, const Rational& x, bool plays_a,
                           std::int64_t n, TieRule tie) {
  const Rational& tau = profile.tau(p);
  const bool anti = profile.role(p) == Role::Anticoordinator;
  // Self-excluding rules shift an A-player's bound by 1/N.
  const Rational bound = (plays_a && tie != TieRule::SelfInclusivePreferA) ? tau + Rational(1, n) : tau;
  if (x == bound) {
    switch (tie) {
      case TieRule::PreferA:
      case TieRule::SelfInclusivePreferA: return 2;
      case TieRule::PreferB: return 0;
      case TieRule::UniformRandom: return 1;
    }
  }
  const bool a = anti ? x < bound : x > bound;
  return a ? 2 : 0;
}

/// Distribution of the next state, activating each of the N agents in turn.
inline std::map<Counts, Rational> transition(const PopulationProfile& profile, const Counts& counts, std::int64_t n,
                                             TieRule tie) {
  std::map<Counts, Rational> out;
  std::int64_t total = 0;
  for (const auto c : counts) total += c;
  const Rational x(total, n);
  const Rational agent_weight(1, 2 * n);
  for (std::size_t p = 0; p < counts.size(); ++p) {
    const std::int64_t members = (profile.rho(p) * Rational(n)).numerator_i64();
    for (std::int64_t a = 0; a < members; ++a) {
      const bool plays_a = a < counts[p];
      const int w = prefers_a_twice(profile, p, x, plays_a, n, tie);
      Counts switched = counts;
      switched[p] += plays_a ? -1 : 1;
      const int stay_w = plays_a ? w : 2 - w;
      if (stay_w > 0) out[counts] += agent_weight * Rational(stay_w);
      if (stay_w < 2) out[switched] += agent_weight * Rational(2 - stay_w);
    }
  }
  return out;
}

inline std::vector<Counts> all_states(const PopulationProfile& profile, std::int64_t n) {
  std::vector<Counts> states{Counts{}};
  for (std::size_t p = 0; p < profile.size(); ++p) {
    const std::int64_t members = (profile.rho(p) * Rational(n)).numerator_i64();
    std::vector<Counts> next;
    for (const auto& s : states) {
      for (std::int64_t c = 0; c <= members; ++c) {
        Counts t = s;
        t.push_back(c);
        next.push_back(std::move(t));
      }
    }
    states = std::move(next);
  }
  return states;
}

/// Closed classes by transitive closure of the reachability relation.
inline std::set<std::set<Counts>> closed_classes(const PopulationProfile& profile, std::int64_t n, TieRule tie) {
  const auto states = all_states(profile, n);
  const std::size_t m = states.size();
  std::map<Counts, std::size_t> index;
  for (std::size_t k = 0; k < m; ++k) index[states[k]] = k;
  std::vector<std::vector<char>> reach(m, std::vector<char>(m, 0));
  for (std::size_t k = 0; k < m; ++k) {
    reach[k][k] = 1;
    for (const auto& [to, pr] : transition(profile, states[k], n, tie)) {
      if (pr.sign() > 0) reach[k][index.at(to)] = 1;
    }
  }
  for (std::size_t via = 0; via < m; ++via) {
    for (std::size_t a = 0; a < m; ++a) {
      if (!reach[a][via]) continue;
      for (std::size_t b = 0; b < m; ++b) {
        if (reach[via][b]) reach[a][b] = 1;
      }
    }
  }
  std::set<std::set<Counts>> out;
  for (std::size_t a = 0; a < m; ++a) {
    bool closed = true;
    std::set<Counts> cls;
    for (std::size_t b = 0; b < m && closed; ++b) {
      if (!reach[a][b]) continue;
      if (!reach[b][a]) closed = false;
      cls.insert(states[b]);
    }
    if (closed) out.insert(cls);
  }
  return out;
}

/// Value of the single-valued total field at a total that is not a threshold:
/// shares of groups preferring A, minus the total.
inline Rational abstract_singleton(const PopulationProfile& profile, const Rational& x) {
  Rational v = -x;
  for (std::size_t p = 0; p < profile.size(); ++p) {
    const bool anti = profile.role(p) == Role::Anticoordinator;
    if (anti ? x < profile.tau(p) : x > profile.tau(p)) v += profile.rho(p);
  }
  return v;
}

}  // namespace popdyn::oracle
