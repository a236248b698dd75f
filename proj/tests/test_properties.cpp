// Randomised invariants over the shipped profiles and over generated ones.
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "popdyn/continuous.hpp"
#include "popdyn/discrete.hpp"
#include "popdyn/equilibria.hpp"
#include "popdyn/experiments.hpp"
#include "support/oracle.hpp"
#include "support/profiles.hpp"
#include "support/random_profile.hpp"

namespace popdyn {
namespace {

using testing::random_profile;

std::vector<PopulationProfile> shipped() {
  return {testing::three_group(), testing::six_group(), testing::seven_group(),
          testing::anti_single(), testing::coord_only(), testing::coord_pair()};
}

TEST(Property, TransitionsSumToOneExactly) {
  std::mt19937_64 rng(1);
  int checked = 0;
  for (const auto& profile : shipped()) {
    for (const auto tie : {TieRule::PreferA, TieRule::UniformRandom}) {
      const ChainKernel kernel(profile, base_size(profile) * 4, tie);
      for (int k = 0; k < 850; ++k, ++checked) {
        const auto s = kernel.random_state(rng);
        const auto dist = transition_distribution(kernel, s);
        Rational sum;
        for (const auto& t : dist.entries) {
          EXPECT_GT(t.probability.sign(), 0);
          std::int64_t moved = 0;
          for (std::size_t p = 0; p < s.counts.size(); ++p) moved += std::abs(t.target.counts[p] - s.counts[p]);
          EXPECT_LE(moved, 1);
          sum += t.probability;
        }
        ASSERT_EQ(sum, Rational(1));
      }
    }
  }
  EXPECT_GE(checked, 10'000);
}

TEST(Property, RealisedNoiseIsBounded) {
  std::mt19937_64 rng(2);
  for (const auto& profile : shipped()) {
    const double bound = noise_bound(profile);
    const ChainKernel kernel(profile, base_size(profile) * 3, TieRule::UniformRandom);
    for (int k = 0; k < 2000; ++k) {
      const auto s = kernel.random_state(rng);
      const auto drift = expected_drift(kernel, s);
      const auto next = step(kernel, s, rng);
      double sq = 0;
      for (std::size_t p = 0; p < s.counts.size(); ++p) {
        const double realised = static_cast<double>(next.counts[p] - s.counts[p]);
        sq += std::pow(realised - drift[p].to_double(), 2);
      }
      ASSERT_LE(std::sqrt(sq), bound);
    }
  }
}

TEST(Property, FlowStaysInStateSpace) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto profile = random_profile(rng);
    FlowOptions options;
    options.t_end = 30.0;
    for (const auto& x0 : halton_states(profile, 8, 1 + 8 * static_cast<std::size_t>(trial))) {
      const auto traj = flow(profile, x0, options);
      for (double t = 0; t <= traj.t_end; t += traj.t_end / 64) {
        const auto x = traj.state_at(t);
        for (std::size_t p = 0; p < x.size(); ++p) {
          ASSERT_GE(x[p], -options.eq_tol);
          ASSERT_LE(x[p], profile.rho(p).to_double() + options.eq_tol);
        }
      }
    }
  }
}

TEST(Property, EquilibriaInterleaveOnRandomProfiles) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto profile = random_profile(rng);
    const auto set = classify(enumerate_equilibria(profile));
    ASSERT_FALSE(set.all.empty());
    for (std::size_t k = 0; k < set.all.size(); ++k) {
      const bool stable = set.all[k].kind != EquilibriumKind::CoordinatorDriven;
      ASSERT_EQ(stable, k % 2 == 0) << to_json(profile).dump();
      if (k > 0) {
        ASSERT_LT(set.all[k - 1].abstract_value, set.all[k].abstract_value);
      }
    }
    ASSERT_EQ(set.all.size() % 2, 1u);
    ASSERT_EQ(set.stable_count(), set.separators().size() + 1);
  }
}

TEST(Property, NoEquilibriumIsMissed) {
  // Between grid points the singleton field can only change sign across a
  // listed rest point or a threshold.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto profile = random_profile(rng);
    const auto set = enumerate_equilibria(profile);
    std::vector<Rational> marks;
    for (const auto& e : set.all) marks.push_back(e.abstract_value);
    for (const auto& t : profile.tau_flat()) marks.push_back(t);
    const Rational step = profile.cumulative().min_threshold_gap() / Rational(8);
    Rational a(0);
    int prev = oracle::abstract_singleton(profile, a).sign();
    while (a < Rational(1)) {
      const Rational b = min(a + step, Rational(1));
      const int cur = oracle::abstract_singleton(profile, b).sign();
      if (cur != prev) {
        const bool explained =
            std::any_of(marks.begin(), marks.end(), [&](const Rational& m) { return a <= m && m <= b; });
        ASSERT_TRUE(explained) << "sign change in [" << a << ", " << b << "] " << to_json(profile).dump();
      }
      prev = cur;
      a = b;
    }
  }
}

TEST(Property, FlowConvergesToBasinOwner) {
  std::mt19937_64 rng(6);
  std::vector<PopulationProfile> profiles = shipped();
  for (int k = 0; k < 6; ++k) profiles.push_back(random_profile(rng));
  for (const auto& profile : profiles) {
    const auto set = classify(enumerate_equilibria(profile));
    const auto stable = set.ordered_q();
    for (const auto& x0 : halton_states(profile, 128)) {
      const double start = total(x0);
      const auto owner = std::find_if(stable.begin(), stable.end(), [&](const auto& e) { return e.basin->contains(start); });
      if (owner == stable.end()) continue;  // exactly on a separator
      const auto traj = flow(profile, x0);
      const auto want = owner->state_double();
      for (std::size_t p = 0; p < want.size(); ++p) {
        ASSERT_NEAR(traj.final_state[p], want[p], 1e-6) << owner->label() << " from total " << start;
      }
    }
  }
}

TEST(Property, PreferenceRulesAgreeAwayFromTies) {
  for (const auto& profile : shipped()) {
    const auto n = base_size(profile) * 2;
    for (std::size_t p = 0; p < profile.size(); ++p) {
      for (std::int64_t total = 0; total <= n; ++total) {
        const Rational x(total, n);
        for (const auto cur : {Strategy::A, Strategy::B}) {
          const Rational tie_point = cur == Strategy::A ? profile.tau(p) + Rational(1, n) : profile.tau(p);
          const auto a = preferred_strategy(profile, p, x, cur, n, TieRule::PreferA);
          const auto b = preferred_strategy(profile, p, x, cur, n, TieRule::PreferB);
          if (x != tie_point) {
            EXPECT_EQ(a, b);
          }
        }
        EXPECT_EQ(preferred_strategy(profile, p, x, Strategy::A, n, TieRule::SelfInclusivePreferA),
                  preferred_strategy(profile, p, x, Strategy::B, n, TieRule::SelfInclusivePreferA));
      }
    }
  }
}

TEST(Property, ValidSizesGiveWholeGroups) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto profile = random_profile(rng);
    for (const auto n : valid_sizes(profile, 200)) {
      for (const auto& r : profile.rho_flat()) {
        const auto members = r * Rational(n);
        EXPECT_TRUE(members.is_integer());
        EXPECT_GT(members.sign(), 0);
      }
    }
    EXPECT_EQ(profile.cumulative().min_threshold_gap().sign() > 0, profile.validation().coincident.empty());
  }
}

TEST(Property, ClosedClassesAreClosed) {
  for (const auto& profile : shipped()) {
    const auto n = base_size(profile);
    const ChainKernel kernel(profile, n);
    if (kernel.state_count() > 200'000) continue;
    for (const auto& cls : closed_classes(kernel)) {
      for (const auto& s : cls.states) {
        for (const auto& t : transition_distribution(kernel, s).entries) {
          ASSERT_TRUE(std::find(cls.states.begin(), cls.states.end(), t.target) != cls.states.end());
        }
      }
    }
  }
}

TEST(Property, SimulationIsReproducible) {
  const ChainKernel kernel(testing::seven_group(), 56);
  Engine init(9);
  const auto start = kernel.random_state(init);
  const auto a = simulate(kernel, start, 5000, 100, 42);
  const auto b = simulate(kernel, start, 5000, 100, 42);
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_EQ(a.min_total, b.min_total);
  EXPECT_EQ(a.max_total, b.max_total);
}

}  // namespace
}  // namespace popdyn
