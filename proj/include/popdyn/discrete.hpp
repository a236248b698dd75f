#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "json.hpp"

#include "popdyn/profile.hpp"
#include "popdyn/rational.hpp"
#include "popdyn/rng.hpp"

namespace popdyn {

/// A-player counts per subpopulation (flat indexing) for population size n.
struct DiscreteState {
  std::int64_t n = 0;
  std::vector<std::int64_t> counts;

  std::int64_t total() const;
  Rational total_x() const { return Rational(total(), n); }
  double total_double() const { return static_cast<double>(total()) / static_cast<double>(n); }

  friend bool operator==(const DiscreteState&, const DiscreteState&) = default;
};

std::ostream& operator<<(std::ostream& os, const DiscreteState& s);

struct Transition {
  DiscreteState target;
  Rational probability;
};

/// Outgoing moves of one state, self-loop last. Zero-probability moves are omitted.
struct TransitionDistribution {
  std::vector<Transition> entries;
};

/// The finite-N chain for one (profile, N, tie rule). Thresholds and
/// subpopulation sizes are cached as integers so the hot paths never touch
/// big rationals. Immutable and safe to share across threads.
class ChainKernel {
 public:
  /// Probability numerators over 2N, so coin flips at ties stay integral.
  struct Moves {
    std::int64_t up2 = 0;
    std::int64_t down2 = 0;
  };

  /// Throws InvalidSize unless n is a valid population size.
  ChainKernel(const PopulationProfile& profile, std::int64_t n, TieRule tie = TieRule::PreferA);

  const PopulationProfile& profile() const { return profile_; }
  std::int64_t n() const { return n_; }
  TieRule tie() const { return tie_; }
  std::size_t dim() const { return sizes_.size(); }
  /// N * rho_p, the number of agents in subpopulation p.
  std::int64_t size(std::size_t p) const { return sizes_[p]; }
  const std::vector<std::int64_t>& sizes() const { return sizes_; }

  bool contains(std::span<const std::int64_t> counts) const;
  /// Throws StateOutOfSpace when the state does not belong to this chain.
  void require_contains(const DiscreteState& state) const;

  Preference preference(std::size_t p, std::int64_t total, Strategy current) const;
  Moves moves(std::span<const std::int64_t> counts, std::size_t p, std::int64_t total) const;

  /// Product of (N rho_p + 1); saturates at INT64_MAX.
  std::int64_t state_count() const;

  /// One asynchronous update in place: activate a uniformly drawn agent and
  /// apply its preferred strategy. Returns the changed component, if any.
  std::optional<std::size_t> step(std::span<std::int64_t> counts, std::int64_t& total, Engine& rng) const;

  /// Uniformly random state (each count independently uniform on 0..N rho_p).
  DiscreteState random_state(Engine& rng) const;

 private:
  PopulationProfile profile_;
  std::int64_t n_;
  TieRule tie_;
  std::vector<std::int64_t> sizes_;
  std::vector<std::int64_t> offsets_;  // prefix sums of sizes_
  std::vector<Role> roles_;
  std::vector<std::int64_t> tau_num_;
  std::vector<std::int64_t> tau_den_;
};

TransitionDistribution transition_distribution(const ChainKernel& kernel, const DiscreteState& state);
TransitionDistribution transition_distribution(const PopulationProfile& profile, const DiscreteState& state,
                                               TieRule tie = TieRule::PreferA);

/// Single sampled transition; same law as transition_distribution.
DiscreteState step(const ChainKernel& kernel, const DiscreteState& state, Engine& rng);

struct TrajectoryStats {
  Rational min_total;
  Rational max_total;
  Rational amplitude;
  DiscreteState final_state;
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
};

/// Called with (step index, state) for every visited state, index 0 first.
using TrajectoryObserver = std::function<void(std::int64_t, const DiscreteState&)>;

/// Runs `steps` transitions from state0. min/max of the total are taken over
/// the states with index >= burn_in (index 0 is the initial state).
TrajectoryStats simulate(const ChainKernel& kernel, const DiscreteState& state0, std::int64_t steps,
                         std::int64_t burn_in, std::uint64_t seed, const TrajectoryObserver& observer = {});

/// N * E[X_{k+1} - X_k | X_k = state], exactly.
std::vector<Rational> expected_drift(const ChainKernel& kernel, const DiscreteState& state);

/// sqrt(sum (1 + rho_l)^2), the uniform bound on the martingale noise.
double noise_bound(const PopulationProfile& profile);

struct ClosedClass {
  std::vector<DiscreteState> states;  ///< ascending in mixed-radix order
  bool is_singleton = false;
  Rational abstract_lo;
  Rational abstract_hi;
  /// Invariant probability of each state (same order as `states`).
  std::vector<double> measure;
  /// Exact invariant measure, present for small classes.
  std::optional<std::vector<Rational>> exact_measure;
};

struct ClosedClassOptions {
  std::int64_t state_cap = 1'000'000;
  /// Largest class solved in exact rational arithmetic.
  std::size_t exact_limit = 64;
  /// Largest class solved by dense elimination; power iteration above.
  std::size_t dense_limit = 2000;
  double power_tol = 1e-12;
  std::int64_t power_max_iter = 1'000'000;
};

/// Closed communicating classes of the chain with their invariant measures.
/// Throws StateSpaceTooLarge when the state space exceeds the cap.
std::vector<ClosedClass> closed_classes(const ChainKernel& kernel, const ClosedClassOptions& options = {});

struct MeasureMass {
  double value = 0.0;
  std::optional<Rational> exact;
};

/// Invariant mass of the states satisfying `region`, one entry per class.
std::vector<MeasureMass> invariant_measure_mass(const std::vector<ClosedClass>& classes,
                                                const std::function<bool(const DiscreteState&)>& region);

nlohmann::json to_json(const std::vector<ClosedClass>& classes, bool decimal = false);
void write_trajectory_header(std::ostream& os, std::size_t dim);
void write_trajectory_row(std::ostream& os, std::int64_t step, const DiscreteState& state, bool decimal = false);

}  // namespace popdyn
