#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "popdyn/continuous.hpp"
#include "popdyn/discrete.hpp"
#include "popdyn/profile.hpp"
#include "popdyn/rational.hpp"

namespace popdyn {

// ---------------------------------------------------------------------------
// Fluctuation sweep

struct SweepConfig {
  std::vector<std::int64_t> sizes;
  int replicates = 100;
  std::int64_t steps_per_agent = 30;
  double burn_in_fraction = 0.5;
  std::uint64_t master_seed = 0;
  TieRule tie = TieRule::PreferA;
};

struct SweepRow {
  std::int64_t n = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  Rational min_total;
  Rational max_total;
  Rational amplitude;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// One simulated replicate per (N, replicate) cell, started from a uniformly
/// random state; rows sorted by (N, replicate). Cells run in parallel.
std::vector<SweepRow> fluctuation_sweep(const PopulationProfile& profile, const SweepConfig& config);

/// Median amplitude for each population size, ascending in N.
std::vector<std::pair<std::int64_t, double>> median_amplitudes(const std::vector<SweepRow>& rows);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool decimal = false);

// ---------------------------------------------------------------------------
// Concentration of the invariant measures

struct ConcentrationRow {
  std::int64_t n = 0;
  std::size_t class_id = 0;
  Rational abs_lo;
  Rational abs_hi;
  /// Largest distance from a point of [abs_lo, abs_hi] to the nearest
  /// equilibrium value.
  double hausdorff = 0.0;
  /// Invariant mass of the class within eps (sup-norm) of some equilibrium state.
  double mass_within_eps = 0.0;
};

std::vector<ConcentrationRow> concentration_check(const PopulationProfile& profile,
                                                  const std::vector<std::int64_t>& sizes, double eps,
                                                  TieRule tie = TieRule::PreferA,
                                                  const ClosedClassOptions& options = {},
                                                  bool allow_degenerate = false);

/// Sup over x in [lo, hi] of the distance to the nearest of `values`.
double directed_hausdorff(double lo, double hi, std::vector<double> values);

void write_concentration_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows, bool decimal = false);

// ---------------------------------------------------------------------------
// Drift against the mean-dynamics field

struct DriftViolation {
  DiscreteState state;
  std::size_t component = 0;
  Rational drift;
  RationalInterval allowed;
  std::string reason;
};

struct DriftReport {
  std::int64_t n = 0;
  TieRule tie = TieRule::PreferA;
  std::int64_t states = 0;
  /// Component checks away from every band, matched exactly to the field.
  std::int64_t singleton_matched = 0;
  /// Component checks inside a band, matched to the interval hull.
  std::int64_t band_contained = 0;
  /// Component checks against the closed-form drift of the tie rule.
  std::int64_t formula_checked = 0;
  std::vector<DriftViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Exhaustive check of every state's drift. Runs over states in parallel.
DriftReport drift_consistency_check(const PopulationProfile& profile, std::int64_t n,
                                    TieRule tie = TieRule::PreferA, std::int64_t state_cap = 1'000'000);

nlohmann::json to_json(const DriftReport& report);

/// Single-threaded references used to validate the parallel kernels.
namespace serial {
std::vector<SweepRow> fluctuation_sweep(const PopulationProfile& profile, const SweepConfig& config);
DriftReport drift_consistency_check(const PopulationProfile& profile, std::int64_t n,
                                    TieRule tie = TieRule::PreferA, std::int64_t state_cap = 1'000'000);
}  // namespace serial

// ---------------------------------------------------------------------------
// Discrete against continuous

struct OverlayRow {
  double t = 0.0;
  double discrete_total = 0.0;
  double continuous_total = 0.0;
};

struct Overlay {
  std::vector<OverlayRow> rows;
  double sup_gap = 0.0;
  TrajectoryStats discrete;
  FlowTrajectory continuous;
};

/// Simulates `steps` transitions from `start` and the mean dynamics from
/// start/N, aligned on t = k/N.
Overlay compare_discrete_continuous(const PopulationProfile& profile, const DiscreteState& start,
                                    std::int64_t steps, std::uint64_t seed, TieRule tie = TieRule::PreferA,
                                    const FlowOptions& flow_options = {});

void write_overlay_csv(std::ostream& os, const Overlay& overlay);

}  // namespace popdyn
