#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "popdyn/profile.hpp"
#include "popdyn/rational.hpp"

namespace popdyn {

enum class EquilibriumKind { CleanCut, AnticoordinatorDriven, CoordinatorDriven };
enum class Stability { Unclassified, AsymptoticallyStable, Unstable };

std::string to_string(EquilibriumKind kind);
std::string to_string(Stability s);

/// Abstract-coordinate basin with explicit endpoint closedness.
struct Basin {
  Rational lo;
  Rational hi;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(const Rational& x) const;
  bool contains(double x) const;
  std::string str() const;
};

struct EquilibriumPoint {
  EquilibriumKind kind = EquilibriumKind::CleanCut;
  int i = 0;  ///< anticoordinator benchmark index
  int j = 0;  ///< coordinator benchmark index
  std::vector<Rational> state;  ///< flat indexing
  Rational abstract_value;
  Stability stability = Stability::Unclassified;
  std::optional<Basin> basin;
  bool globally_stable = false;
  /// Set only for points produced under the degenerate override.
  std::optional<DegenerateCase> degenerate;

  /// "c^{ij}", "a^{ij}" or "o^{ij}".
  std::string label() const;
  std::vector<double> state_double() const;
};

struct EquilibriumSet {
  /// Every equilibrium, ascending in abstract value.
  std::vector<EquilibriumPoint> all;
  /// True when the override mode met two roles sharing a threshold; the
  /// continuum of rest points there is not constructed.
  bool continuum_detected = false;
  bool degenerate = false;

  /// Clean-cut and anticoordinator-driven points, ascending.
  std::vector<EquilibriumPoint> ordered_q() const;
  /// Coordinator-driven points, ascending.
  std::vector<EquilibriumPoint> separators() const;
  std::size_t stable_count() const { return ordered_q().size(); }
};

struct EnumerateOptions {
  /// Run on profiles that fail the threshold-uniqueness check.
  bool allow_degenerate = false;
};

/// All rest points of the mean dynamics in exact arithmetic, unclassified.
EquilibriumSet enumerate_equilibria(const PopulationProfile& profile, const EnumerateOptions& options = {});

/// Fills stability and abstract basins. Throws MalformedSet when the points
/// do not alternate stable / unstable starting and ending stable.
EquilibriumSet classify(EquilibriumSet set);

/// {q_k, q_{k,k+1}, q_{k+1}} for 1 <= k <= Q-1.
std::vector<EquilibriumPoint> limit_set_at_separator(const EquilibriumSet& set, std::size_t k);

/// Classified rest points, which make up the Birkhoff center. For
/// anticoordinator-only profiles the unique point is checked against the
/// closed-form benchmark state.
std::vector<EquilibriumPoint> birkhoff_center(const PopulationProfile& profile, bool allow_degenerate = false);

nlohmann::json to_json(const EquilibriumSet& set, bool decimal = false);
void write_csv(std::ostream& os, const EquilibriumSet& set, bool decimal = false);

}  // namespace popdyn
