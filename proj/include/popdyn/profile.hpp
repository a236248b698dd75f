#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "popdyn/rational.hpp"

namespace popdyn {

enum class Role { Anticoordinator, Coordinator };
enum class Strategy { A, B };
/// Preferred strategy of an active agent. Coin only arises under
/// TieRule::UniformRandom at an exact tie.
enum class Preference { A, B, Coin };

/// How an agent resolves an exact tie between its (self-excluding) view of
/// the A-proportion and its threshold.
enum class TieRule {
  PreferA,               ///< default rule
  PreferB,
  UniformRandom,         ///< fair coin at a tie
  SelfInclusivePreferA,  ///< agents count themselves; ties go to A
};

std::string to_string(Role role);
std::string to_string(TieRule tie);
/// Accepts the CLI spellings prefer-a, prefer-b, uniform, self-inclusive.
TieRule parse_tie_rule(const std::string& text);

struct Subpopulation {
  Rational rho;  ///< population share
  Rational tau;  ///< threshold in (0,1)
};

/// Cumulative shares and padded threshold sequences, indexed as in the
/// canonical per-role labeling (1-based, anticoordinators by descending
/// threshold, coordinators by ascending threshold).
class CumulativeProfile {
 public:
  CumulativeProfile() = default;
  CumulativeProfile(const std::vector<Subpopulation>& anti, const std::vector<Subpopulation>& coord);

  int anti_count() const { return p_; }
  int coord_count() const { return q_; }

  /// Anticoordinator prefix sums for i in -1..p+1; index -1 gives 0 and index p+1 repeats index p.
  const Rational& anti_cum(int i) const;
  /// Coordinator prefix sums for j in -1..p'+1, same convention.
  const Rational& coord_cum(int j) const;
  /// Anticoordinator thresholds for i in 0..p+1 with sentinels 1 at i = 0 and 0 at i = p+1.
  const Rational& anti_threshold(int i) const;
  /// Coordinator thresholds for j in 0..p'+1 with sentinels 0 at j = 0 and 1 at j = p'+1.
  const Rational& coord_threshold(int j) const;
  bool anti_threshold_is_sentinel(int i) const { return i == 0 || i == p_ + 1; }
  bool coord_threshold_is_sentinel(int j) const { return j == 0 || j == q_ + 1; }

  /// Smallest pairwise distance between the p+p' thresholds; zero when two
  /// coincide and one when there is a single threshold.
  const Rational& min_threshold_gap() const { return min_gap_; }

 private:
  int p_ = 0;
  int q_ = 0;
  std::vector<Rational> anti_cum_;   // offset by one: anti_cum_[i+1]
  std::vector<Rational> coord_cum_;  // offset by one
  std::vector<Rational> anti_tau_;   // 0..p+1
  std::vector<Rational> coord_tau_;  // 0..p'+1
  Rational min_gap_{1};
};

/// Which degenerate situation a threshold coincidence produces.
enum class DegenerateCase {
  AnticoordinatorSum,    ///< a cumulative sum hits an anticoordinator threshold
  CoordinatorSum,        ///< a cumulative sum hits a coordinator threshold
  CoincidentThresholds,  ///< an anticoordinator and a coordinator share a threshold
};
std::string to_string(DegenerateCase c);
/// Roman-numeral label (i), (ii), (iii) used in reports.
std::string case_label(DegenerateCase c);

struct ThresholdCoincidence {
  int k = 0;             ///< anticoordinator prefix length, 0..p
  int l = 0;             ///< coordinator prefix length, 0..p'
  Rational sum;          ///< anticoordinator prefix plus coordinator prefix
  Role threshold_role = Role::Anticoordinator;
  int threshold_index = 0;  ///< 1-based within role
  DegenerateCase degenerate_case = DegenerateCase::AnticoordinatorSum;
  /// True when (k,l) is one of the two benchmark prefix pairs bracketing this
  /// threshold; only those change the equilibrium structure.
  bool benchmark = false;
};

struct CoincidentThreshold {
  int anti_index = 0;   ///< 1-based
  int coord_index = 0;  ///< 1-based
  Rational tau;
};

enum class ValidationStatus {
  Pass,    ///< no sum equals a threshold and all thresholds are distinct
  Benign,  ///< coincidences exist, but none at a benchmark pair
  Fail,    ///< a benchmark coincidence or a shared threshold
};
std::string to_string(ValidationStatus s);

struct ValidationReport {
  ValidationStatus status = ValidationStatus::Pass;
  std::vector<ThresholdCoincidence> violations;
  std::vector<CoincidentThreshold> coincident;

  /// The literal condition: no violations of any kind.
  bool holds() const { return violations.empty() && coincident.empty(); }
  bool usable() const { return status != ValidationStatus::Fail; }
};

/// Heterogeneous population of anticoordinating and coordinating
/// subpopulations. Immutable after construction.
///
/// Flat indexing (0-based) lists the p anticoordinators in descending
/// threshold order followed by the p' coordinators in *descending* threshold
/// order, so flat index p+k holds coordinator p'-k (1-based within role).
class PopulationProfile {
 public:
  /// Validates and sorts into canonical order. Throws popdyn::Error.
  static PopulationProfile make(std::vector<Subpopulation> anticoordinators,
                                std::vector<Subpopulation> coordinators);

  int anti_count() const { return static_cast<int>(anti_.size()); }
  int coord_count() const { return static_cast<int>(coord_.size()); }
  std::size_t size() const { return anti_.size() + coord_.size(); }

  /// Index k-1 holds anticoordinator k (descending thresholds).
  const std::vector<Subpopulation>& anticoordinators() const { return anti_; }
  /// Index j-1 holds coordinator j (ascending thresholds).
  const std::vector<Subpopulation>& coordinators() const { return coord_; }

  const Rational& rho(std::size_t flat) const;
  const Rational& tau(std::size_t flat) const;
  Role role(std::size_t flat) const;
  /// 1-based index within the role.
  int role_index(std::size_t flat) const;
  std::size_t flat_index(Role role, int role_index) const;

  const std::vector<Rational>& rho_flat() const { return rho_flat_; }
  const std::vector<Rational>& tau_flat() const { return tau_flat_; }

  const CumulativeProfile& cumulative() const { return cum_; }
  const ValidationReport& validation() const { return report_; }

  /// Throws AssumptionViolated unless the profile is usable or the caller
  /// explicitly overrides.
  void require_usable(bool allow_degenerate = false) const;

 private:
  PopulationProfile() = default;

  std::vector<Subpopulation> anti_;
  std::vector<Subpopulation> coord_;
  std::vector<Rational> rho_flat_;
  std::vector<Rational> tau_flat_;
  CumulativeProfile cum_;
  ValidationReport report_;
};

/// Reads {"anticoordinators": [{"rho": "...", "tau": "..."}], "coordinators": [...]}.
PopulationProfile parse_profile(const nlohmann::json& doc);
PopulationProfile load_profile(const std::filesystem::path& path);
nlohmann::json to_json(const PopulationProfile& profile);

ValidationReport validate_thresholds(const PopulationProfile& profile);
nlohmann::json to_json(const ValidationReport& report);

CumulativeProfile cumulative(const PopulationProfile& profile);

/// Preference of an agent of flat subpopulation `flat` currently playing
/// `current`, when the A-proportion (including the agent) is total_x and the
/// population has N agents. total_x must be a multiple of 1/N.
Preference preferred_strategy(const PopulationProfile& profile, std::size_t flat,
                              const Rational& total_x, Strategy current, std::int64_t n,
                              TieRule tie);

/// Integer core of preferred_strategy: threshold num/den, A-count `total`.
Preference preferred_strategy(Role role, std::int64_t tau_num, std::int64_t tau_den,
                              std::int64_t total, std::int64_t n, Strategy current,
                              TieRule tie);

/// All N <= n_max with N*rho integral for every subpopulation, ascending.
std::vector<std::int64_t> valid_sizes(const PopulationProfile& profile, std::int64_t n_max);
/// Smallest valid population size (lcm of the share denominators).
std::int64_t base_size(const PopulationProfile& profile);
bool is_valid_size(const PopulationProfile& profile, std::int64_t n);

}  // namespace popdyn
