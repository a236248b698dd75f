#include "popdyn/profile.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "popdyn/error.hpp"

namespace popdyn {

using nlohmann::json;

std::string to_string(Role role) {
  return role == Role::Anticoordinator ? "anticoordinator" : "coordinator";
}

std::string to_string(TieRule tie) {
  switch (tie) {
    case TieRule::PreferA: return "prefer-a";
    case TieRule::PreferB: return "prefer-b";
    case TieRule::UniformRandom: return "uniform";
    case TieRule::SelfInclusivePreferA: return "self-inclusive";
  }
  return "prefer-a";
}

TieRule parse_tie_rule(const std::string& text) {
  if (text == "prefer-a") return TieRule::PreferA;
  if (text == "prefer-b") return TieRule::PreferB;
  if (text == "uniform") return TieRule::UniformRandom;
  if (text == "self-inclusive") return TieRule::SelfInclusivePreferA;
  throw Error(ErrorCode::InvalidArgument, "unknown tie rule '" + text + "'");
}

std::string to_string(DegenerateCase c) {
  switch (c) {
    case DegenerateCase::AnticoordinatorSum: return "anticoordinator-sum";
    case DegenerateCase::CoordinatorSum: return "coordinator-sum";
    case DegenerateCase::CoincidentThresholds: return "coincident-thresholds";
  }
  return "";
}

std::string case_label(DegenerateCase c) {
  switch (c) {
    case DegenerateCase::AnticoordinatorSum: return "(i)";
    case DegenerateCase::CoordinatorSum: return "(ii)";
    case DegenerateCase::CoincidentThresholds: return "(iii)";
  }
  return "";
}

std::string to_string(ValidationStatus s) {
  switch (s) {
    case ValidationStatus::Pass: return "PASS";
    case ValidationStatus::Benign: return "BENIGN";
    case ValidationStatus::Fail: return "FAIL";
  }
  return "";
}

// ---------------------------------------------------------------------------
// CumulativeProfile

CumulativeProfile::CumulativeProfile(const std::vector<Subpopulation>& anti,
                                     const std::vector<Subpopulation>& coord)
    : p_(static_cast<int>(anti.size())), q_(static_cast<int>(coord.size())) {
  anti_cum_.assign(static_cast<std::size_t>(p_) + 3, Rational{});
  for (int i = 1; i <= p_; ++i) anti_cum_[i + 1] = anti_cum_[i] + anti[i - 1].rho;
  anti_cum_[p_ + 2] = anti_cum_[p_ + 1];

  coord_cum_.assign(static_cast<std::size_t>(q_) + 3, Rational{});
  for (int j = 1; j <= q_; ++j) coord_cum_[j + 1] = coord_cum_[j] + coord[j - 1].rho;
  coord_cum_[q_ + 2] = coord_cum_[q_ + 1];

  anti_tau_.assign(static_cast<std::size_t>(p_) + 2, Rational{});
  anti_tau_[0] = Rational(1);
  for (int i = 1; i <= p_; ++i) anti_tau_[i] = anti[i - 1].tau;
  anti_tau_[p_ + 1] = Rational(0);

  coord_tau_.assign(static_cast<std::size_t>(q_) + 2, Rational{});
  coord_tau_[0] = Rational(0);
  for (int j = 1; j <= q_; ++j) coord_tau_[j] = coord[j - 1].tau;
  coord_tau_[q_ + 1] = Rational(1);

  std::vector<Rational> all;
  for (const auto& s : anti) all.push_back(s.tau);
  for (const auto& s : coord) all.push_back(s.tau);
  std::sort(all.begin(), all.end());
  for (std::size_t k = 1; k < all.size(); ++k) {
    const Rational gap = all[k] - all[k - 1];
    if (k == 1 || gap < min_gap_) min_gap_ = gap;
  }
}

const Rational& CumulativeProfile::anti_cum(int i) const {
  if (i < -1 || i > p_ + 1) throw Error(ErrorCode::IndexOutOfRange, "anticoordinator prefix index " + std::to_string(i));
  return anti_cum_[i + 1];
}

const Rational& CumulativeProfile::coord_cum(int j) const {
  if (j < -1 || j > q_ + 1) throw Error(ErrorCode::IndexOutOfRange, "coordinator prefix index " + std::to_string(j));
  return coord_cum_[j + 1];
}

const Rational& CumulativeProfile::anti_threshold(int i) const {
  if (i < 0 || i > p_ + 1) throw Error(ErrorCode::IndexOutOfRange, "tau index " + std::to_string(i));
  return anti_tau_[i];
}

const Rational& CumulativeProfile::coord_threshold(int j) const {
  if (j < 0 || j > q_ + 1) throw Error(ErrorCode::IndexOutOfRange, "tau' index " + std::to_string(j));
  return coord_tau_[j];
}

CumulativeProfile cumulative(const PopulationProfile& profile) { return profile.cumulative(); }

// ---------------------------------------------------------------------------
// Threshold uniqueness

namespace {

// the largest coordinator index k (or 0) whose threshold lies strictly below tau.
// Largest coordinator index k (or 0) whose threshold lies strictly below tau.
int coord_prefix_below(const CumulativeProfile& cum, const Rational& tau) {
  int j = 0;
  for (int k = 1; k <= cum.coord_count(); ++k) {
    if (cum.coord_threshold(k) < tau) j = k;
  }
  return j;
}

// Benchmark anticoordinator prefix for a coordinator threshold:
// max{k in [p] u {0} | tau' < tau_k}.
int anti_prefix_above(const CumulativeProfile& cum, const Rational& tau) {
  int i = 0;
  for (int k = 1; k <= cum.anti_count(); ++k) {
    if (tau < cum.anti_threshold(k)) i = k;
  }
  return i;
}

ValidationReport build_report(const std::vector<Subpopulation>& anti,
                              const std::vector<Subpopulation>& coord,
                              const CumulativeProfile& cum) {
  ValidationReport report;
  const int p = static_cast<int>(anti.size());
  const int q = static_cast<int>(coord.size());

  for (int i = 1; i <= p; ++i) {
    for (int j = 1; j <= q; ++j) {
      if (anti[i - 1].tau == coord[j - 1].tau) {
        report.coincident.push_back({i, j, anti[i - 1].tau});
      }
    }
  }

  for (int k = 0; k <= p; ++k) {
    for (int l = 0; l <= q; ++l) {
      const Rational sum = cum.anti_cum(k) + cum.coord_cum(l);
      for (int i = 1; i <= p; ++i) {
        if (sum != anti[i - 1].tau) continue;
        ThresholdCoincidence v;
        v.k = k;
        v.l = l;
        v.sum = sum;
        v.threshold_role = Role::Anticoordinator;
        v.threshold_index = i;
        v.degenerate_case = DegenerateCase::AnticoordinatorSum;
        const int jb = coord_prefix_below(cum, anti[i - 1].tau);
        v.benchmark = l == jb && (k == i - 1 || k == i);
        report.violations.push_back(v);
      }
      for (int j = 1; j <= q; ++j) {
        if (sum != coord[j - 1].tau) continue;
        ThresholdCoincidence v;
        v.k = k;
        v.l = l;
        v.sum = sum;
        v.threshold_role = Role::Coordinator;
        v.threshold_index = j;
        v.degenerate_case = DegenerateCase::CoordinatorSum;
        const int ib = anti_prefix_above(cum, coord[j - 1].tau);
        v.benchmark = k == ib && (l == j - 1 || l == j);
        report.violations.push_back(v);
      }
    }
  }

  const bool benchmark_hit = std::any_of(report.violations.begin(), report.violations.end(),
                                         [](const auto& v) { return v.benchmark; });
  if (!report.coincident.empty() || benchmark_hit) {
    report.status = ValidationStatus::Fail;
  } else if (!report.violations.empty()) {
    report.status = ValidationStatus::Benign;
  }
  return report;
}

}  // namespace

ValidationReport validate_thresholds(const PopulationProfile& profile) { return profile.validation(); }

json to_json(const ValidationReport& report) {
  json out;
  out["status"] = to_string(report.status);
  out["no_coincidences"] = report.holds();
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"k", v.k},
                          {"l", v.l},
                          {"sum", v.sum.str()},
                          {"threshold_role", to_string(v.threshold_role)},
                          {"threshold_index", v.threshold_index},
                          {"case", case_label(v.degenerate_case)},
                          {"benchmark", v.benchmark}});
  }
  out["violations"] = violations;
  json coincident = json::array();
  for (const auto& c : report.coincident) {
    coincident.push_back({{"anti_index", c.anti_index},
                          {"coord_index", c.coord_index},
                          {"tau", c.tau.str()},
                          {"case", case_label(DegenerateCase::CoincidentThresholds)}});
  }
  out["coincident_thresholds"] = coincident;
  return out;
}

// ---------------------------------------------------------------------------
// PopulationProfile

PopulationProfile PopulationProfile::make(std::vector<Subpopulation> anticoordinators,
                                          std::vector<Subpopulation> coordinators) {
  if (anticoordinators.empty() && coordinators.empty()) {
    throw Error(ErrorCode::MalformedConfig, "profile has no subpopulations");
  }
  Rational total;
  auto check = [&](const Subpopulation& s, const char* what) {
    if (s.rho.sign() <= 0) {
      throw Error(ErrorCode::MalformedConfig, std::string(what) + " share " + s.rho.str() + " is not positive");
    }
    if (s.tau <= Rational(0) || s.tau >= Rational(1)) {
      throw Error(ErrorCode::ThresholdOutOfRange, std::string(what) + " threshold " + s.tau.str() + " not in (0,1)");
    }
    total += s.rho;
  };
  for (const auto& s : anticoordinators) check(s, "anticoordinator");
  for (const auto& s : coordinators) check(s, "coordinator");
  if (total != Rational(1)) {
    throw Error(ErrorCode::ProportionsDoNotSumToOne, "shares sum to " + total.str());
  }

  std::sort(anticoordinators.begin(), anticoordinators.end(),
            [](const auto& a, const auto& b) { return a.tau > b.tau; });
  std::sort(coordinators.begin(), coordinators.end(),
            [](const auto& a, const auto& b) { return a.tau < b.tau; });
  auto no_repeats = [](const std::vector<Subpopulation>& v, const char* what) {
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k].tau == v[k - 1].tau) {
        throw Error(ErrorCode::DuplicateThreshold, std::string(what) + " threshold " + v[k].tau.str() + " repeated");
      }
    }
  };
  no_repeats(anticoordinators, "anticoordinator");
  no_repeats(coordinators, "coordinator");

  PopulationProfile profile;
  profile.anti_ = std::move(anticoordinators);
  profile.coord_ = std::move(coordinators);
  for (const auto& s : profile.anti_) {
    profile.rho_flat_.push_back(s.rho);
    profile.tau_flat_.push_back(s.tau);
  }
  for (auto it = profile.coord_.rbegin(); it != profile.coord_.rend(); ++it) {
    profile.rho_flat_.push_back(it->rho);
    profile.tau_flat_.push_back(it->tau);
  }
  profile.cum_ = CumulativeProfile(profile.anti_, profile.coord_);
  profile.report_ = build_report(profile.anti_, profile.coord_, profile.cum_);
  return profile;
}

const Rational& PopulationProfile::rho(std::size_t flat) const {
  if (flat >= size()) throw Error(ErrorCode::IndexOutOfRange, "subpopulation " + std::to_string(flat));
  return rho_flat_[flat];
}

const Rational& PopulationProfile::tau(std::size_t flat) const {
  if (flat >= size()) throw Error(ErrorCode::IndexOutOfRange, "subpopulation " + std::to_string(flat));
  return tau_flat_[flat];
}

Role PopulationProfile::role(std::size_t flat) const {
  if (flat >= size()) throw Error(ErrorCode::IndexOutOfRange, "subpopulation " + std::to_string(flat));
  return flat < anti_.size() ? Role::Anticoordinator : Role::Coordinator;
}

int PopulationProfile::role_index(std::size_t flat) const {
  if (role(flat) == Role::Anticoordinator) return static_cast<int>(flat) + 1;
  return static_cast<int>(size() - flat);
}

std::size_t PopulationProfile::flat_index(Role r, int k) const {
  const int count = r == Role::Anticoordinator ? anti_count() : coord_count();
  if (k < 1 || k > count) throw Error(ErrorCode::IndexOutOfRange, to_string(r) + " " + std::to_string(k));
  if (r == Role::Anticoordinator) return static_cast<std::size_t>(k - 1);
  return size() - static_cast<std::size_t>(k);
}

void PopulationProfile::require_usable(bool allow_degenerate) const {
  if (report_.usable() || allow_degenerate) return;
  throw Error(ErrorCode::AssumptionViolated,
              "thresholds coincide with a benchmark sum or with each other (run `validate` for details)");
}

// ---------------------------------------------------------------------------
// Config documents

namespace {

Rational number_field(const json& entry, const char* key) {
  if (!entry.is_object() || !entry.contains(key)) {
    throw Error(ErrorCode::MalformedConfig, std::string("entry lacks \"") + key + "\"");
  }
  const json& v = entry.at(key);
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  // Floating JSON numbers are read through their shortest round-trip text.
  if (v.is_number_float()) return Rational::parse(v.dump());
  throw Error(ErrorCode::MalformedNumber, std::string("\"") + key + "\" is not a number or string");
}

std::vector<Subpopulation> entries(const json& doc, const char* key) {
  std::vector<Subpopulation> out;
  if (!doc.contains(key)) return out;
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw Error(ErrorCode::MalformedConfig, std::string("\"") + key + "\" must be an array");
  for (const auto& e : arr) out.push_back({number_field(e, "rho"), number_field(e, "tau")});
  return out;
}

}  // namespace

PopulationProfile parse_profile(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::MalformedConfig, "config must be a JSON object");
  return PopulationProfile::make(entries(doc, "anticoordinators"), entries(doc, "coordinators"));
}

PopulationProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedConfig, path.string() + ": " + e.what());
  }
  return parse_profile(doc);
}

json to_json(const PopulationProfile& profile) {
  json out;
  out["anticoordinators"] = json::array();
  for (const auto& s : profile.anticoordinators()) {
    out["anticoordinators"].push_back({{"rho", s.rho.str()}, {"tau", s.tau.str()}});
  }
  out["coordinators"] = json::array();
  for (const auto& s : profile.coordinators()) {
    out["coordinators"].push_back({{"rho", s.rho.str()}, {"tau", s.tau.str()}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Preferences

Preference preferred_strategy(Role role, std::int64_t tau_num, std::int64_t tau_den,
                              std::int64_t total, std::int64_t n, Strategy current, TieRule tie) {
  // Compare total/N against tau (+1/N for an A-player judging the others).
  const bool shifted = current == Strategy::A && tie != TieRule::SelfInclusivePreferA;
  __extension__ using Wide = __int128;
  const Wide lhs = static_cast<Wide>(total) * tau_den;
  const Wide rhs = static_cast<Wide>(tau_num) * n + (shifted ? tau_den : 0);
  if (lhs == rhs) {
    switch (tie) {
      case TieRule::PreferA:
      case TieRule::SelfInclusivePreferA: return Preference::A;
      case TieRule::PreferB: return Preference::B;
      case TieRule::UniformRandom: return Preference::Coin;
    }
  }
  const bool below = lhs < rhs;
  if (role == Role::Anticoordinator) return below ? Preference::A : Preference::B;
  return below ? Preference::B : Preference::A;
}

Preference preferred_strategy(const PopulationProfile& profile, std::size_t flat,
                              const Rational& total_x, Strategy current, std::int64_t n, TieRule tie) {
  if (flat >= profile.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "subpopulation " + std::to_string(flat));
  }
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "population size must be positive");
  const Rational scaled = total_x * Rational(n);
  if (!scaled.is_integer() || total_x < Rational(0) || total_x > Rational(1)) {
    throw Error(ErrorCode::InvalidArgument, "total " + total_x.str() + " is not a multiple of 1/" + std::to_string(n) + " in [0,1]");
  }
  const auto [num, den] = profile.tau(flat).as_i64();
  return preferred_strategy(profile.role(flat), num, den, scaled.numerator_i64(), n, current, tie);
}

// ---------------------------------------------------------------------------
// Population sizes

std::int64_t base_size(const PopulationProfile& profile) {
  std::int64_t l = 1;
  for (const auto& r : profile.rho_flat()) {
    const std::int64_t d = r.denominator_i64();
    l = std::lcm(l, d);
  }
  return l;
}

bool is_valid_size(const PopulationProfile& profile, std::int64_t n) {
  return n >= 1 && n % base_size(profile) == 0;
}

std::vector<std::int64_t> valid_sizes(const PopulationProfile& profile, std::int64_t n_max) {
  std::vector<std::int64_t> out;
  const std::int64_t base = base_size(profile);
  for (std::int64_t n = base; n <= n_max; n += base) out.push_back(n);
  return out;
}

}  // namespace popdyn
