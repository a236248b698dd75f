#include "popdyn/equilibria.hpp"

#include <algorithm>

#include "popdyn/continuous.hpp"
#include "popdyn/error.hpp"

namespace popdyn {

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::CleanCut: return "clean-cut";
    case EquilibriumKind::AnticoordinatorDriven: return "anticoordinator-driven";
    case EquilibriumKind::CoordinatorDriven: return "coordinator-driven";
  }
  return "";
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Unclassified: return "unclassified";
    case Stability::AsymptoticallyStable: return "asymptotically-stable";
    case Stability::Unstable: return "unstable";
  }
  return "";
}

bool Basin::contains(const Rational& x) const {
  const bool above = lo_closed ? lo <= x : lo < x;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

bool Basin::contains(double x) const {
  const double l = lo.to_double();
  const double h = hi.to_double();
  const bool above = lo_closed ? l <= x : l < x;
  const bool below = hi_closed ? x <= h : x < h;
  return above && below;
}

std::string Basin::str() const {
  return std::string(lo_closed ? "[" : "(") + lo.str() + ", " + hi.str() + (hi_closed ? "]" : ")");
}

std::string EquilibriumPoint::label() const {
  const char* prefix = kind == EquilibriumKind::CleanCut ? "c" : kind == EquilibriumKind::AnticoordinatorDriven ? "a" : "o";
  return std::string(prefix) + "^{" + std::to_string(i) + std::to_string(j) + "}";
}

std::vector<double> EquilibriumPoint::state_double() const {
  std::vector<double> out;
  out.reserve(state.size());
  for (const auto& r : state) out.push_back(r.to_double());
  return out;
}

std::vector<EquilibriumPoint> EquilibriumSet::ordered_q() const {
  std::vector<EquilibriumPoint> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [](const auto& e) { return e.kind != EquilibriumKind::CoordinatorDriven; });
  return out;
}

std::vector<EquilibriumPoint> EquilibriumSet::separators() const {
  std::vector<EquilibriumPoint> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out),
               [](const auto& e) { return e.kind == EquilibriumKind::CoordinatorDriven; });
  return out;
}

namespace {

// Benchmark state with anticoordinators 1..full_anti and coordinators
// 1..full_coord playing A; the remaining entries are zero.
std::vector<Rational> benchmark_state(const PopulationProfile& profile, int full_anti, int full_coord) {
  std::vector<Rational> x(profile.size());
  for (int k = 1; k <= full_anti; ++k) {
    const auto f = profile.flat_index(Role::Anticoordinator, k);
    x[f] = profile.rho(f);
  }
  for (int k = 1; k <= full_coord; ++k) {
    const auto f = profile.flat_index(Role::Coordinator, k);
    x[f] = profile.rho(f);
  }
  return x;
}

int coord_prefix_below(const CumulativeProfile& cum, const Rational& tau) {
  int j = 0;
  for (int k = 1; k <= cum.coord_count(); ++k) {
    if (cum.coord_threshold(k) < tau) j = k;
  }
  return j;
}

int anti_prefix_above(const CumulativeProfile& cum, const Rational& tau) {
  int i = 0;
  for (int k = 1; k <= cum.anti_count(); ++k) {
    if (tau < cum.anti_threshold(k)) i = k;
  }
  return i;
}

int kind_rank(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::CleanCut: return 0;
    case EquilibriumKind::AnticoordinatorDriven: return 1;
    case EquilibriumKind::CoordinatorDriven: return 2;
  }
  return 3;
}

bool has_zero_selection(const PopulationProfile& profile, const EquilibriumPoint& e) {
  const auto field = vector_field(profile, e.state);
  return std::all_of(field.begin(), field.end(), [](const auto& iv) { return iv.contains(Rational(0)); });
}

}  // namespace

// Whether the total field at a shared threshold contains zero, which makes
// every state with that total a rest point.
bool shared_threshold_rests(const PopulationProfile& profile, const Rational& tau) {
  Rational lo = -tau;
  Rational width;
  for (std::size_t f = 0; f < profile.size(); ++f) {
    const auto& t = profile.tau(f);
    if (t == tau) {
      width += profile.rho(f);
    } else if (profile.role(f) == Role::Anticoordinator ? tau < t : t < tau) {
      lo += profile.rho(f);
    }
  }
  return lo.sign() <= 0 && (lo + width).sign() >= 0;
}

EquilibriumSet enumerate_equilibria(const PopulationProfile& profile, const EnumerateOptions& options) {
  profile.require_usable(options.allow_degenerate);
  const auto& cum = profile.cumulative();
  const int p = cum.anti_count();
  const int q = cum.coord_count();
  const bool relaxed = !profile.validation().usable();

  // a < b, or a <= b when the bound is a sentinel or in override mode.
  auto less = [relaxed](const Rational& a, const Rational& b, bool sentinel) {
    return (sentinel || relaxed) ? a <= b : a < b;
  };

  EquilibriumSet set;
  set.degenerate = relaxed;

  for (int i = 0; i <= p; ++i) {
    for (int j = 0; j <= q; ++j) {
      const Rational v = cum.anti_cum(i) + cum.coord_cum(j);
      const bool ok = less(cum.anti_threshold(i + 1), v, cum.anti_threshold_is_sentinel(i + 1)) &&
                      less(cum.coord_threshold(j), v, cum.coord_threshold_is_sentinel(j)) &&
                      less(v, cum.anti_threshold(i), cum.anti_threshold_is_sentinel(i)) &&
                      less(v, cum.coord_threshold(j + 1), cum.coord_threshold_is_sentinel(j + 1));
      if (!ok) continue;
      EquilibriumPoint e;
      e.kind = EquilibriumKind::CleanCut;
      e.i = i;
      e.j = j;
      e.state = benchmark_state(profile, i, j);
      e.abstract_value = v;
      set.all.push_back(std::move(e));
    }
  }

  for (int i = 1; i <= p; ++i) {
    const Rational& tau = cum.anti_threshold(i);
    const int j = coord_prefix_below(cum, tau);
    const Rational entry = tau - (cum.coord_cum(j) + cum.anti_cum(i - 1));
    const Rational& rho = profile.anticoordinators()[i - 1].rho;
    if (!(less(Rational(0), entry, false) && less(entry, rho, false))) continue;
    EquilibriumPoint e;
    e.kind = EquilibriumKind::AnticoordinatorDriven;
    e.i = i;
    e.j = j;
    e.state = benchmark_state(profile, i - 1, j);
    e.state[profile.flat_index(Role::Anticoordinator, i)] = entry;
    e.abstract_value = tau;
    set.all.push_back(std::move(e));
  }

  for (int j = 1; j <= q; ++j) {
    const Rational& tau = cum.coord_threshold(j);
    const int i = anti_prefix_above(cum, tau);
    if (!(less(cum.anti_cum(i) + cum.coord_cum(j - 1), tau, false) &&
          less(tau, cum.anti_cum(i) + cum.coord_cum(j), false))) {
      continue;
    }
    EquilibriumPoint e;
    e.kind = EquilibriumKind::CoordinatorDriven;
    e.i = i;
    e.j = j;
    e.state = benchmark_state(profile, i, j - 1);
    e.state[profile.flat_index(Role::Coordinator, j)] = tau - (cum.coord_cum(j - 1) + cum.anti_cum(i));
    e.abstract_value = tau;
    set.all.push_back(std::move(e));
  }

  std::stable_sort(set.all.begin(), set.all.end(), [](const auto& a, const auto& b) {
    if (a.abstract_value != b.abstract_value) return a.abstract_value < b.abstract_value;
    return kind_rank(a.kind) < kind_rank(b.kind);
  });

  if (relaxed) {
    std::erase_if(set.all, [&](const auto& e) { return !has_zero_selection(profile, e); });
  }
  for (const auto& e : set.all) {
    if (!has_zero_selection(profile, e)) {
      throw Error(ErrorCode::MalformedSet, e.label() + " is not a rest point of the field");
    }
  }

  if (relaxed) {
    // Merge points sharing an abstract value and tag what caused the coincidence.
    std::vector<EquilibriumPoint> merged;
    for (auto& e : set.all) {
      if (!merged.empty() && merged.back().abstract_value == e.abstract_value) continue;
      merged.push_back(std::move(e));
    }
    for (auto& e : merged) {
      bool anti_hit = false;
      bool coord_hit = false;
      for (int k = 1; k <= p; ++k) anti_hit = anti_hit || cum.anti_threshold(k) == e.abstract_value;
      for (int k = 1; k <= q; ++k) coord_hit = coord_hit || cum.coord_threshold(k) == e.abstract_value;
      if (anti_hit && coord_hit) {
        e.degenerate = DegenerateCase::CoincidentThresholds;
        set.continuum_detected = true;
      } else if (anti_hit && e.kind != EquilibriumKind::AnticoordinatorDriven) {
        e.degenerate = DegenerateCase::AnticoordinatorSum;
      } else if (coord_hit && e.kind != EquilibriumKind::CoordinatorDriven) {
        e.degenerate = DegenerateCase::CoordinatorSum;
      }
    }
    set.all = std::move(merged);
    for (const auto& c : profile.validation().coincident) {
      if (shared_threshold_rests(profile, c.tau)) set.continuum_detected = true;
    }
  }
  return set;
}

EquilibriumSet classify(EquilibriumSet set) {
  if (set.all.empty()) throw Error(ErrorCode::MalformedSet, "no equilibria");
  if (set.degenerate) {
    // Coincidences at anticoordinator thresholds stay stable; those at
    // coordinator thresholds become unstable. No basins are claimed.
    for (auto& e : set.all) {
      if (e.degenerate == DegenerateCase::CoincidentThresholds) {
        e.stability = Stability::Unclassified;
      } else if (e.degenerate == DegenerateCase::CoordinatorSum || e.kind == EquilibriumKind::CoordinatorDriven) {
        e.stability = Stability::Unstable;
      } else {
        e.stability = Stability::AsymptoticallyStable;
      }
    }
    return set;
  }

  for (std::size_t k = 0; k < set.all.size(); ++k) {
    const bool want_stable = k % 2 == 0;
    const bool is_stable = set.all[k].kind != EquilibriumKind::CoordinatorDriven;
    if (want_stable != is_stable || (k > 0 && !(set.all[k - 1].abstract_value < set.all[k].abstract_value))) {
      throw Error(ErrorCode::MalformedSet, "equilibria do not interleave at " + set.all[k].label());
    }
  }
  if (set.all.size() % 2 == 0) throw Error(ErrorCode::MalformedSet, "rightmost equilibrium is unstable");

  const std::size_t count = set.all.size();
  for (std::size_t k = 0; k < count; ++k) {
    auto& e = set.all[k];
    if (e.kind == EquilibriumKind::CoordinatorDriven) {
      e.stability = Stability::Unstable;
      continue;
    }
    e.stability = Stability::AsymptoticallyStable;
    Basin b;
    b.lo = k == 0 ? Rational(0) : set.all[k - 1].abstract_value;
    b.hi = k + 1 == count ? Rational(1) : set.all[k + 1].abstract_value;
    b.lo_closed = k == 0;
    b.hi_closed = k + 1 == count;
    e.basin = b;
    e.globally_stable = count == 1;
  }
  return set;
}

std::vector<EquilibriumPoint> limit_set_at_separator(const EquilibriumSet& set, std::size_t k) {
  const auto q = set.ordered_q();
  const auto sep = set.separators();
  if (k < 1 || k >= q.size() || k > sep.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "separator " + std::to_string(k) + " of " +
                                                std::to_string(q.empty() ? 0 : q.size() - 1));
  }
  return {q[k - 1], sep[k - 1], q[k]};
}

std::vector<EquilibriumPoint> birkhoff_center(const PopulationProfile& profile, bool allow_degenerate) {
  EnumerateOptions options;
  options.allow_degenerate = allow_degenerate;
  auto set = classify(enumerate_equilibria(profile, options));
  const auto& cum = profile.cumulative();

  if (profile.coord_count() == 0 && !set.degenerate) {
    if (set.all.size() != 1) {
      throw Error(ErrorCode::MalformedSet, "anticoordinator-only profile with " + std::to_string(set.all.size()) +
                                               " equilibria");
    }
    // Closed form: full prefix of the groups above, then the smaller of the
    // threshold's gap over the previous prefix and the group's share.
    const auto& e = set.all.front();
    const int b = e.i;
    if (b < 1) throw Error(ErrorCode::MalformedSet, "anticoordinator-only equilibrium without benchmark");
    const Rational& rho_b = profile.anticoordinators()[b - 1].rho;
    std::vector<Rational> expect = benchmark_state(profile, b - 1, 0);
    expect[profile.flat_index(Role::Anticoordinator, b)] = min(cum.anti_threshold(b) - cum.anti_cum(b - 1), rho_b);
    if (expect != e.state) throw Error(ErrorCode::MalformedSet, e.label() + " differs from the closed-form state");
  }
  if (profile.anti_count() == 0) {
    for (const auto& e : set.all) {
      if (e.kind == EquilibriumKind::AnticoordinatorDriven) {
        throw Error(ErrorCode::MalformedSet, "coordinator-only profile produced " + e.label());
      }
    }
  }
  return set.all;
}

nlohmann::json to_json(const EquilibriumSet& set, bool decimal) {
  auto num = [decimal](const Rational& r) { return decimal ? r.decimal() : r.str(); };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : set.all) {
    nlohmann::json row;
    row["kind"] = to_string(e.kind);
    row["label"] = e.label();
    row["i"] = e.i;
    row["j"] = e.j;
    row["abstract_value"] = num(e.abstract_value);
    nlohmann::json state = nlohmann::json::array();
    for (const auto& r : e.state) state.push_back(num(r));
    row["state"] = std::move(state);
    row["stability"] = to_string(e.stability);
    if (e.basin) {
      row["basin"] = {{"lo", num(e.basin->lo)},
                      {"hi", num(e.basin->hi)},
                      {"lo_closed", e.basin->lo_closed},
                      {"hi_closed", e.basin->hi_closed}};
    } else {
      row["basin"] = nullptr;
    }
    row["globally_stable"] = e.globally_stable;
    if (e.degenerate) row["degenerate_case"] = case_label(*e.degenerate);
    rows.push_back(std::move(row));
  }
  return {{"equilibria", std::move(rows)}, {"continuum_detected", set.continuum_detected}};
}

void write_csv(std::ostream& os, const EquilibriumSet& set, bool decimal) {
  auto num = [decimal](const Rational& r) { return decimal ? r.decimal() : r.str(); };
  os << "kind,i,j,abstract_value,state,stability,basin_lo,basin_hi\n";
  for (const auto& e : set.all) {
    os << to_string(e.kind) << ',' << e.i << ',' << e.j << ',' << num(e.abstract_value) << ',';
    for (std::size_t k = 0; k < e.state.size(); ++k) os << (k ? ";" : "") << num(e.state[k]);
    os << ',' << to_string(e.stability) << ',';
    if (e.basin) {
      os << num(e.basin->lo) << ',' << num(e.basin->hi);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

}  // namespace popdyn
