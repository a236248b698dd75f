#include "popdyn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "experiments_detail.hpp"
#include "popdyn/equilibria.hpp"
#include "popdyn/error.hpp"
#include "popdyn/rng.hpp"

namespace popdyn {

namespace detail {

std::vector<SweepCell> sweep_cells(const PopulationProfile& profile, const SweepConfig& config) {
  if (config.replicates < 1) throw Error(ErrorCode::InvalidArgument, "replicates must be at least 1");
  if (config.steps_per_agent < 1) throw Error(ErrorCode::InvalidArgument, "steps per agent must be at least 1");
  if (!(config.burn_in_fraction >= 0.0 && config.burn_in_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "burn-in fraction must lie in [0,1]");
  }
  std::vector<SweepCell> cells;
  for (const auto n : config.sizes) {
    if (!is_valid_size(profile, n)) {
      throw Error(ErrorCode::InvalidSize, "N=" + std::to_string(n) + " is not a multiple of " +
                                              std::to_string(base_size(profile)));
    }
    for (int r = 0; r < config.replicates; ++r) cells.push_back({n, r});
  }
  return cells;
}

SweepRow run_sweep_cell(const ChainKernel& kernel, const SweepConfig& config, int replicate) {
  const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(kernel.n()),
                                         static_cast<std::uint64_t>(replicate));
  // The initial state uses its own stream so that it does not share draws
  // with the activation sequence.
  Engine init(splitmix64(seed ^ 0x5bd1e995ULL));
  const DiscreteState start = kernel.random_state(init);
  const std::int64_t steps = config.steps_per_agent * kernel.n();
  const auto burn_in = static_cast<std::int64_t>(std::floor(config.burn_in_fraction * static_cast<double>(steps)));
  const auto stats = simulate(kernel, start, steps, burn_in, seed);
  return {kernel.n(), replicate, seed, stats.min_total, stats.max_total, stats.amplitude};
}

DiscreteState decode_state(const ChainKernel& kernel, std::int64_t index) {
  DiscreteState s{kernel.n(), std::vector<std::int64_t>(kernel.dim())};
  for (std::size_t p = 0; p < kernel.dim(); ++p) {
    const std::int64_t radix = kernel.size(p) + 1;
    s.counts[p] = index % radix;
    index /= radix;
  }
  return s;
}

void require_state_cap(const ChainKernel& kernel, std::int64_t cap) {
  const std::int64_t states = kernel.state_count();
  if (states > cap) {
    throw Error(ErrorCode::StateSpaceTooLarge, std::to_string(states) + " states exceed the cap of " +
                                                   std::to_string(cap));
  }
}

void check_drift_state(const ChainKernel& kernel, const DiscreteState& state, DriftTally& tally,
                       std::vector<DriftViolation>& violations) {
  const auto& profile = kernel.profile();
  const Rational inv_n(1, kernel.n());
  const Rational total = state.total_x();
  std::vector<Rational> x;
  x.reserve(state.counts.size());
  for (const auto c : state.counts) x.emplace_back(c, kernel.n());
  const auto field = vector_field(profile, x);
  const auto drift = expected_drift(kernel, state);

  for (std::size_t p = 0; p < drift.size(); ++p) {
    const Rational& tau = profile.tau(p);
    const Rational& rho = profile.rho(p);
    const bool in_band = tau <= total && total <= tau + inv_n;
    if (!in_band) {
      if (!field[p].is_singleton() || drift[p] != field[p].lo) {
        violations.push_back({state, p, drift[p], field[p], "drift differs from the single-valued field"});
      } else {
        ++tally.singleton_matched;
      }
    } else {
      // Hull of the field over totals in [x - 1/N, x], which straddles tau.
      const RationalInterval hull{-x[p], rho - x[p]};
      if (!hull.contains(drift[p])) {
        violations.push_back({state, p, drift[p], hull, "drift outside the field hull near the threshold"});
      } else {
        ++tally.band_contained;
      }
    }

    // Closed-form drift of the deterministic tie rules, written out from the
    // preference definition rather than through the kernel.
    const bool anti = profile.role(p) == Role::Anticoordinator;
    auto wants_a = [&](const Rational& bound) { return anti ? total <= bound : total >= bound; };
    std::optional<Rational> formula;
    switch (kernel.tie()) {
      case TieRule::PreferA: {
        const int s_b = wants_a(tau) ? 1 : 2;
        const int s_a = wants_a(tau + inv_n) ? 1 : 2;
        formula = rho * Rational(2 - s_b) - x[p] + x[p] * Rational(s_b - s_a);
        break;
      }
      case TieRule::SelfInclusivePreferA: {
        const int s = wants_a(tau) ? 1 : 2;
        formula = rho * Rational(2 - s) - x[p];
        break;
      }
      default: break;
    }
    if (formula) {
      if (*formula != drift[p]) {
        violations.push_back({state, p, drift[p], {*formula, *formula}, "drift differs from the closed form"});
      } else {
        ++tally.formula_checked;
      }
    }
  }
}

}  // namespace detail

std::vector<std::pair<std::int64_t, double>> median_amplitudes(const std::vector<SweepRow>& rows) {
  std::vector<std::int64_t> sizes;
  for (const auto& r : rows) sizes.push_back(r.n);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::vector<std::pair<std::int64_t, double>> out;
  for (const auto n : sizes) {
    std::vector<double> amp;
    for (const auto& r : rows) {
      if (r.n == n) amp.push_back(r.amplitude.to_double());
    }
    std::sort(amp.begin(), amp.end());
    const std::size_t m = amp.size();
    const double med = m % 2 ? amp[m / 2] : 0.5 * (amp[m / 2 - 1] + amp[m / 2]);
    out.emplace_back(n, med);
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool decimal) {
  auto num = [decimal](const Rational& r) { return decimal ? r.decimal() : r.str(); };
  os << "N,replicate,seed,min_total,max_total,amplitude\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.replicate << ',' << r.seed << ',' << num(r.min_total) << ',' << num(r.max_total) << ','
       << num(r.amplitude) << '\n';
  }
}

namespace serial {

std::vector<SweepRow> fluctuation_sweep(const PopulationProfile& profile, const SweepConfig& config) {
  const auto cells = detail::sweep_cells(profile, config);
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  std::optional<ChainKernel> kernel;
  for (const auto& cell : cells) {
    if (!kernel || kernel->n() != cell.n) kernel.emplace(profile, cell.n, config.tie);
    rows.push_back(detail::run_sweep_cell(*kernel, config, cell.replicate));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.n != b.n ? a.n < b.n : a.replicate < b.replicate;
  });
  return rows;
}

DriftReport drift_consistency_check(const PopulationProfile& profile, std::int64_t n, TieRule tie,
                                    std::int64_t state_cap) {
  const ChainKernel kernel(profile, n, tie);
  detail::require_state_cap(kernel, state_cap);
  DriftReport report;
  report.n = n;
  report.tie = tie;
  report.states = kernel.state_count();
  detail::DriftTally tally;
  for (std::int64_t k = 0; k < report.states; ++k) {
    detail::check_drift_state(kernel, detail::decode_state(kernel, k), tally, report.violations);
  }
  report.singleton_matched = tally.singleton_matched;
  report.band_contained = tally.band_contained;
  report.formula_checked = tally.formula_checked;
  return report;
}

}  // namespace serial

nlohmann::json to_json(const DriftReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"counts", v.state.counts},
                          {"component", v.component},
                          {"drift", v.drift.str()},
                          {"allowed", {v.allowed.lo.str(), v.allowed.hi.str()}},
                          {"reason", v.reason}});
  }
  return {{"N", report.n},
          {"tie", to_string(report.tie)},
          {"states", report.states},
          {"singleton_matched", report.singleton_matched},
          {"band_contained", report.band_contained},
          {"formula_checked", report.formula_checked},
          {"violation_count", report.violations.size()},
          {"violations", std::move(violations)}};
}

// ---------------------------------------------------------------------------
// Concentration

double directed_hausdorff(double lo, double hi, std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::infinity();
  std::sort(values.begin(), values.end());
  auto nearest = [&](double x) {
    double d = std::numeric_limits<double>::infinity();
    for (const double v : values) d = std::min(d, std::abs(x - v));
    return d;
  };
  double worst = std::max(nearest(lo), nearest(hi));
  // Inside the range the distance peaks midway between consecutive values.
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double mid = 0.5 * (values[k - 1] + values[k]);
    if (lo <= mid && mid <= hi) worst = std::max(worst, nearest(mid));
  }
  return worst;
}

std::vector<ConcentrationRow> concentration_check(const PopulationProfile& profile,
                                                  const std::vector<std::int64_t>& sizes, double eps, TieRule tie,
                                                  const ClosedClassOptions& options, bool allow_degenerate) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be nonnegative");
  const auto centre = birkhoff_center(profile, allow_degenerate);
  std::vector<double> values;
  std::vector<std::vector<double>> points;
  for (const auto& e : centre) {
    values.push_back(e.abstract_value.to_double());
    points.push_back(e.state_double());
  }

  std::vector<ConcentrationRow> rows;
  for (const auto n : sizes) {
    const ChainKernel kernel(profile, n, tie);
    const auto classes = closed_classes(kernel, options);
    const auto near_centre = [&](const DiscreteState& s) {
      for (const auto& b : points) {
        bool close = true;
        for (std::size_t p = 0; p < b.size() && close; ++p) {
          close = std::abs(static_cast<double>(s.counts[p]) / static_cast<double>(n) - b[p]) <= eps;
        }
        if (close) return true;
      }
      return false;
    };
    const auto mass = invariant_measure_mass(classes, near_centre);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      ConcentrationRow row;
      row.n = n;
      row.class_id = c;
      row.abs_lo = classes[c].abstract_lo;
      row.abs_hi = classes[c].abstract_hi;
      row.hausdorff = directed_hausdorff(row.abs_lo.to_double(), row.abs_hi.to_double(), values);
      row.mass_within_eps = mass[c].value;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_concentration_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows, bool decimal) {
  auto num = [decimal](const Rational& r) { return decimal ? r.decimal() : r.str(); };
  const auto old_precision = os.precision(12);
  os << "N,class_id,abs_lo,abs_hi,hausdorff,mass_within_eps\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.class_id << ',' << num(r.abs_lo) << ',' << num(r.abs_hi) << ',' << r.hausdorff << ','
       << r.mass_within_eps << '\n';
  }
  os.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Overlay

Overlay compare_discrete_continuous(const PopulationProfile& profile, const DiscreteState& start, std::int64_t steps,
                                    std::uint64_t seed, TieRule tie, const FlowOptions& flow_options) {
  const ChainKernel kernel(profile, start.n, tie);
  kernel.require_contains(start);
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be at least 1");

  Overlay overlay;
  overlay.rows.reserve(static_cast<std::size_t>(steps) + 1);
  const double n = static_cast<double>(start.n);
  overlay.discrete = simulate(kernel, start, steps, 0, seed, [&](std::int64_t k, const DiscreteState& s) {
    overlay.rows.push_back({static_cast<double>(k) / n, s.total_double(), 0.0});
  });

  ContinuousState x0;
  for (const auto c : start.counts) x0.push_back(static_cast<double>(c) / n);
  FlowOptions opts = flow_options;
  opts.t_end = static_cast<double>(steps) / n;
  overlay.continuous = flow(profile, x0, opts);
  for (auto& row : overlay.rows) {
    row.continuous_total = total(overlay.continuous.state_at(row.t));
    overlay.sup_gap = std::max(overlay.sup_gap, std::abs(row.discrete_total - row.continuous_total));
  }
  return overlay;
}

void write_overlay_csv(std::ostream& os, const Overlay& overlay) {
  const auto old_precision = os.precision(12);
  os << "t,discrete_total,continuous_total\n";
  for (const auto& r : overlay.rows) os << r.t << ',' << r.discrete_total << ',' << r.continuous_total << '\n';
  os.precision(old_precision);
}

}  // namespace popdyn
