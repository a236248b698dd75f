#include "popdyn/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "popdyn/error.hpp"

namespace popdyn {

std::int64_t DiscreteState::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::ostream& operator<<(std::ostream& os, const DiscreteState& s) {
  os << '(';
  for (std::size_t k = 0; k < s.counts.size(); ++k) os << (k ? "," : "") << s.counts[k];
  return os << ")/" << s.n;
}

ChainKernel::ChainKernel(const PopulationProfile& profile, std::int64_t n, TieRule tie)
    : profile_(profile), n_(n), tie_(tie) {
  if (!is_valid_size(profile, n)) {
    throw Error(ErrorCode::InvalidSize, "N=" + std::to_string(n) + " is not a multiple of " +
                                            std::to_string(base_size(profile)));
  }
  offsets_.push_back(0);
  for (std::size_t p = 0; p < profile.size(); ++p) {
    const Rational scaled = profile.rho(p) * Rational(n);
    sizes_.push_back(scaled.numerator_i64());
    offsets_.push_back(offsets_.back() + sizes_.back());
    roles_.push_back(profile.role(p));
    const auto [num, den] = profile.tau(p).as_i64();
    tau_num_.push_back(num);
    tau_den_.push_back(den);
  }
}

bool ChainKernel::contains(std::span<const std::int64_t> counts) const {
  if (counts.size() != sizes_.size()) return false;
  for (std::size_t p = 0; p < counts.size(); ++p) {
    if (counts[p] < 0 || counts[p] > sizes_[p]) return false;
  }
  return true;
}

void ChainKernel::require_contains(const DiscreteState& state) const {
  if (state.n != n_ || !contains(state.counts)) {
    std::ostringstream msg;
    msg << state << " is not a state of the N=" << n_ << " chain";
    throw Error(ErrorCode::StateOutOfSpace, msg.str());
  }
}

Preference ChainKernel::preference(std::size_t p, std::int64_t total, Strategy current) const {
  return preferred_strategy(roles_[p], tau_num_[p], tau_den_[p], total, n_, current, tie_);
}

namespace {

// Weight out of 2 that a player currently at `current` switches.
std::int64_t switch_weight(Preference pref, Strategy current) {
  if (pref == Preference::Coin) return 1;
  const bool wants_a = pref == Preference::A;
  return (wants_a != (current == Strategy::A)) ? 2 : 0;
}

}  // namespace

ChainKernel::Moves ChainKernel::moves(std::span<const std::int64_t> counts, std::size_t p,
                                      std::int64_t total) const {
  Moves m;
  const std::int64_t b_players = sizes_[p] - counts[p];
  if (b_players > 0) m.up2 = b_players * switch_weight(preference(p, total, Strategy::B), Strategy::B);
  if (counts[p] > 0) m.down2 = counts[p] * switch_weight(preference(p, total, Strategy::A), Strategy::A);
  return m;
}

std::int64_t ChainKernel::state_count() const {
  constexpr std::int64_t cap = std::numeric_limits<std::int64_t>::max();
  std::int64_t count = 1;
  for (const auto s : sizes_) {
    if (count > cap / (s + 1)) return cap;
    count *= s + 1;
  }
  return count;
}

std::optional<std::size_t> ChainKernel::step(std::span<std::int64_t> counts, std::int64_t& total,
                                             Engine& rng) const {
  std::uniform_int_distribution<std::int64_t> pick(0, n_ - 1);
  const std::int64_t agent = pick(rng);
  const auto it = std::upper_bound(offsets_.begin() + 1, offsets_.end(), agent);
  const auto p = static_cast<std::size_t>(it - (offsets_.begin() + 1));
  const Strategy current = agent - offsets_[p] < counts[p] ? Strategy::A : Strategy::B;
  Preference pref = preference(p, total, current);
  if (pref == Preference::Coin) pref = (rng() & 1U) ? Preference::A : Preference::B;
  if (pref == Preference::A && current == Strategy::B) {
    ++counts[p];
    ++total;
    return p;
  }
  if (pref == Preference::B && current == Strategy::A) {
    --counts[p];
    --total;
    return p;
  }
  return std::nullopt;
}

DiscreteState ChainKernel::random_state(Engine& rng) const {
  DiscreteState s{n_, std::vector<std::int64_t>(sizes_.size())};
  for (std::size_t p = 0; p < sizes_.size(); ++p) {
    s.counts[p] = std::uniform_int_distribution<std::int64_t>(0, sizes_[p])(rng);
  }
  return s;
}

TransitionDistribution transition_distribution(const ChainKernel& kernel, const DiscreteState& state) {
  kernel.require_contains(state);
  TransitionDistribution dist;
  const std::int64_t total = state.total();
  const std::int64_t denom = 2 * kernel.n();
  std::int64_t stay = denom;
  for (std::size_t p = 0; p < kernel.dim(); ++p) {
    const auto m = kernel.moves(state.counts, p, total);
    if (m.up2 > 0) {
      DiscreteState next = state;
      ++next.counts[p];
      dist.entries.push_back({std::move(next), Rational(m.up2, denom)});
    }
    if (m.down2 > 0) {
      DiscreteState next = state;
      --next.counts[p];
      dist.entries.push_back({std::move(next), Rational(m.down2, denom)});
    }
    stay -= m.up2 + m.down2;
  }
  if (stay > 0) dist.entries.push_back({state, Rational(stay, denom)});
  return dist;
}

TransitionDistribution transition_distribution(const PopulationProfile& profile, const DiscreteState& state,
                                               TieRule tie) {
  return transition_distribution(ChainKernel(profile, state.n, tie), state);
}

DiscreteState step(const ChainKernel& kernel, const DiscreteState& state, Engine& rng) {
  kernel.require_contains(state);
  DiscreteState next = state;
  std::int64_t total = next.total();
  kernel.step(next.counts, total, rng);
  return next;
}

TrajectoryStats simulate(const ChainKernel& kernel, const DiscreteState& state0, std::int64_t steps,
                         std::int64_t burn_in, std::uint64_t seed, const TrajectoryObserver& observer) {
  kernel.require_contains(state0);
  if (steps < 0 || burn_in < 0 || burn_in > steps) {
    throw Error(ErrorCode::InvalidArgument, "need 0 <= burn_in <= steps");
  }
  Engine rng(seed);
  DiscreteState state = state0;
  std::int64_t total = state.total();
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t k = 0;; ++k) {
    if (observer) observer(k, state);
    if (k >= burn_in) {
      lo = std::min(lo, total);
      hi = std::max(hi, total);
    }
    if (k == steps) break;
    kernel.step(state.counts, total, rng);
  }
  TrajectoryStats stats;
  stats.min_total = Rational(lo, kernel.n());
  stats.max_total = Rational(hi, kernel.n());
  stats.amplitude = stats.max_total - stats.min_total;
  stats.final_state = std::move(state);
  stats.steps = steps;
  stats.seed = seed;
  return stats;
}

std::vector<Rational> expected_drift(const ChainKernel& kernel, const DiscreteState& state) {
  kernel.require_contains(state);
  const std::int64_t total = state.total();
  std::vector<Rational> drift;
  drift.reserve(kernel.dim());
  for (std::size_t p = 0; p < kernel.dim(); ++p) {
    const auto m = kernel.moves(state.counts, p, total);
    drift.emplace_back(m.up2 - m.down2, 2 * kernel.n());
  }
  return drift;
}

double noise_bound(const PopulationProfile& profile) {
  double sum = 0.0;
  for (const auto& r : profile.rho_flat()) {
    const double v = 1.0 + r.to_double();
    sum += v * v;
  }
  return std::sqrt(sum);
}

std::vector<MeasureMass> invariant_measure_mass(const std::vector<ClosedClass>& classes,
                                                const std::function<bool(const DiscreteState&)>& region) {
  std::vector<MeasureMass> out;
  out.reserve(classes.size());
  for (const auto& cls : classes) {
    MeasureMass mass;
    Rational exact;
    for (std::size_t k = 0; k < cls.states.size(); ++k) {
      if (!region(cls.states[k])) continue;
      mass.value += cls.measure[k];
      if (cls.exact_measure) exact += (*cls.exact_measure)[k];
    }
    if (cls.exact_measure) {
      mass.exact = exact;
      mass.value = exact.to_double();
    }
    out.push_back(std::move(mass));
  }
  return out;
}

nlohmann::json to_json(const std::vector<ClosedClass>& classes, bool decimal) {
  auto num = [decimal](const Rational& r) { return decimal ? r.decimal() : r.str(); };
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& cls = classes[c];
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t k = 0; k < cls.states.size(); ++k) {
      nlohmann::json e;
      e["counts"] = cls.states[k].counts;
      if (cls.exact_measure) {
        e["probability"] = num((*cls.exact_measure)[k]);
      } else {
        e["probability"] = cls.measure[k];
      }
      entries.push_back(std::move(e));
    }
    out.push_back({{"class_id", c},
                   {"size", cls.states.size()},
                   {"singleton", cls.is_singleton},
                   {"abstract_range", {num(cls.abstract_lo), num(cls.abstract_hi)}},
                   {"measure", std::move(entries)}});
  }
  return out;
}

void write_trajectory_header(std::ostream& os, std::size_t dim) {
  os << "step";
  for (std::size_t p = 0; p < dim; ++p) os << ",subpop_" << p;
  os << ",total_x\n";
}

void write_trajectory_row(std::ostream& os, std::int64_t step, const DiscreteState& state, bool decimal) {
  os << step;
  for (const auto c : state.counts) os << ',' << c;
  const Rational total = state.total_x();
  os << ',' << (decimal ? total.decimal() : total.str()) << '\n';
}

}  // namespace popdyn
