#include "popdyn/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <string>

#include "popdyn/error.hpp"

namespace popdyn {

std::string to_string(SegmentKind kind) { return kind == SegmentKind::Smooth ? "smooth" : "sliding"; }

double total(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }

namespace {

// Whether subpopulation p strictly prefers A given the sign of (total - tau).
bool prefers_a(Role role, int side) {
  return role == Role::Anticoordinator ? side < 0 : side > 0;
}

void require_dimension(const PopulationProfile& profile, std::size_t got) {
  if (got != profile.size()) {
    throw Error(ErrorCode::StateOutOfSpace, "state has " + std::to_string(got) + " components, profile has " +
                                                std::to_string(profile.size()));
  }
}

}  // namespace

std::vector<RationalInterval> vector_field(const PopulationProfile& profile, std::span<const Rational> x) {
  require_dimension(profile, x.size());
  Rational sum;
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (x[p] < Rational(0) || x[p] > profile.rho(p)) {
      throw Error(ErrorCode::StateOutOfSpace, "component " + std::to_string(p) + " = " + x[p].str() +
                                                  " outside [0, " + profile.rho(p).str() + "]");
    }
    sum += x[p];
  }
  std::vector<RationalInterval> field;
  field.reserve(x.size());
  for (std::size_t p = 0; p < x.size(); ++p) {
    const Rational down = -x[p];
    const Rational up = profile.rho(p) - x[p];
    const auto cmp = sum <=> profile.tau(p);
    if (cmp == 0) {
      field.push_back({down, up});
    } else {
      const bool a = prefers_a(profile.role(p), cmp < 0 ? -1 : 1);
      field.push_back({a ? up : down, a ? up : down});
    }
  }
  return field;
}

std::vector<RealInterval> vector_field(const PopulationProfile& profile, std::span<const double> x, double eq_tol) {
  require_dimension(profile, x.size());
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (x[p] < -eq_tol || x[p] > profile.rho(p).to_double() + eq_tol) {
      throw Error(ErrorCode::StateOutOfSpace, "component " + std::to_string(p) + " = " + std::to_string(x[p]) +
                                                  " outside [0, " + profile.rho(p).decimal() + "]");
    }
  }
  const double sum = total(x);
  std::vector<RealInterval> field;
  field.reserve(x.size());
  for (std::size_t p = 0; p < x.size(); ++p) {
    const double down = -x[p];
    const double up = profile.rho(p).to_double() - x[p];
    const double gap = sum - profile.tau(p).to_double();
    if (std::abs(gap) <= eq_tol) {
      field.push_back({down, up});
    } else {
      const bool a = prefers_a(profile.role(p), gap < 0 ? -1 : 1);
      field.push_back({a ? up : down, a ? up : down});
    }
  }
  return field;
}

RationalInterval abstract_field(const PopulationProfile& profile, const Rational& x, bool allow_degenerate) {
  profile.require_usable(allow_degenerate);
  if (x < Rational(0) || x > Rational(1)) {
    throw Error(ErrorCode::StateOutOfSpace, "total " + x.str() + " outside [0,1]");
  }
  RationalInterval out{-x, -x};
  for (std::size_t p = 0; p < profile.size(); ++p) {
    const auto cmp = x <=> profile.tau(p);
    if (cmp == 0) {
      out.hi += profile.rho(p);
    } else if (prefers_a(profile.role(p), cmp < 0 ? -1 : 1)) {
      out.lo += profile.rho(p);
      out.hi += profile.rho(p);
    }
  }
  return out;
}

RealInterval abstract_field(const PopulationProfile& profile, double x, double eq_tol, bool allow_degenerate) {
  profile.require_usable(allow_degenerate);
  if (x < -eq_tol || x > 1.0 + eq_tol) {
    throw Error(ErrorCode::StateOutOfSpace, "total " + std::to_string(x) + " outside [0,1]");
  }
  RealInterval out{-x, -x};
  for (std::size_t p = 0; p < profile.size(); ++p) {
    const double rho = profile.rho(p).to_double();
    const double gap = x - profile.tau(p).to_double();
    if (std::abs(gap) <= eq_tol) {
      out.hi += rho;
    } else if (prefers_a(profile.role(p), gap < 0 ? -1 : 1)) {
      out.lo += rho;
      out.hi += rho;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flow

ContinuousState FlowSegment::state_at(double t) const {
  const double decay = std::exp(-(t - t0));
  ContinuousState x(start.size());
  for (std::size_t p = 0; p < x.size(); ++p) x[p] = target[p] + (start[p] - target[p]) * decay;
  return x;
}

const FlowSegment& FlowTrajectory::segment_at(double t) const {
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const FlowSegment& s) { return v < s.t0; });
  if (it != segments.begin()) --it;
  return *it;
}

ContinuousState FlowTrajectory::state_at(double t) const {
  if (t >= t_end) return final_state;
  return segment_at(t).state_at(t);
}

std::vector<Breakpoint> FlowTrajectory::breakpoints() const {
  std::vector<Breakpoint> out;
  for (const auto& s : segments) out.push_back({s.t0, s.start, s.kind});
  if (!segments.empty() && t_end > segments.back().t0) out.push_back({t_end, final_state, segments.back().kind});
  return out;
}

namespace {

// Sorted distinct thresholds and the constant targets of the open regions
// between them. Region k lies between thresholds k-1 and k (with 0 and 1 as
// outer bounds), so threshold k separates regions k and k+1.
struct Regions {
  std::vector<Rational> theta;
  std::vector<double> theta_d;
  std::vector<std::vector<std::size_t>> owners;  // subpopulations at each threshold
  std::vector<ContinuousState> target;
  std::vector<Rational> target_total;
  std::vector<double> target_total_d;

  explicit Regions(const PopulationProfile& profile) {
    std::vector<std::pair<Rational, std::size_t>> all;
    for (std::size_t p = 0; p < profile.size(); ++p) all.emplace_back(profile.tau(p), p);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [tau, p] : all) {
      if (theta.empty() || theta.back() != tau) {
        theta.push_back(tau);
        theta_d.push_back(tau.to_double());
        owners.emplace_back();
      }
      owners.back().push_back(p);
    }
    const std::size_t regions = theta.size() + 1;
    for (std::size_t k = 0; k < regions; ++k) {
      const Rational lo = k == 0 ? Rational(0) : theta[k - 1];
      const Rational hi = k == theta.size() ? Rational(1) : theta[k];
      const Rational mid = (lo + hi) / Rational(2);
      ContinuousState c(profile.size(), 0.0);
      Rational sum;
      for (std::size_t p = 0; p < profile.size(); ++p) {
        const auto cmp = mid <=> profile.tau(p);
        if (prefers_a(profile.role(p), cmp < 0 ? -1 : 1)) {
          c[p] = profile.rho(p).to_double();
          sum += profile.rho(p);
        }
      }
      target.push_back(std::move(c));
      target_total.push_back(sum);
      target_total_d.push_back(sum.to_double());
    }
  }
};

double sup_distance(const ContinuousState& a, const ContinuousState& b) {
  double d = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) d = std::max(d, std::abs(a[p] - b[p]));
  return d;
}

void check_in_space(const PopulationProfile& profile, const ContinuousState& x, double tol) {
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (!(x[p] >= -tol && x[p] <= profile.rho(p).to_double() + tol)) {
      throw Error(ErrorCode::StateOutOfSpace, "flow component " + std::to_string(p) + " = " +
                                                  std::to_string(x[p]) + " left the state space");
    }
  }
}

}  // namespace

FlowTrajectory flow(const PopulationProfile& profile, const ContinuousState& x0, const FlowOptions& options) {
  profile.require_usable(options.allow_degenerate);
  require_dimension(profile, x0.size());
  if (!(options.t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_end must be positive");
  if (!(options.eq_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "eq_tol must be positive");
  check_in_space(profile, x0, options.eq_tol);

  const Regions regions(profile);
  const std::size_t thresholds = regions.theta.size();
  const double tol = options.eq_tol;

  FlowTrajectory traj;
  double t = 0.0;
  ContinuousState x = x0;

  // Position: either inside region `region` or exactly at threshold `at`.
  std::optional<std::size_t> at;
  std::size_t region = 0;
  {
    const double s = total(x);
    for (std::size_t k = 0; k < thresholds; ++k) {
      if (std::abs(s - regions.theta_d[k]) <= tol) at = k;
    }
    if (!at) {
      region = static_cast<std::size_t>(
          std::lower_bound(regions.theta_d.begin(), regions.theta_d.end(), s) - regions.theta_d.begin());
    }
  }

  auto push_segment = [&](FlowSegment seg) {
    if (!traj.segments.empty() && traj.segments.back().t0 >= seg.t0) traj.segments.pop_back();
    traj.segments.push_back(std::move(seg));
  };

  // Runs the last segment to the end of the horizon or to its rest point.
  auto finish = [&](const FlowSegment& seg) {
    const double dev = sup_distance(seg.start, seg.target);
    const double t_conv = dev <= tol ? seg.t0 : seg.t0 + std::log(dev / tol);
    if (options.stop_at_equilibrium && t_conv <= options.t_end) {
      traj.t_end = std::max(t_conv, seg.t0);
      traj.converged = true;
    } else {
      traj.t_end = options.t_end;
    }
    traj.final_state = seg.state_at(traj.t_end);
    check_in_space(profile, traj.final_state, tol);
  };

  int tiny_steps = 0;
  for (;;) {
    if (at) {
      const std::size_t k = *at;
      const Rational& theta = regions.theta[k];
      const Rational& below = regions.target_total[k];
      const Rational& above = regions.target_total[k + 1];
      bool up = below > theta && above > theta;
      bool down = below < theta && above < theta;
      // A repelling rest point (both sides push away) is left only on request.
      const bool repelling = below <= theta && theta <= above && below != above;
      if (repelling && options.perturb == Perturbation::Up && above > theta) up = true;
      if (repelling && options.perturb == Perturbation::Down && below < theta) down = true;
      if (up) {
        region = k + 1;
        at.reset();
        continue;
      }
      if (down) {
        region = k;
        at.reset();
        continue;
      }
      // Pinned at the threshold: the first owner absorbs the residual.
      FlowSegment seg;
      seg.t0 = t;
      seg.start = x;
      seg.kind = SegmentKind::Sliding;
      seg.target = regions.target[k];
      const std::size_t q = regions.owners[k].front();
      double others = 0.0;
      for (std::size_t p = 0; p < x.size(); ++p) {
        if (p != q) others += seg.target[p];
      }
      seg.target[q] = regions.theta_d[k] - others;
      seg.pinned = q;
      seg.threshold = regions.theta_d[k];
      push_segment(seg);
      finish(seg);
      return traj;
    }

    FlowSegment seg;
    seg.t0 = t;
    seg.start = x;
    seg.kind = SegmentKind::Smooth;
    seg.target = regions.target[region];
    push_segment(seg);

    const Rational& c = regions.target_total[region];
    const double c_d = regions.target_total_d[region];
    const double s = total(x);
    std::optional<std::size_t> hit;
    if (region < thresholds && c > regions.theta[region]) hit = region;
    if (region > 0 && c < regions.theta[region - 1]) hit = region - 1;
    if (!hit) {
      finish(seg);
      return traj;
    }
    const double dt = std::log((c_d - s) / (c_d - regions.theta_d[*hit]));
    if (!(dt >= 0.0)) {
      throw Error(ErrorCode::NoProgress, "negative event time " + std::to_string(dt) + " at t=" + std::to_string(t));
    }
    if (t + dt >= options.t_end) {
      traj.t_end = options.t_end;
      traj.final_state = seg.state_at(options.t_end);
      check_in_space(profile, traj.final_state, tol);
      return traj;
    }
    tiny_steps = dt < 1e-14 ? tiny_steps + 1 : 0;
    if (tiny_steps > 16) {
      throw Error(ErrorCode::NoProgress, "repeated zero-length events near t=" + std::to_string(t));
    }
    t += dt;
    x = seg.state_at(t);
    check_in_space(profile, x, tol);
    at = hit;
  }
}

// ---------------------------------------------------------------------------
// Sampling and output

std::vector<ContinuousState> halton_states(const PopulationProfile& profile, std::size_t count, std::size_t skip) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < profile.size(); ++c) {
    if (std::all_of(primes.begin(), primes.end(), [c](unsigned q) { return c % q != 0; })) primes.push_back(c);
  }
  auto radical_inverse = [](std::size_t i, unsigned base) {
    double f = 1.0;
    double r = 0.0;
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    return r;
  };
  std::vector<ContinuousState> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    ContinuousState x(profile.size());
    for (std::size_t p = 0; p < x.size(); ++p) {
      x[p] = profile.rho(p).to_double() * radical_inverse(k + skip, primes[p]);
    }
    out.push_back(std::move(x));
  }
  return out;
}

void write_flow_csv(std::ostream& os, const FlowTrajectory& trajectory, double sample_dt) {
  const std::size_t dim = trajectory.final_state.size();
  os << "t";
  for (std::size_t p = 0; p < dim; ++p) os << ",x_" << p;
  os << ",total,segment_kind\n";
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  auto row = [&](double t, const ContinuousState& x, SegmentKind kind) {
    os << t;
    for (const double v : x) os << ',' << v;
    os << ',' << total(x) << ',' << to_string(kind) << '\n';
  };
  if (sample_dt > 0.0) {
    const auto steps = static_cast<std::size_t>(std::floor(trajectory.t_end / sample_dt));
    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * sample_dt;
      row(t, trajectory.state_at(t), trajectory.segment_at(t).kind);
    }
    if (static_cast<double>(steps) * sample_dt < trajectory.t_end) {
      row(trajectory.t_end, trajectory.final_state, trajectory.segments.back().kind);
    }
  } else {
    for (const auto& b : trajectory.breakpoints()) row(b.t, b.x, b.kind);
  }
  os.precision(old_precision);
}

}  // namespace popdyn
