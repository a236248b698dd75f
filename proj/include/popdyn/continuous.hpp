#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "popdyn/profile.hpp"
#include "popdyn/rational.hpp"

namespace popdyn {

/// Closed interval [lo, hi]; a singleton when lo == hi.
template <class T>
struct Interval {
  T lo{};
  T hi{};

  bool is_singleton() const { return lo == hi; }
  bool contains(const T& v) const { return lo <= v && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

using RationalInterval = Interval<Rational>;
using RealInterval = Interval<double>;

/// Point of the continuous state space, flat indexing.
using ContinuousState = std::vector<double>;

/// Per-component set-valued field at a rational state. Throws StateOutOfSpace
/// when some component leaves [0, rho_p].
std::vector<RationalInterval> vector_field(const PopulationProfile& profile, std::span<const Rational> x);
/// Floating-point version; the total counts as lying on a threshold when it is
/// within eq_tol of it.
std::vector<RealInterval> vector_field(const PopulationProfile& profile, std::span<const double> x,
                                       double eq_tol = 1e-12);

/// Field of the total A-proportion. Requires a usable profile unless
/// allow_degenerate is set.
RationalInterval abstract_field(const PopulationProfile& profile, const Rational& total,
                                bool allow_degenerate = false);
RealInterval abstract_field(const PopulationProfile& profile, double total, double eq_tol = 1e-12,
                            bool allow_degenerate = false);

enum class SegmentKind { Smooth, Sliding };
std::string to_string(SegmentKind kind);

/// Which side to leave an unstable threshold rest point on.
enum class Perturbation { None, Up, Down };

/// Piece of the flow on which every component relaxes exponentially to a
/// fixed target: x_p(t) = target_p + (start_p - target_p) exp(-(t - t0)).
/// On a sliding piece the total is pinned at `threshold` and the pinned
/// component's target is the equivalent control that keeps it there.
struct FlowSegment {
  double t0 = 0.0;
  ContinuousState start;
  SegmentKind kind = SegmentKind::Smooth;
  ContinuousState target;
  std::optional<std::size_t> pinned;
  std::optional<double> threshold;

  ContinuousState state_at(double t) const;
};

struct Breakpoint {
  double t = 0.0;
  ContinuousState x;
  SegmentKind kind = SegmentKind::Smooth;
};

struct FlowTrajectory {
  std::vector<FlowSegment> segments;
  double t_end = 0.0;
  ContinuousState final_state;
  /// True when the run stopped early within eq_tol of a rest point.
  bool converged = false;

  /// State at any t in [0, t_end].
  ContinuousState state_at(double t) const;
  const FlowSegment& segment_at(double t) const;
  /// Segment starts plus the final state.
  std::vector<Breakpoint> breakpoints() const;
};

struct FlowOptions {
  double t_end = 50.0;
  double eq_tol = 1e-12;
  /// Stop once within eq_tol (sup-norm) of the rest point of the current piece.
  bool stop_at_equilibrium = true;
  Perturbation perturb = Perturbation::None;
  bool allow_degenerate = false;
};

/// Event-driven integration of the mean dynamics from x0.
FlowTrajectory flow(const PopulationProfile& profile, const ContinuousState& x0, const FlowOptions& options = {});

double total(std::span<const double> x);

/// `count` interior points of the state space from a Halton sequence
/// (component p scaled into (0, rho_p)), skipping the first `skip` indices.
std::vector<ContinuousState> halton_states(const PopulationProfile& profile, std::size_t count,
                                           std::size_t skip = 1);

/// CSV with columns t, x_0.., total, segment_kind. With sample_dt > 0 the
/// segments are densified on that grid; otherwise only breakpoints are written.
void write_flow_csv(std::ostream& os, const FlowTrajectory& trajectory, double sample_dt = 0.0);

}  // namespace popdyn
