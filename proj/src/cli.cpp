#include "popdyn/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "popdyn/continuous.hpp"
#include "popdyn/discrete.hpp"
#include "popdyn/equilibria.hpp"
#include "popdyn/error.hpp"
#include "popdyn/experiments.hpp"
#include "popdyn/profile.hpp"

namespace popdyn::cli {

namespace {

struct Options {
  std::string config;
  std::string output;
  std::string format = "json";
  std::string tie = "prefer-a";
  std::string perturb = "none";
  std::string trajectory;
  std::uint64_t seed = 0;
  bool decimal = false;
  bool allow_degenerate = false;
  std::vector<std::int64_t> sizes;
  int replicates = 100;
  std::int64_t steps_per_agent = 30;
  double burn_in_fraction = 0.5;
  double eps = 0.1;
  double t_end = 50.0;
  double eq_tol = 1e-12;
  double sample_dt = 0.0;
  std::int64_t n = 0;
  std::int64_t steps = -1;
  std::int64_t burn_in = -1;
  std::vector<std::int64_t> start;
  std::vector<std::string> x0;
};

// Writes to --output when given, otherwise to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error(ErrorCode::Io, "cannot write " + path);
    stream_ = file_.get();
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

DiscreteState start_state(const ChainKernel& kernel, const Options& o) {
  if (o.start.empty()) {
    Engine rng(splitmix64(o.seed ^ 0x5bd1e995ULL));
    return kernel.random_state(rng);
  }
  DiscreteState s{kernel.n(), o.start};
  kernel.require_contains(s);
  return s;
}

std::int64_t require_n(const PopulationProfile& profile, const Options& o) {
  const std::int64_t n = o.n > 0 ? o.n : base_size(profile);
  if (!is_valid_size(profile, n)) {
    throw Error(ErrorCode::InvalidSize, "N=" + std::to_string(n) + " is not a multiple of " +
                                            std::to_string(base_size(profile)));
  }
  return n;
}

int cmd_validate(const PopulationProfile& profile, const Options& o, std::ostream& out) {
  const auto& report = profile.validation();
  nlohmann::json doc = to_json(report);
  doc["profile"] = to_json(profile);
  const auto& cum = profile.cumulative();
  nlohmann::json anti = nlohmann::json::array();
  nlohmann::json coord = nlohmann::json::array();
  for (int i = 0; i <= cum.anti_count(); ++i) anti.push_back(cum.anti_cum(i).str());
  for (int j = 0; j <= cum.coord_count(); ++j) coord.push_back(cum.coord_cum(j).str());
  doc["anti_cumulative"] = anti;
  doc["coord_cumulative"] = coord;
  doc["min_threshold_gap"] = o.decimal ? cum.min_threshold_gap().decimal() : cum.min_threshold_gap().str();
  doc["base_size"] = base_size(profile);
  Sink sink(o.output, out);
  *sink << doc.dump(2) << '\n';
  return report.status == ValidationStatus::Fail ? DomainError : Success;
}

int cmd_equilibria(const PopulationProfile& profile, const Options& o, std::ostream& out) {
  EnumerateOptions eo;
  eo.allow_degenerate = o.allow_degenerate;
  const auto set = classify(enumerate_equilibria(profile, eo));
  Sink sink(o.output, out);
  if (o.format == "csv") {
    write_csv(*sink, set, o.decimal);
  } else {
    *sink << to_json(set, o.decimal).dump(2) << '\n';
  }
  return Success;
}

int cmd_simulate(const PopulationProfile& profile, const Options& o, std::ostream& out) {
  const ChainKernel kernel(profile, require_n(profile, o), parse_tie_rule(o.tie));
  const std::int64_t steps = o.steps >= 0 ? o.steps : 30 * kernel.n();
  const std::int64_t burn_in = o.burn_in >= 0 ? o.burn_in : steps / 2;
  const auto start = start_state(kernel, o);

  std::unique_ptr<std::ofstream> dump;
  TrajectoryObserver observer;
  if (!o.trajectory.empty()) {
    dump = std::make_unique<std::ofstream>(o.trajectory);
    if (!*dump) throw Error(ErrorCode::Io, "cannot write " + o.trajectory);
    write_trajectory_header(*dump, kernel.dim());
    observer = [&](std::int64_t k, const DiscreteState& s) { write_trajectory_row(*dump, k, s, o.decimal); };
  }
  const auto stats = simulate(kernel, start, steps, burn_in, o.seed, observer);
  auto num = [&](const Rational& r) { return o.decimal ? r.decimal() : r.str(); };
  const nlohmann::json doc = {{"N", kernel.n()},
                              {"tie", o.tie},
                              {"seed", stats.seed},
                              {"steps", stats.steps},
                              {"burn_in", burn_in},
                              {"start", start.counts},
                              {"final", stats.final_state.counts},
                              {"min_total", num(stats.min_total)},
                              {"max_total", num(stats.max_total)},
                              {"amplitude", num(stats.amplitude)}};
  Sink sink(o.output, out);
  *sink << doc.dump(2) << '\n';
  return Success;
}

int cmd_flow(const PopulationProfile& profile, const Options& o, std::ostream& out) {
  ContinuousState x0;
  if (o.x0.empty()) {
    x0 = halton_states(profile, 1).front();
  } else {
    for (const auto& s : o.x0) x0.push_back(Rational::parse(s).to_double());
  }
  FlowOptions fo;
  fo.t_end = o.t_end;
  fo.eq_tol = o.eq_tol;
  fo.allow_degenerate = o.allow_degenerate;
  fo.perturb = o.perturb == "up" ? Perturbation::Up : o.perturb == "down" ? Perturbation::Down : Perturbation::None;
  const auto traj = flow(profile, x0, fo);
  Sink sink(o.output, out);
  write_flow_csv(*sink, traj, o.sample_dt);
  return Success;
}

int cmd_sweep(const PopulationProfile& profile, const Options& o, std::ostream& out) {
  SweepConfig config;
  config.sizes = o.sizes.empty() ? std::vector<std::int64_t>{base_size(profile)} : o.sizes;
  config.replicates = o.replicates;
  config.steps_per_agent = o.steps_per_agent;
  config.burn_in_fraction = o.burn_in_fraction;
  config.master_seed = o.seed;
  config.tie = parse_tie_rule(o.tie);
  const auto rows = fluctuation_sweep(profile, config);
  Sink sink(o.output, out);
  write_sweep_csv(*sink, rows, o.decimal);
  return Success;
}

int cmd_concentration(const PopulationProfile& profile, const Options& o, std::ostream& out) {
  const auto sizes = o.sizes.empty() ? std::vector<std::int64_t>{base_size(profile)} : o.sizes;
  const auto rows = concentration_check(profile, sizes, o.eps, parse_tie_rule(o.tie), {}, o.allow_degenerate);
  Sink sink(o.output, out);
  write_concentration_csv(*sink, rows, o.decimal);
  return Success;
}

int cmd_drift(const PopulationProfile& profile, const Options& o, std::ostream& out) {
  const auto report = drift_consistency_check(profile, require_n(profile, o), parse_tie_rule(o.tie));
  Sink sink(o.output, out);
  *sink << to_json(report).dump(2) << '\n';
  return report.ok() ? Success : DomainError;
}

int cmd_compare(const PopulationProfile& profile, const Options& o, std::ostream& out, std::ostream& err) {
  const ChainKernel kernel(profile, require_n(profile, o), parse_tie_rule(o.tie));
  const std::int64_t steps = o.steps > 0 ? o.steps : 30 * kernel.n();
  FlowOptions fo;
  fo.eq_tol = o.eq_tol;
  fo.allow_degenerate = o.allow_degenerate;
  const auto overlay = compare_discrete_continuous(profile, start_state(kernel, o), steps, o.seed, kernel.tie(), fo);
  Sink sink(o.output, out);
  write_overlay_csv(*sink, overlay);
  err << "sup_gap=" << overlay.sup_gap << '\n';
  return Success;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Best-response dynamics of coordinating and anticoordinating populations"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> tie_names{"prefer-a", "prefer-b", "uniform", "self-inclusive"};

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Profile JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", o.output, "Write the report here instead of stdout");
    sub->add_flag("--decimal", o.decimal, "Print decimals instead of exact fractions");
    sub->add_flag("--allow-degenerate", o.allow_degenerate, "Run even if thresholds coincide with benchmark sums");
  };
  auto tie_opt = [&](CLI::App* sub) {
    sub->add_option("--tie", o.tie, "Tie rule")->check(CLI::IsMember(tie_names));
  };

  auto* validate = app.add_subcommand("validate", "Check threshold uniqueness and print cumulative shares");
  common(validate);

  auto* equilibria = app.add_subcommand("equilibria", "Enumerate and classify equilibria");
  common(equilibria);
  equilibria->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* simulate_cmd = app.add_subcommand("simulate", "Run the finite-population chain");
  common(simulate_cmd);
  tie_opt(simulate_cmd);
  simulate_cmd->add_option("--n", o.n, "Population size (default: smallest valid)");
  simulate_cmd->add_option("--steps", o.steps, "Number of transitions (default 30N)");
  simulate_cmd->add_option("--burn-in", o.burn_in, "Transitions ignored by min/max (default steps/2)");
  simulate_cmd->add_option("--seed", o.seed, "RNG seed");
  simulate_cmd->add_option("--start", o.start, "Initial counts, comma separated")->delimiter(',');
  simulate_cmd->add_option("--trajectory", o.trajectory, "Dump every visited state to this CSV");

  auto* flow_cmd = app.add_subcommand("flow", "Integrate the mean dynamics");
  common(flow_cmd);
  flow_cmd->add_option("--x0", o.x0, "Initial state, comma separated (decimals or fractions)")->delimiter(',');
  flow_cmd->add_option("--t-end", o.t_end, "Time horizon");
  flow_cmd->add_option("--eq-tol", o.eq_tol, "Equilibrium and threshold tolerance");
  flow_cmd->add_option("--sample-dt", o.sample_dt, "Densify output on this time grid");
  flow_cmd->add_option("--perturb", o.perturb, "Leave an unstable rest point: none, up or down")
      ->check(CLI::IsMember({"none", "up", "down"}));

  auto* sweep = app.add_subcommand("sweep", "Fluctuation amplitude across population sizes");
  common(sweep);
  tie_opt(sweep);
  sweep->add_option("--sizes", o.sizes, "Population sizes, comma separated")->delimiter(',');
  sweep->add_option("--replicates", o.replicates, "Replicates per size");
  sweep->add_option("--steps-per-agent", o.steps_per_agent, "Transitions per agent");
  sweep->add_option("--burn-in-fraction", o.burn_in_fraction, "Fraction of steps ignored by min/max");
  sweep->add_option("--seed", o.seed, "Master seed");

  auto* concentration = app.add_subcommand("concentration", "Closed classes against the equilibria");
  common(concentration);
  tie_opt(concentration);
  concentration->add_option("--sizes", o.sizes, "Population sizes, comma separated")->delimiter(',');
  concentration->add_option("--eps", o.eps, "Sup-norm radius around equilibrium states");

  auto* drift = app.add_subcommand("drift-check", "Compare the chain's drift with the mean-dynamics field");
  common(drift);
  tie_opt(drift);
  drift->add_option("--n", o.n, "Population size (default: smallest valid)");

  auto* compare = app.add_subcommand("compare", "Overlay a chain run on the mean dynamics");
  common(compare);
  tie_opt(compare);
  compare->add_option("--n", o.n, "Population size (default: smallest valid)");
  compare->add_option("--steps", o.steps, "Number of transitions (default 30N)");
  compare->add_option("--seed", o.seed, "RNG seed");
  compare->add_option("--start", o.start, "Initial counts, comma separated")->delimiter(',');
  compare->add_option("--eq-tol", o.eq_tol, "Equilibrium tolerance of the flow");

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Success : UsageError;
  }

  try {
    const auto profile = load_profile(o.config);
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "validate") return cmd_validate(profile, o, out);
    if (name == "equilibria") return cmd_equilibria(profile, o, out);
    if (name == "simulate") return cmd_simulate(profile, o, out);
    if (name == "flow") return cmd_flow(profile, o, out);
    if (name == "sweep") return cmd_sweep(profile, o, out);
    if (name == "concentration") return cmd_concentration(profile, o, out);
    if (name == "drift-check") return cmd_drift(profile, o, out);
    if (name == "compare") return cmd_compare(profile, o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return DomainError;
  }
  return UsageError;
}

int run(int argc, char** argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace popdyn::cli
