#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "popdyn/cli.hpp"

namespace popdyn {
namespace {

namespace fs = std::filesystem;

const std::string kConfigs = POPDYN_CONFIG_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "popdyn");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return kConfigs + "/" + name + ".json"; }

TEST(Cli, EquilibriaReportsThreeRows) {
  const auto r = run({"equilibria", "--config", config("three_group")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["equilibria"].size(), 3u);
  EXPECT_EQ(doc["equilibria"][0]["abstract_value"], "7/10");
  EXPECT_EQ(doc["equilibria"][1]["abstract_value"], "3/4");
  EXPECT_EQ(doc["equilibria"][2]["abstract_value"], "17/20");
}

TEST(Cli, EquilibriaCsvAndDecimal) {
  const auto r = run({"equilibria", "--config", config("seven_group"), "--format", "csv", "--decimal"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "kind,i,j,abstract_value,state,stability,basin_lo,basin_hi");
  EXPECT_NE(r.out.find("0.5"), std::string::npos);
}

TEST(Cli, ValidateGate) {
  EXPECT_EQ(run({"validate", "--config", config("three_group")}).code, 0);
  const auto bad = run({"validate", "--config", config("degenerate")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
  const auto refused = run({"equilibria", "--config", config("degenerate")});
  EXPECT_EQ(refused.code, 1);
  EXPECT_NE(refused.err.find("AssumptionViolated"), std::string::npos);
  EXPECT_EQ(run({"equilibria", "--config", config("degenerate"), "--allow-degenerate"}).code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"equilibria"}).code, 2);
  EXPECT_EQ(run({"equilibria", "--config", config("missing")}).code, 2);
  EXPECT_EQ(run({"frobnicate", "--config", config("three_group")}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", config("three_group"), "--tie", "sometimes"}).code, 2);
  EXPECT_EQ(run({"equilibria", "--help"}).code, 0);
}

TEST(Cli, DomainErrorsNameTheCondition) {
  const auto size = run({"simulate", "--config", config("three_group"), "--n", "15"});
  EXPECT_EQ(size.code, 1);
  EXPECT_NE(size.err.find("InvalidSize"), std::string::npos);
  const auto cap = run({"concentration", "--config", config("six_group"), "--sizes", "600"});
  EXPECT_EQ(cap.code, 1);
  EXPECT_NE(cap.err.find("StateSpaceTooLarge"), std::string::npos);
}

TEST(Cli, SweepIsByteIdentical) {
  const std::vector<std::string> args{"sweep",         "--config", config("six_group"), "--sizes", "30,60,120",
                                      "--replicates", "5",        "--seed",             "7"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "N,replicate,seed,min_total,max_total,amplitude");
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 16);
}

TEST(Cli, OutputFileAndConfigUntouched) {
  const auto dir = fs::temp_directory_path() / "popdyn_cli_test";
  fs::create_directories(dir);
  const auto out = dir / "eq.json";
  const auto before = fs::last_write_time(config("three_group"));
  const auto r = run({"equilibria", "--config", config("three_group"), "--output", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  const auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc["equilibria"].size(), 3u);
  EXPECT_EQ(fs::last_write_time(config("three_group")), before);
  fs::remove_all(dir);
}

TEST(Cli, SimulateAndTrajectory) {
  const auto dir = fs::temp_directory_path() / "popdyn_cli_sim";
  fs::create_directories(dir);
  const auto traj = dir / "traj.csv";
  const auto r = run({"simulate", "--config", config("three_group"), "--n", "20", "--start", "12,0,2", "--steps", "50",
                      "--seed", "3", "--trajectory", traj.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["amplitude"], "0/1");
  std::ifstream in(traj);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "step,subpop_0,subpop_1,subpop_2,total_x");
  fs::remove_all(dir);
}

TEST(Cli, FlowDriftConcentrationCompare) {
  const auto f = run({"flow", "--config", config("anti_single"), "--x0", "0", "--t-end", "3"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(f.out.substr(0, f.out.find('\n')), "t,x_0,total,segment_kind");

  for (const char* tie : {"prefer-a", "prefer-b", "uniform", "self-inclusive"}) {
    const auto d = run({"drift-check", "--config", config("three_group"), "--n", "20", "--tie", tie});
    EXPECT_EQ(d.code, 0) << tie << d.out;
  }

  const auto c = run({"concentration", "--config", config("coord_only"), "--sizes", "4", "--eps", "0.05"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out.substr(0, c.out.find('\n')), "N,class_id,abs_lo,abs_hi,hausdorff,mass_within_eps");

  const auto o = run({"compare", "--config", config("six_group"), "--n", "30", "--steps", "300", "--seed", "1"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "t,discrete_total,continuous_total");
  EXPECT_NE(o.err.find("sup_gap="), std::string::npos);
}

}  // namespace
}  // namespace popdyn
