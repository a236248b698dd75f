#include <gtest/gtest.h>

#include <sstream>

#include "popdyn/error.hpp"
#include "popdyn/profile.hpp"
#include "support/profiles.hpp"

namespace popdyn {
namespace {

using testing::fractions;
using testing::make;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no popdyn::Error thrown";
  return ErrorCode::Io;
}

TEST(Rational, ParsesDecimalsAndFractions) {
  EXPECT_EQ(Rational::parse("0.885"), Rational(177, 200));
  EXPECT_EQ(Rational::parse("12/30"), Rational(2, 5));
  EXPECT_EQ(Rational::parse(" 7 / 8 "), Rational(7, 8));
  EXPECT_EQ(Rational::parse("-3"), Rational(-3));
  EXPECT_EQ(Rational::parse("1e-2"), Rational(1, 100));
  EXPECT_EQ(Rational(6, 4).str(), "3/2");
  EXPECT_EQ(Rational(2).str(), "2/1");
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "abc", "1/0", "0.5.5", "1/", "--1"}) {
    EXPECT_EQ(code_of([&] { (void)Rational::parse(bad); }), ErrorCode::MalformedNumber) << bad;
  }
}

TEST(Rational, ArithmeticIsExact) {
  Rational sum;
  for (int k = 0; k < 10; ++k) sum += Rational::parse("0.1");
  EXPECT_EQ(sum, Rational(1));
  EXPECT_LT(Rational(1, 3), Rational(34, 100));
  EXPECT_EQ(Rational(1, 3).decimal(4), "0.3333");
}

TEST(Profile, SixGroupParsesIntoCanonicalOrder) {
  const auto profile = testing::six_group();
  EXPECT_EQ(profile.anti_count(), 1);
  EXPECT_EQ(profile.coord_count(), 5);
  const auto& coords = profile.coordinators();
  for (std::size_t k = 1; k < coords.size(); ++k) EXPECT_LT(coords[k - 1].tau, coords[k].tau);
  // Flat order lists coordinators by descending threshold.
  EXPECT_EQ(profile.tau(1), Rational::parse("0.89"));
  EXPECT_EQ(profile.tau(5), Rational::parse("0.21"));
  EXPECT_EQ(profile.role_index(1), 5);
  EXPECT_EQ(profile.flat_index(Role::Coordinator, 1), 5u);
}

TEST(Profile, SingleAnticoordinatorIsValid) {
  const auto profile = testing::anti_single();
  EXPECT_EQ(profile.size(), 1u);
  EXPECT_EQ(profile.validation().status, ValidationStatus::Pass);
}

TEST(Profile, SharesMustSumToOneExactly) {
  EXPECT_EQ(code_of([] { (void)make({{"1/2", "0.5"}}, {{"1/3", "0.4"}}); }), ErrorCode::ProportionsDoNotSumToOne);
  EXPECT_EQ(code_of([] { (void)make({{"0.5", "0.5"}}, {{"0.5", "0.5"}, {"0", "0.3"}}); }),
            ErrorCode::MalformedConfig);
}

TEST(Profile, ThresholdsMustLieStrictlyInsideUnitInterval) {
  EXPECT_EQ(code_of([] { (void)make({{"1", "1"}}, {}); }), ErrorCode::ThresholdOutOfRange);
  EXPECT_EQ(code_of([] { (void)make({}, {{"1", "0"}}); }), ErrorCode::ThresholdOutOfRange);
}

TEST(Profile, DuplicateThresholdWithinRoleRejected) {
  EXPECT_EQ(code_of([] { (void)make({{"0.5", "0.4"}, {"0.5", "0.4"}}, {}); }), ErrorCode::DuplicateThreshold);
}

TEST(Profile, ParseFromJsonSortsAndRejectsBadEntries) {
  const auto doc = nlohmann::json::parse(
      R"({"coordinators":[{"rho":"0.1","tau":"0.35"},{"rho":"0.3","tau":"0.75"}],
          "anticoordinators":[{"rho":"0.6","tau":"0.85"}]})");
  const auto profile = parse_profile(doc);
  EXPECT_EQ(profile.coordinators()[0].tau, Rational::parse("0.35"));
  EXPECT_EQ(profile.rho(1), Rational::parse("0.3"));

  EXPECT_EQ(code_of([] { (void)parse_profile(nlohmann::json::parse(R"({"anticoordinators":[{"rho":"x","tau":"0.5"}]})")); }),
            ErrorCode::MalformedNumber);
  EXPECT_EQ(code_of([] { (void)parse_profile(nlohmann::json::parse(R"({"other":[]})")); }), ErrorCode::MalformedConfig);
}

TEST(Profile, JsonRoundTrip) {
  const auto profile = testing::seven_group();
  const auto again = parse_profile(to_json(profile));
  EXPECT_EQ(again.rho_flat(), profile.rho_flat());
  EXPECT_EQ(again.tau_flat(), profile.tau_flat());
}

TEST(Validation, ThreeGroupPasses) {
  const auto report = validate_thresholds(testing::three_group());
  EXPECT_EQ(report.status, ValidationStatus::Pass);
  EXPECT_TRUE(report.holds());
}

TEST(Validation, CoordinatorSumOnOwnThresholdFails) {
  const auto profile = make({}, {{"0.5", "0.5"}, {"0.5", "0.9"}});
  const auto& report = profile.validation();
  EXPECT_EQ(report.status, ValidationStatus::Fail);
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.k == 0 && v.l == 1 && v.sum == Rational(1, 2)) {
      found = true;
      EXPECT_EQ(v.threshold_role, Role::Coordinator);
      EXPECT_EQ(v.threshold_index, 1);
      EXPECT_EQ(v.degenerate_case, DegenerateCase::CoordinatorSum);
      EXPECT_EQ(case_label(v.degenerate_case), "(ii)");
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(code_of([&] { profile.require_usable(); }), ErrorCode::AssumptionViolated);
  EXPECT_NO_THROW(profile.require_usable(true));
}

TEST(Validation, SharedThresholdAcrossRolesFails) {
  const auto profile = make({{"0.5", "0.6"}}, {{"0.5", "0.6"}});
  const auto& report = profile.validation();
  EXPECT_EQ(report.status, ValidationStatus::Fail);
  ASSERT_EQ(report.coincident.size(), 1u);
  EXPECT_EQ(report.coincident[0].tau, Rational::parse("0.6"));
  EXPECT_EQ(profile.cumulative().min_threshold_gap(), Rational(0));
}

TEST(Validation, NonBenchmarkCoincidenceIsBenign) {
  // A sum equal to a threshold away from its bracketing prefix pair does not
  // move any equilibrium.
  const auto report = testing::seven_group().validation();
  EXPECT_EQ(report.status, ValidationStatus::Benign);
  EXPECT_FALSE(report.holds());
  EXPECT_TRUE(report.usable());
  for (const auto& v : report.violations) EXPECT_FALSE(v.benchmark);
}

TEST(Cumulative, PartialSumsAndSentinels) {
  const auto profile = testing::three_group();
  const auto& cum = profile.cumulative();
  EXPECT_EQ(cum.anti_cum(0), Rational(0));
  EXPECT_EQ(cum.anti_cum(1), Rational::parse("0.6"));
  EXPECT_EQ(cum.anti_cum(2), Rational::parse("0.6"));
  EXPECT_EQ(cum.anti_cum(-1), Rational(0));
  EXPECT_EQ(cum.coord_cum(1), Rational::parse("0.1"));
  EXPECT_EQ(cum.coord_cum(2), Rational::parse("0.4"));
  EXPECT_EQ(cum.anti_threshold(0), Rational(1));
  EXPECT_EQ(cum.anti_threshold(2), Rational(0));
  EXPECT_EQ(cum.coord_threshold(0), Rational(0));
  EXPECT_EQ(cum.coord_threshold(3), Rational(1));
  EXPECT_EQ(code_of([&] { (void)cum.anti_cum(3); }), ErrorCode::IndexOutOfRange);
}

TEST(Cumulative, SingleAnticoordinator) {
  const auto profile = testing::anti_single();
  const auto& cum = profile.cumulative();
  EXPECT_EQ(cum.anti_cum(1), Rational(1));
  EXPECT_EQ(cum.coord_count(), 0);
  EXPECT_EQ(cum.coord_cum(0), Rational(0));
  EXPECT_EQ(cum.min_threshold_gap(), Rational(1));
}

TEST(Cumulative, SixGroupMinimumGap) {
  EXPECT_EQ(testing::six_group().cumulative().min_threshold_gap(), Rational::parse("0.005"));
}

TEST(ValidSizes, LeastCommonDenominator) {
  EXPECT_EQ(valid_sizes(testing::six_group(), 120), (std::vector<std::int64_t>{30, 60, 90, 120}));
  EXPECT_EQ(valid_sizes(testing::three_group(), 25), (std::vector<std::int64_t>{10, 20}));
  EXPECT_EQ(valid_sizes(testing::anti_single(), 3), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(base_size(testing::seven_group()), 28);
  EXPECT_TRUE(is_valid_size(testing::seven_group(), 56));
  EXPECT_FALSE(is_valid_size(testing::seven_group(), 30));
  EXPECT_FALSE(is_valid_size(testing::seven_group(), 0));
}

TEST(Preference, WorkedCases) {
  const auto coord = testing::coord_only();
  EXPECT_EQ(preferred_strategy(coord, 0, Rational::parse("0.7"), Strategy::B, 10, TieRule::PreferA), Preference::A);
  // An A-player only stays when the others alone reach the threshold.
  EXPECT_EQ(preferred_strategy(coord, 0, Rational::parse("0.5"), Strategy::A, 10, TieRule::PreferA), Preference::B);
  EXPECT_EQ(preferred_strategy(coord, 0, Rational::parse("0.6"), Strategy::A, 10, TieRule::PreferA), Preference::A);

  const auto six = testing::six_group();
  EXPECT_EQ(preferred_strategy(six, 0, Rational::parse("0.9"), Strategy::A, 30, TieRule::PreferA), Preference::A);
  EXPECT_EQ(preferred_strategy(six, 0, Rational::parse("0.9"), Strategy::B, 30, TieRule::PreferA), Preference::B);
}

TEST(Preference, TieRules) {
  const auto coord = testing::coord_only();
  const Rational half(1, 2);
  EXPECT_EQ(preferred_strategy(coord, 0, half, Strategy::B, 10, TieRule::PreferA), Preference::A);
  EXPECT_EQ(preferred_strategy(coord, 0, half, Strategy::B, 10, TieRule::PreferB), Preference::B);
  EXPECT_EQ(preferred_strategy(coord, 0, half, Strategy::B, 10, TieRule::UniformRandom), Preference::Coin);
  EXPECT_EQ(preferred_strategy(coord, 0, half, Strategy::A, 10, TieRule::SelfInclusivePreferA), Preference::A);

  const auto anti = testing::anti_single();
  const Rational tie_up = Rational::parse("0.6") + Rational(1, 10);
  EXPECT_EQ(preferred_strategy(anti, 0, tie_up, Strategy::A, 10, TieRule::PreferA), Preference::A);
  EXPECT_EQ(preferred_strategy(anti, 0, tie_up, Strategy::A, 10, TieRule::PreferB), Preference::B);
  EXPECT_EQ(preferred_strategy(anti, 0, tie_up, Strategy::A, 10, TieRule::UniformRandom), Preference::Coin);
  EXPECT_EQ(preferred_strategy(anti, 0, tie_up, Strategy::A, 10, TieRule::SelfInclusivePreferA), Preference::B);
}

TEST(Preference, RejectsBadArguments) {
  const auto profile = testing::three_group();
  EXPECT_EQ(code_of([&] { (void)preferred_strategy(profile, 3, Rational(1, 2), Strategy::A, 10, TieRule::PreferA); }),
            ErrorCode::IndexOutOfRange);
}

TEST(TieRuleNames, RoundTrip) {
  for (const auto tie : {TieRule::PreferA, TieRule::PreferB, TieRule::UniformRandom, TieRule::SelfInclusivePreferA}) {
    EXPECT_EQ(parse_tie_rule(to_string(tie)), tie);
  }
  EXPECT_EQ(code_of([] { (void)parse_tie_rule("sometimes"); }), ErrorCode::InvalidArgument);
}

TEST(ErrorMessages, NameTheCondition) {
  const Error e(ErrorCode::StateSpaceTooLarge, "too many");
  EXPECT_EQ(std::string(e.what()), "StateSpaceTooLarge: too many");
}

}  // namespace
}  // namespace popdyn
