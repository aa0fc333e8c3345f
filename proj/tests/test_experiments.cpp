#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fadingnet/experiments.hpp"

namespace fn = fadingnet;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string record_line(const fn::TrialRecord& r) {
  std::ostringstream os;
  fn::PlanResult pr;
  pr.records.push_back(r);
  fn::write_trial_csv(os, std::span<const fn::PlanResult>(&pr, 1));
  return os.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fadingnet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

fn::ExperimentConfig small_strategy1() {
  fn::ExperimentConfig cfg;
  cfg.n = {400};
  cfg.trials = 12;
  cfg.master_seed = 99;
  return cfg;
}

}  // namespace

TEST(Config, ParsesEveryKey) {
  const auto cfg = fn::parse_config_text(
      "# comment\n"
      "scenario = threshold_sweep\n"
      "n = 100, 200\n"
      "model = lognormal   # trailing comment\n"
      "M = 0.5\nS = 1.5\nP = 2\neta = 0.25\n"
      "t = 1.0,2.5\nk = 4\nalpha = 0.3\ndelta = 0.7\n"
      "trials = 17\nmaster_seed = 12345678901\noutput = out.csv\nsolver = greedy\n");
  EXPECT_EQ(cfg.scenario, fn::Scenario::ThresholdSweep);
  EXPECT_EQ(cfg.n, (std::vector<std::uint64_t>{100, 200}));
  EXPECT_EQ(cfg.model, "lognormal");
  EXPECT_DOUBLE_EQ(cfg.M, 0.5);
  EXPECT_DOUBLE_EQ(cfg.S, 1.5);
  EXPECT_DOUBLE_EQ(cfg.P, 2.0);
  EXPECT_DOUBLE_EQ(cfg.eta, 0.25);
  ASSERT_TRUE(cfg.t.has_value());
  EXPECT_EQ(*cfg.t, (std::vector<double>{1.0, 2.5}));
  EXPECT_EQ(cfg.k, 4u);
  EXPECT_DOUBLE_EQ(cfg.alpha, 0.3);
  ASSERT_TRUE(cfg.delta.has_value());
  EXPECT_DOUBLE_EQ(*cfg.delta, 0.7);
  EXPECT_EQ(cfg.trials, 17u);
  EXPECT_EQ(cfg.master_seed, 12345678901ULL);
  EXPECT_EQ(cfg.output, "out.csv");
  EXPECT_EQ(cfg.solver, "greedy");
}

TEST(Config, AutoValuesStayUnresolved) {
  const auto cfg = fn::parse_config_text("t = auto\ndelta = auto\n");
  EXPECT_FALSE(cfg.t.has_value());
  EXPECT_FALSE(cfg.delta.has_value());
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(fn::parse_config_text("bogus = 1\n"), fn::ConfigError);
  EXPECT_THROW(fn::parse_config_text("n = 10\nn = 20\n"), fn::ConfigError);
  EXPECT_THROW(fn::parse_config_text("n 10\n"), fn::ConfigError);
  EXPECT_THROW(fn::parse_config_text("n = ten\n"), fn::ConfigError);
  EXPECT_THROW(fn::parse_config_text("scenario = nope\n"), fn::ConfigError);
  EXPECT_THROW(fn::load_config("/nonexistent/fadingnet.cfg"), fn::ConfigError);
}

TEST(Config, ValidationCatchesBadCombinations) {
  auto cfg = small_strategy1();
  cfg.n = {0};
  EXPECT_THROW(fn::validate(cfg), fn::ConfigError);
  cfg = small_strategy1();
  cfg.scenario = fn::Scenario::Strategy2;
  cfg.model = "lognormal";
  EXPECT_THROW(fn::validate(cfg), fn::ConfigError);
  cfg = small_strategy1();
  cfg.scenario = fn::Scenario::Strategy1TopK;
  cfg.k = 401;
  EXPECT_THROW(fn::validate(cfg), fn::ConfigError);
  cfg = small_strategy1();
  cfg.t = std::vector<double>{-1.0};
  EXPECT_THROW(fn::validate(cfg), fn::ConfigError);
  EXPECT_NO_THROW(fn::validate(small_strategy1()));
}

TEST(Plans, AutoThresholdIsResolved) {
  const auto plans = fn::resolve_plans(small_strategy1());
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_TRUE(plans[0].t_was_auto);
  EXPECT_NEAR(plans[0].t, fn::optimize_threshold(400.0, fn::FadingModel::rayleigh()).t_star, 1e-12);
}

TEST(Plans, SweepIsCrossProduct) {
  auto cfg = small_strategy1();
  cfg.scenario = fn::Scenario::ThresholdSweep;
  cfg.n = {100, 200};
  cfg.t = std::vector<double>{1.0, 2.0, 3.0};
  EXPECT_EQ(fn::resolve_plans(cfg).size(), 6u);
}

TEST(Plans, AutoDeltaIsResolved) {
  auto cfg = small_strategy1();
  cfg.scenario = fn::Scenario::Strategy2;
  const auto plans = fn::resolve_plans(cfg);
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_TRUE(plans[0].delta_was_auto);
  EXPECT_NEAR(plans[0].delta, fn::optimize_delta(0.5).delta_star, 1e-12);
}

TEST(RunTrial, IdenticalInputsGiveIdenticalRecords) {
  for (fn::Scenario s : {fn::Scenario::Strategy1Threshold, fn::Scenario::Strategy1TopK, fn::Scenario::Strategy2}) {
    auto cfg = small_strategy1();
    cfg.scenario = s;
    cfg.k = 5;
    for (std::size_t i : {0u, 3u, 11u}) {
      EXPECT_EQ(record_line(fn::run_trial(cfg, i)), record_line(fn::run_trial(cfg, i))) << fn::to_string(s);
    }
    EXPECT_NE(record_line(fn::run_trial(cfg, 0)), record_line(fn::run_trial(cfg, 1)));
  }
}

TEST(RunTrial, Strategy1RecordIsConsistent) {
  const auto cfg = small_strategy1();
  const auto plan = fn::resolve_plans(cfg).front();
  const auto rec = fn::run_trial(plan, cfg.master_seed, 4);
  const fn::LazyChannel ch(plan.n, plan.model, fn::Seed{cfg.master_seed, 4});
  const auto active = fn::strategy1_active_links(ch, plan.t);
  EXPECT_EQ(rec.k, active.size());
  const auto report = fn::evaluate_active(ch, std::span<const std::size_t>(active), plan.params());
  EXPECT_DOUBLE_EQ(rec.sum_rate, report.sum_rate);
  EXPECT_GE(rec.sum_rate, rec.bound);
  EXPECT_DOUBLE_EQ(rec.prediction, fn::analytic_sum_rate(400.0, plan.t, plan.model));
}

TEST(RunTrial, Strategy2MeetsFloor) {
  auto cfg = small_strategy1();
  cfg.scenario = fn::Scenario::Strategy2;
  cfg.n = {3000};
  for (std::size_t i = 0; i < 5; ++i) {
    const auto rec = fn::run_trial(cfg, i);
    if (rec.k > 0) {
      EXPECT_GE(rec.min_active_rate, rec.rate_floor);
    }
  }
}

TEST(RunTrials, WorkerCountDoesNotChangeRecords) {
  const auto plan = fn::resolve_plans(small_strategy1()).front();
  const auto a = fn::run_trials(plan, 5, 30, 1);
  const auto b = fn::run_trials(plan, 5, 30, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(record_line(a[i]), record_line(b[i]));
  }
}

TEST(Aggregate, SingleTrial) {
  const std::vector<double> v{3.5};
  const auto a = fn::aggregate("x", v);
  EXPECT_EQ(a.mean, 3.5);
  EXPECT_EQ(a.sd, 0.0);
  EXPECT_EQ(a.ci95_halfwidth, 0.0);
  EXPECT_EQ(a.trials, 1u);
}

TEST(Aggregate, KnownValues) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto a = fn::aggregate("x", v);
  EXPECT_DOUBLE_EQ(a.mean, 2.5);
  EXPECT_NEAR(a.sd, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(a.ci95_halfwidth, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Aggregate, ConstantColumnHasZeroSpread) {
  const std::vector<double> v(50, 3.78938034);
  EXPECT_EQ(fn::aggregate("x", v).sd, 0.0);
}

TEST(Format, RealAndExact) {
  EXPECT_EQ(fn::format_real(1.0), "1.00000000e+00");
  EXPECT_EQ(fn::format_real(NAN), "");
  EXPECT_EQ(fn::format_exact(0.1), "0.1");
}

TEST(RunExperiment, WritesBothTablesWithReplayParameters) {
  const auto dir = scratch_dir("write");
  auto cfg = small_strategy1();
  cfg.output = (dir / "r.csv").string();
  const auto result = fn::run_experiment(cfg, 2);
  const std::string trials = slurp(dir / "r.csv");
  const std::string agg = slurp(dir / "r.aggregate.csv");
  EXPECT_EQ(trials.rfind(fn::kTrialHeader, 0), 0u);
  EXPECT_EQ(agg.rfind(fn::kAggregateHeader, 0), 0u);
  EXPECT_NE(agg.find("param.master_seed,99"), std::string::npos);
  EXPECT_NE(agg.find("param.t," + fn::format_exact(result.plans[0].plan.t)), std::string::npos);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 2u);
  std::filesystem::remove_all(dir);
}

TEST(RunExperiment, RepeatedRunsAreByteIdentical) {
  const auto dir = scratch_dir("repeat");
  auto cfg = small_strategy1();
  cfg.output = (dir / "a.csv").string();
  fn::run_experiment(cfg, 1);
  cfg.output = (dir / "b.csv").string();
  fn::run_experiment(cfg, 3);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_EQ(slurp(dir / "a.aggregate.csv"), slurp(dir / "b.aggregate.csv"));
  std::filesystem::remove_all(dir);
}

TEST(RunExperiment, TradeoffScenarioWritesCurves) {
  const auto dir = scratch_dir("tradeoff");
  fn::ExperimentConfig cfg;
  cfg.scenario = fn::Scenario::TradeoffCurves;
  cfg.output = (dir / "t.csv").string();
  const auto result = fn::run_experiment(cfg);
  EXPECT_EQ(result.decentralized_curve.size(), 64u);
  const std::string text = slurp(dir / "t.csv");
  EXPECT_EQ(text.rfind(fn::kTradeoffHeader, 0), 0u);
  EXPECT_NE(text.find("\ndec,"), std::string::npos);
  EXPECT_NE(text.find("\ncent,"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(AtomicFileSet, UncommittedWritesLeaveNothing) {
  const auto dir = scratch_dir("atomic");
  {
    fn::AtomicFileSet files;
    files.add(dir / "x.csv", [](std::ostream& os) { os << "a\n"; });
  }
  EXPECT_TRUE(std::filesystem::is_empty(dir));
  std::filesystem::remove_all(dir);
}

TEST(AggregatePath, SiblingName) {
  EXPECT_EQ(fn::aggregate_path("out/r.csv"), std::filesystem::path("out/r.aggregate.csv"));
  EXPECT_EQ(fn::aggregate_path("r"), std::filesystem::path("r.aggregate.csv"));
}

TEST(Compare, ActiveCountAgainstExpectation) {
  auto cfg = small_strategy1();
  cfg.n = {20000};
  cfg.trials = 100;
  const auto result = fn::run_experiment(cfg);
  const auto report = fn::compare_to_prediction(result.plans[0], fn::PredictionKind::ActiveCountVsExpected,
                                                fn::Band{0.9, 1.1});
  EXPECT_TRUE(report.within_band) << report.ratio;
  EXPECT_NEAR(report.analytic, 20000.0 * std::exp(-result.plans[0].plan.t), 1e-9);
}

TEST(Scenario, NamesRoundTrip) {
  for (fn::Scenario s : {fn::Scenario::Strategy1Threshold, fn::Scenario::Strategy1TopK, fn::Scenario::Strategy2,
                         fn::Scenario::ThresholdSweep, fn::Scenario::NSweep, fn::Scenario::TradeoffCurves}) {
    EXPECT_EQ(fn::parse_scenario(fn::to_string(s)), s);
  }
}
