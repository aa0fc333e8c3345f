#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fadingnet/centralized.hpp"

namespace fn = fadingnet;

namespace {

// Sum-rate coefficient written out directly from the Rayleigh formulas.
double coefficient_oracle(double alpha, double delta) {
  const double edge = 1.0 - std::exp(-delta);
  const double kappa = -alpha / std::log(edge);
  const double cond = 1.0 - delta * std::exp(-delta) / edge;
  const double lambda = std::log(1.0 - (1.0 - alpha) * std::log(edge) / (alpha * cond));
  return kappa * lambda;
}

std::vector<std::size_t> all_links(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i;
  }
  return v;
}

}  // namespace

TEST(CentralizedConfig, ThresholdAndValidation) {
  const fn::CentralizedConfig c(1e4, 0.5, 0.4);
  EXPECT_NEAR(c.threshold(), 0.5 * std::log(1e4), 1e-12);
  EXPECT_THROW(fn::CentralizedConfig(1e4, 0.0, 0.4), std::invalid_argument);
  EXPECT_THROW(fn::CentralizedConfig(1e4, 1.0, 0.4), std::invalid_argument);
  EXPECT_THROW(fn::CentralizedConfig(1e4, 0.5, 0.0), std::invalid_argument);
}

TEST(CandidatePool, AlphaNearOneTakesEveryLink) {
  const auto g = fn::sample_channel_matrix(50, fn::FadingModel::rayleigh(), fn::Seed{1, 1});
  EXPECT_EQ(fn::candidate_pool(g, 50.0, 1.0 - 1e-12).size(), 50u);
}

TEST(CandidatePool, EmptyWhenAllDirectGainsAreLow) {
  fn::ChannelMatrix g(3, {0.1, 5.0, 5.0, 5.0, 0.2, 5.0, 5.0, 5.0, 0.3});
  EXPECT_TRUE(fn::candidate_pool(g, 1e6, 0.5).empty());
}

TEST(CandidatePool, StrictThreshold) {
  const double t = 0.5 * std::log(100.0);
  fn::ChannelMatrix g(2, {t, 0.0, 0.0, t + 1e-9});
  EXPECT_EQ(fn::candidate_pool(g, 100.0, 0.5), (std::vector<std::size_t>{1}));
}

TEST(BuildGraph, LargeDeltaIsComplete) {
  const auto g = fn::sample_channel_matrix(20, fn::FadingModel::rayleigh(), fn::Seed{2, 2});
  const auto pool = all_links(20);
  EXPECT_EQ(fn::build_graph(g, std::span<const std::size_t>(pool), 1e6).edge_count(), 190u);
}

TEST(BuildGraph, TinyDeltaIsEdgeless) {
  const auto g = fn::sample_channel_matrix(20, fn::FadingModel::rayleigh(), fn::Seed{2, 2});
  const auto pool = all_links(20);
  EXPECT_EQ(fn::build_graph(g, std::span<const std::size_t>(pool), 1e-300).edge_count(), 0u);
}

TEST(BuildGraph, BothCrossGainsMustBeSmall) {
  // Only the pair (0, 2) has both directions <= 1.
  fn::ChannelMatrix g(3, {9.0, 0.5, 0.3,  //
                          2.0, 9.0, 0.4,  //
                          0.6, 3.0, 9.0});
  const auto pool = all_links(3);
  const auto graph = fn::build_graph(g, std::span<const std::size_t>(pool), 1.0);
  EXPECT_EQ(graph.edge_count(), 1u);
  EXPECT_TRUE(graph.adjacent(0, 2));
  EXPECT_TRUE(fn::is_well_formed(graph));
  EXPECT_NEAR(graph.pi, fn::edge_probability(1.0), 1e-15);
}

TEST(BuildGraph, CapIsInclusive) {
  fn::ChannelMatrix g(2, {9.0, 1.0, 1.0, 9.0});
  const auto pool = all_links(2);
  EXPECT_EQ(fn::build_graph(g, std::span<const std::size_t>(pool), 1.0).edge_count(), 1u);
}

TEST(EdgeProbability, Examples) {
  EXPECT_EQ(fn::edge_probability(0.0), 0.0);
  EXPECT_NEAR(fn::edge_probability(std::numbers::ln2), 0.25, 1e-15);
  EXPECT_THROW(fn::edge_probability(fn::FadingModel::lognormal(0.0, 1.0), 1.0), std::invalid_argument);
  EXPECT_THROW(fn::edge_probability(-1.0), std::invalid_argument);
}

TEST(EdgeProbability, EmpiricalFrequencyInBuiltGraph) {
  // 448 candidates give 100128 unordered pairs, each reading two distinct gains.
  const std::size_t m = 448;
  const fn::LazyChannel ch(m, fn::FadingModel::rayleigh(), fn::Seed{2718, 0});
  const auto pool = all_links(m);
  const auto graph = fn::build_graph(ch, std::span<const std::size_t>(pool), 1.0);
  const double pairs = m * (m - 1) / 2.0;
  const double freq = graph.edge_count() / pairs;
  EXPECT_NEAR(freq, std::pow(1.0 - std::exp(-1.0), 2.0), 0.005);
  EXPECT_NEAR(std::pow(1.0 - std::exp(-1.0), 2.0), 0.39958, 1e-5);
}

TEST(Strategy2, ActiveSetIsAMaximumCliqueOfThePool) {
  const std::size_t n = 2000;
  const fn::LazyChannel ch(n, fn::FadingModel::rayleigh(), fn::Seed{77, 1});
  const fn::NetworkParams params(n);
  const fn::CentralizedConfig config(n, 0.5, 0.4);
  const auto out = fn::strategy2_run(ch, n, config, fn::CliqueSolver::Exact, fn::Seed{1, 1}, params);
  EXPECT_EQ(out.power.active_indices(), out.clique.members);
  EXPECT_TRUE(fn::is_clique(out.graph, out.clique.members));
  for (std::size_t i : out.clique.members) {
    EXPECT_GT(ch.gain(i, i), config.threshold());
  }
}

TEST(Strategy2, HugeDeltaActivatesWholePool) {
  const std::size_t n = 3000;
  const fn::LazyChannel ch(n, fn::FadingModel::rayleigh(), fn::Seed{78, 1});
  const fn::CentralizedConfig config(n, 0.4, 1e9);
  const auto out = fn::strategy2_run(ch, n, config, fn::CliqueSolver::Auto, fn::Seed{1, 1}, fn::NetworkParams(n));
  EXPECT_EQ(out.clique.members, out.pool);
}

TEST(Strategy2, TinyDeltaActivatesAtMostOneLink) {
  const std::size_t n = 3000;
  const fn::LazyChannel ch(n, fn::FadingModel::rayleigh(), fn::Seed{79, 1});
  const fn::CentralizedConfig config(n, 0.5, 1e-300);
  const auto p = fn::strategy2_select(ch, n, config, fn::CliqueSolver::Auto, fn::Seed{1, 1}, fn::NetworkParams(n));
  EXPECT_LE(p.active_count(), 1u);
}

TEST(Strategy2, EveryActiveLinkMeetsTheRateFloor) {
  const std::size_t n = 5000;
  const double delta = 0.5;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const fn::LazyChannel ch(n, fn::FadingModel::rayleigh(), fn::Seed{80, s});
    const fn::NetworkParams params(n);
    const fn::CentralizedConfig config(n, 0.5, delta);
    const auto out = fn::strategy2_run(ch, n, config, fn::CliqueSolver::Auto, fn::Seed{81, s}, params);
    const auto report = fn::evaluate_active(ch, std::span<const std::size_t>(out.clique.members), params);
    const double floor = fn::strategy2_rate_floor(config.threshold(), params.rho(), out.clique.size, delta);
    for (double r : report.rates) {
      ASSERT_GE(r, floor);
    }
  }
}

TEST(SolveClique, AutoSwitchesToGreedyAboveCap) {
  const auto big = fn::random_graph(200, 0.2, fn::Seed{3, 3});
  EXPECT_EQ(fn::solve_clique(big, fn::CliqueSolver::Auto, fn::Seed{4, 4}).method, fn::CliqueMethod::Greedy);
  const auto small = fn::random_graph(100, 0.2, fn::Seed{3, 3});
  EXPECT_EQ(fn::solve_clique(small, fn::CliqueSolver::Auto, fn::Seed{4, 4}).method, fn::CliqueMethod::Exact);
}

TEST(CentralizedPredictions, HandEvaluatedAtLogTwo) {
  const auto p = fn::centralized_predictions(0.5, std::numbers::ln2);
  EXPECT_NEAR(p.kappa, 0.5 / std::numbers::ln2, 1e-14);
  EXPECT_NEAR(p.kappa, 0.721348, 1e-6);
  const double lambda = std::log(1.0 + std::numbers::ln2 / (1.0 - std::numbers::ln2));
  EXPECT_NEAR(p.lambda, lambda, 1e-13);
  EXPECT_NEAR(p.lambda, 1.181385, 5e-6);
  EXPECT_NEAR(p.coefficient, p.kappa * p.lambda, 1e-15);
}

TEST(CentralizedPredictions, MatchesDirectFormulas) {
  for (double alpha : {0.1, 0.5, 0.9}) {
    for (double delta : {0.01, 0.3, 2.0}) {
      EXPECT_NEAR(fn::centralized_predictions(alpha, delta).coefficient, coefficient_oracle(alpha, delta),
                  1e-11 * coefficient_oracle(alpha, delta));
    }
  }
  EXPECT_THROW(fn::centralized_predictions(0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(fn::centralized_predictions(1.0, 0.5), std::invalid_argument);
}

TEST(OptimizeDelta, MatchesDenseScan) {
  for (double alpha : {0.2, 0.5, 0.8}) {
    double best_delta = 0.0;
    double best = -INFINITY;
    for (int i = 0; i <= 200000; ++i) {
      const double d = std::exp(std::log(1e-6) + (std::log(20.0) - std::log(1e-6)) * i / 200000.0);
      const double v = coefficient_oracle(alpha, d);
      if (v > best) {
        best = v;
        best_delta = d;
      }
    }
    const auto opt = fn::optimize_delta(alpha);
    EXPECT_NEAR(opt.delta_star / best_delta, 1.0, 1e-3) << "alpha " << alpha;
    EXPECT_GE(opt.prediction.coefficient, best * (1.0 - 1e-12));
  }
}

TEST(OptimizeDelta, KnownOptimumAtHalf) {
  const auto opt = fn::optimize_delta(0.5);
  EXPECT_NEAR(opt.delta_star, 0.3957, 1e-3);
  EXPECT_NEAR(opt.prediction.coefficient, 0.8732, 1e-3);
}

TEST(OptimizeDelta, BoundaryOptimumIsReported) {
  EXPECT_THROW(fn::optimize_delta(0.02), fn::OptimizationError);
}

TEST(TradeoffCentralized, SortedMonotoneAndWarns) {
  const auto curve = fn::tradeoff_centralized();
  ASSERT_GE(curve.points.size(), 40u);
  EXPECT_FALSE(curve.warnings.empty());
  EXPECT_EQ(curve.points.size() + curve.warnings.size(), 64u);
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    EXPECT_GT(curve.points[i].kappa, curve.points[i - 1].kappa);
    EXPECT_LT(curve.points[i].lambda, curve.points[i - 1].lambda);
  }
}

TEST(TradeoffCentralized, DominatesDecentralizedAtHighRate) {
  for (const auto& pt : fn::tradeoff_centralized().points) {
    if (pt.lambda >= 1.0) {
      EXPECT_GT(pt.kappa, fn::decentralized_kappa_at(pt.lambda));
    }
  }
}

TEST(TradeoffDecentralizedCurve, GridAndIdentity) {
  const auto pts = fn::tradeoff_decentralized_curve();
  ASSERT_EQ(pts.size(), 64u);
  EXPECT_NEAR(pts.front().kappa, 1e-3, 1e-15);
  EXPECT_NEAR(pts.back().kappa, 1e2, 1e-10);
  for (const auto& p : pts) {
    EXPECT_NEAR(p.lambda, std::log(1.0 + 1.0 / p.kappa), 1e-12);
  }
}
