#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fadingnet/scaling.hpp"

namespace fn = fadingnet;

namespace {

// Direct Rayleigh evaluation with mu = 1, q = e^{-t}.
double rayleigh_curve(double n, double t) {
  const double nq = n * std::exp(-t);
  return nq * std::log(1.0 + t / nq);
}

// Dense uniform scan, independent of the library's grid + golden-section search.
template <typename F>
double dense_argmax(const F& f, double lo, double hi, int points) {
  double best_x = lo;
  double best = -INFINITY;
  for (int i = 0; i <= points; ++i) {
    const double x = lo + (hi - lo) * i / points;
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace

TEST(AnalyticSumRate, RayleighExamples) {
  const auto r = fn::FadingModel::rayleigh();
  EXPECT_NEAR(fn::analytic_sum_rate(std::exp(10.0), 10.0, r), std::log(11.0), 1e-12);
  EXPECT_NEAR(std::log(11.0), 2.397895, 1e-6);
  EXPECT_EQ(fn::analytic_sum_rate(1e4, 0.0, r), 0.0);
}

TEST(AnalyticSumRate, MatchesDirectRayleighFormulaAtOptimum) {
  const auto r = fn::FadingModel::rayleigh();
  const double t = fn::optimize_threshold(1e5, r).t_star;
  const double direct = rayleigh_curve(1e5, t);
  EXPECT_NEAR(fn::analytic_sum_rate(1e5, t, r), direct, 1e-12 * direct);
}

TEST(AnalyticSumRate, VanishesDeepInTheTail) {
  const auto r = fn::FadingModel::rayleigh();
  EXPECT_LT(fn::analytic_sum_rate(100.0, 200.0, r), 1e-60);
  const auto l = fn::FadingModel::lognormal(0.0, 1.0);
  EXPECT_GE(fn::analytic_sum_rate(std::exp(50.0), std::exp(40.0), l), 0.0);
  EXPECT_TRUE(std::isfinite(fn::analytic_sum_rate(std::exp(50.0), std::exp(40.0), l)));
}

TEST(AnalyticSumRate, Preconditions) {
  const auto r = fn::FadingModel::rayleigh();
  EXPECT_THROW(fn::analytic_sum_rate(0.5, 1.0, r), std::invalid_argument);
  EXPECT_THROW(fn::analytic_sum_rate(10.0, -1.0, r), std::invalid_argument);
}

TEST(Theorem1Bound, BelowSlackFreeCurve) {
  const auto r = fn::FadingModel::rayleigh();
  for (double n : {1e3, 1e4, 1e6}) {
    for (double t : {1.0, 3.0, 5.0}) {
      EXPECT_LT(fn::theorem1_bound(n, t, r), fn::analytic_sum_rate(n, t, r));
    }
  }
}

TEST(Theorem1Bound, RatioApproachesOneAsNGrows) {
  const auto r = fn::FadingModel::rayleigh();
  for (const fn::SlackFunctions& slack : {fn::SlackFunctions{}, fn::SlackFunctions(0.05, 0.05)}) {
    double previous = 0.0;
    for (double n : {1e3, 1e5, 1e7}) {
      const double t = fn::optimize_threshold(n, r).t_star;
      const double ratio = fn::theorem1_bound(n, t, r, slack) / fn::analytic_sum_rate(n, t, r);
      EXPECT_GT(ratio, previous);
      EXPECT_LT(ratio, 1.0);
      previous = ratio;
    }
  }
}

TEST(Theorem1Bound, NonPositiveEffectiveCountIsAnError) {
  EXPECT_THROW(fn::theorem1_bound_with_xi(100.0, 0.0, fn::FadingModel::rayleigh(), 10.0), std::invalid_argument);
}

TEST(SlackObjective, IncreasingForSquareRootPsi) {
  EXPECT_TRUE(fn::slack_objective_increasing(0.5, 1.0, 10.0, 1.0, 1e6));
}

TEST(OptimizeThreshold, RayleighMatchesDenseScan) {
  const auto r = fn::FadingModel::rayleigh();
  for (double logn : {10.0, 20.0, 30.0}) {
    const double n = std::exp(logn);
    const double oracle = dense_argmax([&](double t) { return rayleigh_curve(n, t); }, 0.0, logn + 10.0, 400000);
    const auto best = fn::optimize_threshold(n, r);
    EXPECT_NEAR(best.t_star, oracle, 1e-3) << "log n = " << logn;
    EXPECT_NEAR(best.R_star, rayleigh_curve(n, oracle), 1e-9 * best.R_star);
  }
}

TEST(OptimizeThreshold, GapToClosedFormShrinks) {
  double previous = INFINITY;
  for (double logn : {10.0, 20.0, 30.0}) {
    const double n = std::exp(logn);
    const double gap = std::abs(fn::optimize_threshold(n, fn::FadingModel::rayleigh()).t_star -
                                fn::rayleigh_predictions(n).t_star);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
}

TEST(OptimizeThreshold, ClosedFormValueAtE20) {
  EXPECT_NEAR(fn::rayleigh_predictions(std::exp(20.0)).t_star, 14.701682, 1e-6);
  EXPECT_NEAR(fn::rayleigh_predictions(std::exp(30.0)).t_star, 23.890752, 1e-6);
}

TEST(OptimizeThreshold, LognormalMatchesDenseScan) {
  const auto model = fn::FadingModel::lognormal(0.5, 1.0);
  const double n = 1e6;
  const double u_oracle = dense_argmax([&](double u) { return fn::analytic_sum_rate(n, std::exp(0.5 + u), model); },
                                       0.0, std::log(n) + 10.0, 400000);
  const auto best = fn::optimize_threshold(n, model);
  EXPECT_NEAR(std::log(best.t_star) - 0.5, u_oracle, 1e-3);
}

TEST(OptimizeThreshold, SmallNRejected) {
  EXPECT_THROW(fn::optimize_threshold(1.0, fn::FadingModel::rayleigh()), std::invalid_argument);
}

TEST(Predictions, Rayleigh) {
  const auto p = fn::rayleigh_predictions(1e5);
  const double l = std::log(1e5);
  EXPECT_NEAR(p.k_pred, 0.5 * l * l, 1e-12);
  EXPECT_NEAR(p.k_pred, 66.2737, 1e-4);
  EXPECT_NEAR(p.lambda_pred, 2.0 / l, 1e-15);
  EXPECT_NEAR(p.R_star, l - 2.0 * std::log(l), 1e-12);
}

TEST(Predictions, LognormalThresholdAndConstants) {
  const auto p = fn::lognormal_predictions(std::exp(50.0), 0.3, 1.0);
  EXPECT_NEAR(p.t_star, std::exp(0.3 - 1.0) * std::exp(10.0), 1e-9 * p.t_star);
  EXPECT_NEAR(p.B, std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(p.u, 9.0, 1e-12);
}

TEST(LognormalUForm, MatchesTailApproximatedCurve) {
  for (double s : {0.5, 1.0, 2.0}) {
    for (double m : {-0.7, 0.0, 1.3}) {
      const auto model = fn::FadingModel::lognormal(m, s);
      for (double logn : {5.0, 20.0, 50.0}) {
        for (double u : {0.5, 2.0, 5.0, 9.0}) {
          const double n = std::exp(logn);
          const double a = fn::lognormal_sum_rate_u(n, u, s);
          const double b = fn::analytic_sum_rate_tail_approx(n, std::exp(m + u), model);
          ASSERT_NEAR(a, b, 1e-9 * std::abs(b)) << "S=" << s << " M=" << m << " log n=" << logn << " u=" << u;
        }
      }
    }
  }
}

TEST(LognormalUForm, Preconditions) {
  EXPECT_THROW(fn::lognormal_sum_rate_u(100.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(fn::lognormal_constant_b(0.0), std::invalid_argument);
}

TEST(Regimes, LogNActiveLinks) {
  const double n = std::exp(40.0);
  const auto r = fn::regime_classify(n, 40.0);
  EXPECT_EQ(r.label, fn::Regime::AlphaLog);
  EXPECT_NEAR(r.predicted_sum_rate / 40.0, std::numbers::ln2, 1e-12);
}

TEST(Regimes, SquareRootActiveLinks) {
  const double n = std::exp(40.0);
  const auto r = fn::regime_classify(n, std::ceil(std::sqrt(n)));
  EXPECT_EQ(r.label, fn::Regime::PowerLaw);
  EXPECT_NEAR(r.predicted_sum_rate / 40.0, 0.5, 1e-6);
}

TEST(Regimes, LogSquaredActiveLinks) {
  const double n = std::exp(40.0);
  const auto r = fn::regime_classify(n, 1600.0);
  EXPECT_EQ(r.label, fn::Regime::MidRange);
  EXPECT_DOUBLE_EQ(r.predicted_sum_rate, 40.0);
}

TEST(Regimes, ExtremesAndValidation) {
  const double n = std::exp(40.0);
  EXPECT_EQ(fn::regime_classify(n, 2.0).label, fn::Regime::SubLog);
  EXPECT_EQ(fn::regime_classify(n, n / 40.0).label, fn::Regime::NearLinear);
  EXPECT_THROW(fn::regime_classify(n, 0.5), std::invalid_argument);
  EXPECT_THROW(fn::regime_classify(1.0, 1.0), std::invalid_argument);
}

TEST(Regimes, PredictionNeverExceedsLogN) {
  const double n = std::exp(40.0);
  for (double k = 1.0; k <= n; k *= 1.7) {
    EXPECT_LE(fn::regime_classify(n, k).predicted_sum_rate, 40.0 * (1.0 + 1e-12)) << k;
  }
}

TEST(Tradeoff, DecentralizedExamples) {
  EXPECT_NEAR(fn::tradeoff_decentralized(1.0), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(fn::tradeoff_decentralized(1.0 / (std::numbers::e - 1.0)), 1.0, 1e-14);
  const double l100 = fn::tradeoff_decentralized(100.0);
  EXPECT_NEAR(l100, 0.00995, 1e-5);
  EXPECT_LT(100.0 * l100, 1.0);
  EXPECT_NEAR(100.0 * l100, 0.995, 1e-3);
  EXPECT_THROW(fn::tradeoff_decentralized(0.0), std::invalid_argument);
}

TEST(Tradeoff, InverseRoundTrip) {
  for (double kappa : {1e-3, 0.1, 1.0, 7.0, 100.0}) {
    EXPECT_NEAR(fn::decentralized_kappa_at(fn::tradeoff_decentralized(kappa)), kappa, 1e-10 * kappa);
  }
}

TEST(Tradeoff, ProductIncreasesTowardOne) {
  double previous = 0.0;
  for (double kappa : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double v = kappa * fn::tradeoff_decentralized(kappa);
    EXPECT_GT(v, previous);
    EXPECT_LT(v, 1.0);
    previous = v;
  }
}
