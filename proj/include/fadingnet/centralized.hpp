#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fadingnet/fading.hpp"
#include "fadingnet/graph.hpp"
#include "fadingnet/network.hpp"
#include "fadingnet/numeric.hpp"
#include "fadingnet/scaling.hpp"

namespace fadingnet {

/// Candidate-pool exponent alpha, cross-gain cap delta, and the derived
/// direct-gain threshold t = (1 - alpha) log n.
class CentralizedConfig {
 public:
  CentralizedConfig(double n, double alpha, double delta) : alpha_(alpha), delta_(delta) {
    if (!(n >= 1.0)) {
      throw std::invalid_argument("CentralizedConfig: n must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("CentralizedConfig: alpha must lie in (0, 1)");
    }
    if (!(delta > 0.0)) {
      throw std::invalid_argument("CentralizedConfig: delta must be positive");
    }
    threshold_ = (1.0 - alpha) * std::log(n);
  }

  double alpha() const noexcept { return alpha_; }
  double delta() const noexcept { return delta_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double alpha_;
  double delta_;
  double threshold_ = 0.0;
};

/// Links whose direct gain exceeds (1 - alpha) log n, ascending.
template <GainSource Source>
std::vector<std::size_t> candidate_pool(const Source& gains, double n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("candidate_pool: alpha must lie in (0, 1)");
  }
  const double t = (1.0 - alpha) * std::log(n);
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (gains.gain(i, i) > t) {
      pool.push_back(i);
    }
  }
  return pool;
}

/// pi = (1 - e^{-delta})^2; only derived for Rayleigh fading.
inline double edge_probability(const FadingModel& model, double delta) {
  if (!model.is_rayleigh()) {
    throw std::invalid_argument("edge_probability: closed form is only available for Rayleigh fading");
  }
  if (!(delta >= 0.0)) {
    throw std::invalid_argument("edge_probability: delta must be nonnegative");
  }
  const double f = -std::expm1(-delta);
  return f * f;
}

inline double edge_probability(double delta) { return edge_probability(FadingModel::rayleigh(), delta); }

/// Edge between candidates i and j iff g_ij <= delta and g_ji <= delta.
template <GainSource Source>
InterferenceGraph build_graph(const Source& gains, std::span<const std::size_t> pool, double delta,
                              const FadingModel& model = FadingModel::rayleigh()) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("build_graph: delta must be positive");
  }
  InterferenceGraph g(std::vector<std::size_t>(pool.begin(), pool.end()));
  const std::size_t m = g.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (gains.gain(pool[a], pool[b]) <= delta && gains.gain(pool[b], pool[a]) <= delta) {
        g.connect(a, b);
      }
    }
  }
#ifdef FADINGNET_FAULT_INJECT_GRAPH_ASYMMETRY
  if (m >= 2) {
    g.adjacency[1] = static_cast<std::uint8_t>(1 - g.adjacency[1]);
  }
#endif
  if (model.is_rayleigh()) {
    g.pi = edge_probability(model, delta);
  } else {
    const double f = 1.0 - tail_probability(model, delta);
    g.pi = f * f;
  }
  return g;
}

enum class CliqueSolver { Auto, Exact, Greedy };

inline constexpr std::size_t kGreedyRestarts = 64;

/// Exact below the cap, greedy with 64 restarts above it.
inline CliqueResult solve_clique(const InterferenceGraph& g, CliqueSolver solver, const Seed& seed) {
  switch (solver) {
    case CliqueSolver::Exact: return max_clique_exact(g);
    case CliqueSolver::Greedy: return max_clique_greedy(g, kGreedyRestarts, seed);
    case CliqueSolver::Auto: break;
  }
  if (g.size() <= kExactCliqueCap) {
    return max_clique_exact(g);
  }
  return max_clique_greedy(g, kGreedyRestarts, seed);
}

struct Strategy2Outcome {
  std::vector<std::size_t> pool;
  InterferenceGraph graph;
  CliqueResult clique;
  PowerVector power;
};

/// Centralized selection: filter by direct gain, connect candidates whose
/// mutual cross gains are both <= delta, activate a largest clique.
template <GainSource Source>
Strategy2Outcome strategy2_run(const Source& gains, double n, const CentralizedConfig& config, CliqueSolver solver,
                               const Seed& seed, const NetworkParams& params) {
  if (params.n() != gains.size()) {
    throw std::invalid_argument("strategy2_select: shape mismatch");
  }
  std::vector<std::size_t> pool = candidate_pool(gains, n, config.alpha());
  InterferenceGraph graph = build_graph(gains, std::span<const std::size_t>(pool), config.delta());
  CliqueResult clique = solve_clique(graph, solver, seed);
  PowerVector power(gains.size(), params.power());
  for (std::size_t link : clique.members) {
    power.activate(link);
  }
  return {std::move(pool), std::move(graph), std::move(clique), std::move(power)};
}

template <GainSource Source>
PowerVector strategy2_select(const Source& gains, double n, const CentralizedConfig& config, CliqueSolver solver,
                             const Seed& seed, const NetworkParams& params) {
  return strategy2_run(gains, n, config, solver, seed, params).power;
}

/// Per-link rate floor of a Strategy-2 clique of size k_hat: every in-clique
/// cross gain is <= delta and every direct gain > t.
inline double strategy2_rate_floor(double threshold, double rho, std::size_t clique_size, double delta) {
  const double interference = clique_size > 0 ? static_cast<double>(clique_size - 1) * delta : 0.0;
  return std::log1p(threshold / (rho + interference));
}

/// Asymptotic scaling factors of the centralized scheme (Rayleigh):
///   kappa_c = -alpha / log(1 - e^{-delta}),
///   lambda_c = log(1 - (1 - alpha) log(1 - e^{-delta}) / (alpha E[g | g <= delta])),
///   coefficient = kappa_c lambda_c  (sum-rate / log n).
struct CentralizedPrediction {
  double kappa = 0.0;
  double lambda = 0.0;
  double coefficient = 0.0;
};

inline CentralizedPrediction centralized_predictions(double alpha, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("centralized_predictions: alpha must lie in (0, 1)");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("centralized_predictions: delta must be positive and finite");
  }
  const double log_edge = std::log(-std::expm1(-delta));  // log(1 - e^{-delta}) < 0
  const double conditional_mean = conditional_mean_below(FadingModel::rayleigh(), delta);
  CentralizedPrediction p;
  p.kappa = -alpha / log_edge;
  p.lambda = std::log1p(-(1.0 - alpha) * log_edge / (alpha * conditional_mean));
  p.coefficient = p.kappa * p.lambda;
  return p;
}

struct DeltaSearch {
  /// The grid is log-spaced over [lower, upper].
  double lower = 1e-9;
  double upper = 20.0;
  std::size_t points = 10000;
  double tolerance = 1e-4;
};

struct DeltaOptimum {
  double delta_star = 0.0;
  CentralizedPrediction prediction;
};

/// Maximizes the sum-rate coefficient over delta: log-spaced grid, then
/// golden-section in log delta until the delta bracket is below
/// tolerance * min(1, delta).
inline DeltaOptimum optimize_delta(double alpha, const DeltaSearch& search = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("optimize_delta: alpha must lie in (0, 1)");
  }
  const double lo = std::log(search.lower);
  const double hi = std::log(search.upper);
  auto f = [alpha](double log_delta) { return centralized_predictions(alpha, std::exp(log_delta)).coefficient; };
  auto to_delta = [](double x) { return std::exp(x); };
  const numeric::GridMaximum coarse = numeric::grid_maximize(f, lo, hi, search.points);
  const double native_tol = search.tolerance * std::min(1.0, std::exp(coarse.x));
  const auto best = numeric::bracketed_maximize(f, lo, hi, search.points, native_tol, to_delta,
                                                "optimize_delta(alpha=" + std::to_string(alpha) + ")");
  const double delta = to_delta(best.x);
  return {delta, centralized_predictions(alpha, delta)};
}

struct TradeoffPoint {
  double alpha = 0.0;
  double delta_star = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  std::vector<std::string> warnings;
};

/// 64 log-spaced alphas in [0.02, 0.98].
inline std::vector<double> default_alpha_grid(std::size_t count = 64, double lo = 0.02, double hi = 0.98) {
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double frac = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    grid[i] = lo * std::pow(hi / lo, frac);
  }
  return grid;
}

/// Centralized (kappa, lambda) frontier at the optimal delta for each alpha,
/// sorted by kappa. Alphas whose optimum is not bracketed are skipped with a
/// warning.
inline TradeoffCurve tradeoff_centralized(std::span<const double> alphas, const DeltaSearch& search = {}) {
  TradeoffCurve curve;
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("tradeoff_centralized: alpha grid must lie inside (0, 1)");
    }
    try {
      const DeltaOptimum best = optimize_delta(alpha, search);
      curve.points.push_back({alpha, best.delta_star, best.prediction.kappa, best.prediction.lambda});
    } catch (const OptimizationError& e) {
      curve.warnings.emplace_back(e.what());
    }
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const TradeoffPoint& a, const TradeoffPoint& b) { return a.kappa < b.kappa; });
  return curve;
}

inline TradeoffCurve tradeoff_centralized() {
  const std::vector<double> grid = default_alpha_grid();
  return tradeoff_centralized(std::span<const double>(grid));
}

struct DecentralizedPoint {
  double kappa = 0.0;
  double lambda = 0.0;
};

/// lambda = log(1 + 1/kappa) on `count` log-spaced kappas in [lo, hi].
inline std::vector<DecentralizedPoint> tradeoff_decentralized_curve(std::size_t count = 64, double lo = 1e-3,
                                                                    double hi = 1e2) {
  std::vector<DecentralizedPoint> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double frac = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    const double kappa = lo * std::pow(hi / lo, frac);
    out[i] = {kappa, tradeoff_decentralized(kappa)};
  }
  return out;
}

}  // namespace fadingnet
