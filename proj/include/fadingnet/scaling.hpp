#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fadingnet/decentralized.hpp"
#include "fadingnet/fading.hpp"
#include "fadingnet/numeric.hpp"

namespace fadingnet {

/// Optimum threshold and the asymptotic quantities that go with it. `u` and
/// `B` are only meaningful for log-normal fading (NaN otherwise).
struct ScalingPrediction {
  double t_star = 0.0;
  double R_star = 0.0;
  double k_pred = 0.0;
  double lambda_pred = 0.0;
  double u = std::numeric_limits<double>::quiet_NaN();
  double B = std::numeric_limits<double>::quiet_NaN();
};

/// Expected sum-rate of threshold activation with the slack terms dropped:
///   R(t) = nq log(1 + t / (mu nq)),  q = 1 - F(t).
/// n may be non-integer (asymptotic sweeps use n = e^x). Tends to 0 as nq -> 0.
inline double analytic_sum_rate(double n, double t, const FadingModel& model) {
  if (!(n >= 1.0)) {
    throw std::invalid_argument("analytic_sum_rate: n must be at least 1");
  }
  if (!(t >= 0.0)) {
    throw std::invalid_argument("analytic_sum_rate: t must be nonnegative");
  }
  const double log_nq = std::log(n) + log_tail_probability(model, t);
  const double nq = std::exp(log_nq);
  if (nq == 0.0) {
    return 0.0;
  }
  const double ratio = t / (model.mean() * nq);
  if (std::isfinite(ratio)) {
    return nq * std::log1p(ratio);
  }
  return nq * (std::log(t) - std::log(model.mean()) - log_nq);
}

/// Same curve with the large-t log-normal tail approximation in place of the
/// exact q.
inline double analytic_sum_rate_tail_approx(double n, double t, const FadingModel& model) {
  const double nq = n * lognormal_tail_approx(model, t);
  if (nq == 0.0) {
    return 0.0;
  }
  return nq * std::log1p(t / (model.mean() * nq));
}

/// Log-normal constant that makes the closed u-form agree with the
/// tail-approximated curve: B = sqrt(2 pi) e^{-S^2/2} / S.
inline double lognormal_constant_b(double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("lognormal_constant_b: S must be positive");
  }
  return std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * scale * scale) / scale;
}

/// The log-normal sum-rate written in u = log t - M:
///   S/(sqrt(2 pi) u) n e^{-u^2/(2S^2)} log(1 + B u e^u e^{u^2/(2S^2)} / n).
inline double lognormal_sum_rate_u(double n, double u, double scale) {
  if (!(u > 0.0)) {
    throw std::invalid_argument("lognormal_sum_rate_u: u must be positive");
  }
  const double b = lognormal_constant_b(scale);
  const double w = u * u / (2.0 * scale * scale);
  const double prefactor = scale / (std::sqrt(2.0 * std::numbers::pi) * u) * n * std::exp(-w);
  return prefactor * std::log1p(b * u * std::exp(u + w) / n);
}

/// High-probability achievable sum-rate with explicit slack:
///   m = nq - xi sqrt(nq),  R = m log(1 + t / (mu m + psi(m))).
inline double theorem1_bound_with_xi(double n, double t, const FadingModel& model, double xi,
                                     double psi_exponent = 0.5) {
  const double nq = n * tail_probability(model, t);
  const double m = nq - xi * std::sqrt(nq);
  if (!(m > 0.0)) {
    throw std::invalid_argument("theorem1_bound: effective active-link count nq - xi sqrt(nq) is not positive");
  }
  const double phi = std::pow(m, psi_exponent);
  return m * std::log1p(t / (model.mean() * m + phi));
}

inline double theorem1_bound(double n, double t, const FadingModel& model, const SlackFunctions& slack = {}) {
  const double nq = n * tail_probability(model, t);
  return theorem1_bound_with_xi(n, t, model, slack.xi(nq), slack.psi_exponent());
}

/// True when m log(1 + c / (mu m + m^b)) is strictly increasing on `points`
/// log-spaced values of m in [m_lo, m_hi].
inline bool slack_objective_increasing(double psi_exponent, double mean, double c, double m_lo, double m_hi,
                                       std::size_t points = 1000) {
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
    const double m = m_lo * std::pow(m_hi / m_lo, frac);
    const double v = m * std::log1p(c / (mean * m + std::pow(m, psi_exponent)));
    if (!(v > previous)) {
      return false;
    }
    previous = v;
  }
  return true;
}

struct ThresholdSearch {
  std::size_t points = 10000;
  double tolerance = 1e-6;
  /// The grid runs to log n + margin (in t for Rayleigh, in u for log-normal).
  double margin = 10.0;
};

struct ThresholdOptimum {
  double t_star = 0.0;
  double R_star = 0.0;
};

/// Maximizes analytic_sum_rate over t: coarse grid, then golden-section
/// refinement to |dt| < tolerance. Rayleigh searches t in [0, log n + margin];
/// log-normal searches u = log t - M in [0, log n + margin].
inline ThresholdOptimum optimize_threshold(double n, const FadingModel& model, const ThresholdSearch& search = {}) {
  if (!(n >= 2.0)) {
    throw std::invalid_argument("optimize_threshold: n must be at least 2");
  }
  const double hi = std::log(n) + search.margin;
  if (model.is_rayleigh()) {
    auto f = [&](double t) { return analytic_sum_rate(n, t, model); };
    const auto best = numeric::bracketed_maximize(f, 0.0, hi, search.points, search.tolerance,
                                                  [](double t) { return t; }, "optimize_threshold");
    return {best.x, best.value};
  }
  const double m = model.location();
  auto to_t = [m](double u) { return std::exp(m + u); };
  auto f = [&](double u) { return analytic_sum_rate(n, to_t(u), model); };
  const auto best = numeric::bracketed_maximize(f, 0.0, hi, search.points, search.tolerance, to_t,
                                                "optimize_threshold");
  return {to_t(best.x), best.value};
}

/// Rayleigh leading-order predictions at the optimum threshold:
///   t* = log n - 2 log log n + log 2,  R* = log n - 2 log log n (O(1) dropped),
///   k = (log n)^2 / 2,  lambda = 2 / log n.
inline ScalingPrediction rayleigh_predictions(double n) {
  if (!(n >= 3.0)) {
    throw std::invalid_argument("rayleigh_predictions: n must be at least 3");
  }
  const double l = std::log(n);
  ScalingPrediction p;
  p.t_star = l - 2.0 * std::log(l) + std::numbers::ln2;
  p.R_star = l - 2.0 * std::log(l);
  p.k_pred = 0.5 * l * l;
  p.lambda_pred = 2.0 / l;
  return p;
}

/// Log-normal leading-order predictions (M = location, S = scale).
inline ScalingPrediction lognormal_predictions(double n, double location, double scale) {
  if (!(n >= 3.0)) {
    throw std::invalid_argument("lognormal_predictions: n must be at least 3");
  }
  if (!(scale > 0.0)) {
    throw std::invalid_argument("lognormal_predictions: S must be positive");
  }
  const double l = std::log(n);
  const double s2 = scale * scale;
  const double growth = std::exp(scale * std::sqrt(2.0 * l));
  ScalingPrediction p;
  p.t_star = std::exp(location - s2) * growth;
  p.R_star = std::exp(-1.5 * s2) * growth;
  p.k_pred = std::exp(-1.5 * s2) / (std::sqrt(8.0) * scale) * std::sqrt(l) * growth;
  p.lambda_pred = std::sqrt(8.0) * scale / std::sqrt(l);
  p.u = std::log(p.t_star) - location;
  p.B = lognormal_constant_b(scale);
  return p;
}

enum class Regime { SubLog, AlphaLog, MidRange, PowerLaw, NearLinear };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::SubLog: return "SubLog";
    case Regime::AlphaLog: return "AlphaLog";
    case Regime::MidRange: return "MidRange";
    case Regime::PowerLaw: return "PowerLaw";
    case Regime::NearLinear: return "NearLinear";
  }
  return "?";
}

/// Finite-n cutoffs on r1 = k / log n and r2 = log k / log n.
struct RegimeCutoffs {
  double sublog_below = 0.25;
  double alphalog_up_to = 4.0;
  double midrange_r2_below = 0.25;
  double nearlinear_r2_above = 0.9;
};

struct RegimeResult {
  Regime label = Regime::SubLog;
  /// alpha for AlphaLog (= r1) and PowerLaw (= r2); NaN otherwise.
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double predicted_sum_rate = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Places (n, k) in one of the five sum-rate regimes of top-k activation under
/// Rayleigh fading and returns the regime's predicted sum-rate. Rules are
/// applied in order: NearLinear (r2 above cutoff), SubLog, AlphaLog, MidRange,
/// and PowerLaw for whatever remains.
inline RegimeResult regime_classify(double n, double k, const RegimeCutoffs& cutoffs = {}) {
  if (!(n > 1.0)) {
    throw std::invalid_argument("regime_classify: n must exceed 1");
  }
  if (!(k >= 1.0 && k <= n)) {
    throw std::invalid_argument("regime_classify: k must lie in [1, n]");
  }
  const double l = std::log(n);
  RegimeResult out;
  out.r1 = k / l;
  out.r2 = std::log(k) / l;
  // k log(1 + t/k) with t ~ log n - log k.
  const double refined = k * std::log1p((l - std::log(k)) / k);
  if (out.r2 > cutoffs.nearlinear_r2_above) {
    out.label = Regime::NearLinear;
    out.predicted_sum_rate = refined;
  } else if (out.r1 < cutoffs.sublog_below) {
    out.label = Regime::SubLog;
    out.predicted_sum_rate = refined;
  } else if (out.r1 <= cutoffs.alphalog_up_to) {
    out.label = Regime::AlphaLog;
    out.alpha = out.r1;
    out.predicted_sum_rate = out.r1 * std::log1p(1.0 / out.r1) * l;
  } else if (out.r2 < cutoffs.midrange_r2_below) {
    out.label = Regime::MidRange;
    out.predicted_sum_rate = l;
  } else {
    out.label = Regime::PowerLaw;
    out.alpha = out.r2;
    out.predicted_sum_rate = (1.0 - out.r2) * l;
  }
  return out;
}

/// Decentralized rate-per-link at active-count scaling factor kappa:
/// lambda = log(1 + 1/kappa).
inline double tradeoff_decentralized(double kappa) {
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("tradeoff_decentralized: kappa must be positive");
  }
  return std::log1p(1.0 / kappa);
}

/// Inverse of tradeoff_decentralized.
inline double decentralized_kappa_at(double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("decentralized_kappa_at: lambda must be positive");
  }
  return 1.0 / std::expm1(lambda);
}

}  // namespace fadingnet
