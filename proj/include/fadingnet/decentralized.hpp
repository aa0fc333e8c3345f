#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "fadingnet/fading.hpp"
#include "fadingnet/network.hpp"

namespace fadingnet {

/// Activation threshold t on direct gains and the matching activation
/// probability q = 1 - F(t).
class ThresholdPolicy {
 public:
  ThresholdPolicy(const FadingModel& model, double threshold)
      : threshold_(threshold), activation_probability_(tail_probability(model, threshold)) {}

  double threshold() const noexcept { return threshold_; }
  double activation_probability() const noexcept { return activation_probability_; }

 private:
  double threshold_;
  double activation_probability_;
};

/// Slack sequences xi(nq) = (nq)^a and psi(m) = m^b used by the
/// high-probability achievable rate. Defaults a = 1/4, b = 1/2.
class SlackFunctions {
 public:
  SlackFunctions() = default;
  SlackFunctions(double xi_exponent, double psi_exponent) : xi_exponent_(xi_exponent), psi_exponent_(psi_exponent) {
    if (!(xi_exponent > 0.0 && xi_exponent < 0.5)) {
      throw std::invalid_argument("SlackFunctions: xi exponent must lie in (0, 1/2)");
    }
    if (!(psi_exponent > 0.0 && psi_exponent < 1.0)) {
      throw std::invalid_argument("SlackFunctions: psi exponent must lie in (0, 1)");
    }
  }

  double xi_exponent() const noexcept { return xi_exponent_; }
  double psi_exponent() const noexcept { return psi_exponent_; }
  double xi(double expected_active) const { return std::pow(expected_active, xi_exponent_); }
  double psi(double m) const { return std::pow(m, psi_exponent_); }

 private:
  double xi_exponent_ = 0.25;
  double psi_exponent_ = 0.5;
};

/// Threshold activation: link i transmits iff g_ii > t. Reads the diagonal
/// only, so each transmitter can decide on its own.
template <GainSource Source>
PowerVector strategy1_activate(const Source& gains, double threshold, const NetworkParams& params) {
  const std::size_t n = gains.size();
  if (params.n() != n) {
    throw std::invalid_argument("strategy1_activate: shape mismatch");
  }
  PowerVector p(n, params.power());
  for (std::size_t i = 0; i < n; ++i) {
    if (gains.gain(i, i) > threshold) {
      p.activate(i);
    }
  }
  return p;
}

template <GainSource Source>
PowerVector strategy1_activate(const Source& gains, const ThresholdPolicy& policy, const NetworkParams& params) {
  return strategy1_activate(gains, policy.threshold(), params);
}

/// Indices with g_ii > t, ascending. Same rule as strategy1_activate without
/// building a length-n power vector.
template <GainSource Source>
std::vector<std::size_t> strategy1_active_links(const Source& gains, double threshold) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (gains.gain(i, i) > threshold) {
      active.push_back(i);
    }
  }
  return active;
}

/// The k links with the largest direct gains, ascending by index. Ties go to
/// the lower index.
template <GainSource Source>
std::vector<std::size_t> topk_links(const Source& gains, std::size_t k) {
  const std::size_t n = gains.size();
  if (k > n) {
    throw std::invalid_argument("topk_activate: k exceeds the number of links");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> direct(n);
  for (std::size_t i = 0; i < n; ++i) {
    direct[i] = gains.gain(i, i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return direct[a] > direct[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

template <GainSource Source>
PowerVector topk_activate(const Source& gains, std::size_t k, const NetworkParams& params) {
  if (params.n() != gains.size()) {
    throw std::invalid_argument("topk_activate: shape mismatch");
  }
  PowerVector p(gains.size(), params.power());
  for (std::size_t i : topk_links(gains, k)) {
    p.activate(i);
  }
  return p;
}

/// k log(1 + t / (rho + mean interference)).
inline double jensen_bound_from(std::size_t active_count, double mean_interference, double threshold, double rho) {
  if (active_count == 0) {
    return 0.0;
  }
  const double denominator = rho + mean_interference;
  if (!(denominator > 0.0)) {
    throw std::domain_error("jensen_bound: zero noise and zero interference");
  }
  return static_cast<double>(active_count) * std::log1p(threshold / denominator);
}

/// Lower bound on the threshold-strategy sum-rate obtained by replacing each
/// direct gain by t and averaging interference over the active links. Every
/// active link must satisfy g_ii > t.
template <GainSource Source>
double jensen_bound(const Source& gains, const PowerVector& p, double threshold, const NetworkParams& params) {
  if (p.size() != gains.size() || params.n() != gains.size()) {
    throw std::invalid_argument("jensen_bound: shape mismatch");
  }
  const std::vector<std::size_t> active = p.active_indices();
  if (active.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (std::size_t i : active) {
    if (!(gains.gain(i, i) > threshold)) {
      throw std::invalid_argument("jensen_bound: an active link has direct gain <= t");
    }
    for (std::size_t j : active) {
      if (j != i) {
        total += gains.gain(j, i);
      }
    }
  }
  return jensen_bound_from(active.size(), total / static_cast<double>(active.size()), threshold, params.rho());
}

/// Fraction of trials whose threshold-activation count k satisfies
/// |k - nq| < xi sqrt(nq). Trial r draws its diagonal from (master, r).
inline double concentration_check(std::size_t n, const FadingModel& model, const ThresholdPolicy& policy,
                                  std::size_t trials, double xi, std::uint64_t master_seed) {
  const double nq = static_cast<double>(n) * policy.activation_probability();
  if (!(nq > 0.0)) {
    throw std::invalid_argument("concentration_check: nq must be positive");
  }
  if (trials == 0) {
    throw std::invalid_argument("concentration_check: need at least one trial");
  }
  const double band = xi * std::sqrt(nq);
  std::size_t inside = 0;
  for (std::size_t r = 0; r < trials; ++r) {
    const LazyChannel channel(n, model, Seed{master_seed, r});
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      k += channel.gain(i, i) > policy.threshold() ? 1 : 0;
    }
    if (std::abs(static_cast<double>(k) - nq) < band) {
      ++inside;
    }
  }
  return static_cast<double>(inside) / static_cast<double>(trials);
}

}  // namespace fadingnet
