#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fadingnet/fading.hpp"

namespace fadingnet {

/// Link count, peak power P and receiver noise variance eta. Defaults give
/// rho = eta / P = 1.
class NetworkParams {
 public:
  explicit NetworkParams(std::size_t n, double power = 1.0, double noise = 1.0)
      : n_(n), power_(power), noise_(noise) {
    if (n == 0) {
      throw std::invalid_argument("NetworkParams: n must be positive");
    }
    if (!(power > 0.0) || !std::isfinite(power)) {
      throw std::invalid_argument("NetworkParams: P must be positive and finite");
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
      throw std::invalid_argument("NetworkParams: eta must be nonnegative and finite");
    }
  }

  std::size_t n() const noexcept { return n_; }
  double power() const noexcept { return power_; }
  double noise() const noexcept { return noise_; }
  double rho() const noexcept { return noise_ / power_; }

  NetworkParams with_noise(double noise) const { return NetworkParams(n_, power_, noise); }

 private:
  std::size_t n_;
  double power_;
  double noise_;
};

/// On-off power allocation: every entry is exactly 0 or exactly P.
class PowerVector {
 public:
  PowerVector(std::size_t n, double power) : power_(power), values_(n, 0.0) {
    if (!(power > 0.0)) {
      throw std::invalid_argument("PowerVector: P must be positive");
    }
  }

  /// Validates an explicit vector against the on-off constraint.
  PowerVector(std::vector<double> values, double power) : power_(power), values_(std::move(values)) {
    if (!(power > 0.0)) {
      throw std::invalid_argument("PowerVector: P must be positive");
    }
    for (double v : values_) {
      if (v != 0.0 && v != power) {
        throw std::invalid_argument("PowerVector: on-off entries must be 0 or P");
      }
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  double power() const noexcept { return power_; }
  double operator[](std::size_t i) const { return values_.at(i); }
  bool is_active(std::size_t i) const { return values_.at(i) != 0.0; }
  void activate(std::size_t i) { values_.at(i) = power_; }
  void deactivate(std::size_t i) { values_.at(i) = 0.0; }
  std::span<const double> values() const noexcept { return values_; }

  std::vector<std::size_t> active_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] != 0.0) {
        out.push_back(i);
      }
    }
    return out;
  }

  std::size_t active_count() const noexcept {
    std::size_t k = 0;
    for (double v : values_) {
      k += v != 0.0 ? 1 : 0;
    }
    return k;
  }

  friend bool operator==(const PowerVector&, const PowerVector&) = default;

 private:
  double power_;
  std::vector<double> values_;
};

/// Per-link rates (nats/channel use) and P-normalized interference.
struct ThroughputReport {
  std::vector<double> rates;
  std::vector<double> interference;
  double sum_rate = 0.0;
  std::size_t active_count = 0;
  /// sum_rate / active_count, or 0 when no link is active.
  double rate_per_link = 0.0;
  bool no_active_links = true;
};

/// Same quantities restricted to the active links, in the order given.
struct ActiveLinkReport {
  std::vector<std::size_t> links;
  std::vector<double> rates;
  std::vector<double> interference;
  double sum_rate = 0.0;
  double rate_per_link = 0.0;

  std::size_t active_count() const noexcept { return links.size(); }
  double mean_interference() const noexcept {
    if (links.empty()) {
      return 0.0;
    }
    double s = 0.0;
    for (double x : interference) {
      s += x;
    }
    return s / static_cast<double>(links.size());
  }
};

namespace detail {

/// log(1 + signal / (noise + power * interference)).
inline double sinr_rate(double direct_gain, double power, double noise, double interference) {
  const double signal = direct_gain * power;
  const double denominator = noise + power * interference;
  if (signal == 0.0) {
    return 0.0;
  }
  if (!(denominator > 0.0)) {
    throw std::domain_error("link rate: zero noise and zero interference with positive signal");
  }
  return std::log1p(signal / denominator);
}

}  // namespace detail

template <GainSource Source>
double link_rate(std::size_t i, const Source& gains, const PowerVector& p, const NetworkParams& params) {
  const std::size_t n = gains.size();
  if (p.size() != n || params.n() != n) {
    throw std::invalid_argument("link_rate: shape mismatch");
  }
  if (i >= n) {
    throw std::out_of_range("link_rate: link index out of range");
  }
  if (!p.is_active(i)) {
    return 0.0;
  }
  double received = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i && p.is_active(j)) {
      received += gains.gain(j, i) * p[j];
    }
  }
  const double signal = gains.gain(i, i) * p[i];
  if (signal == 0.0) {
    return 0.0;
  }
  const double denominator = params.noise() + received;
  if (!(denominator > 0.0)) {
    throw std::domain_error("link_rate: zero noise and zero interference with positive signal");
  }
  return std::log1p(signal / denominator);
}

/// Rates of the listed links when exactly those links transmit at power P.
/// Only gains among the listed links are read, so this is O(k^2) regardless
/// of the network size.
template <GainSource Source>
ActiveLinkReport evaluate_active(const Source& gains, std::span<const std::size_t> active,
                                 const NetworkParams& params) {
  ActiveLinkReport report;
  const std::size_t k = active.size();
  report.links.assign(active.begin(), active.end());
  report.rates.resize(k);
  report.interference.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t i = active[a];
    if (i >= gains.size()) {
      throw std::out_of_range("evaluate_active: link index out of range");
    }
    double interference = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if (b != a) {
        interference += gains.gain(active[b], i);
      }
    }
    report.interference[a] = interference;
    report.rates[a] = detail::sinr_rate(gains.gain(i, i), params.power(), params.noise(), interference);
  }
  for (double r : report.rates) {
    report.sum_rate += r;
  }
  report.rate_per_link = k > 0 ? report.sum_rate / static_cast<double>(k) : 0.0;
  return report;
}

template <GainSource Source>
ThroughputReport evaluate(const Source& gains, const PowerVector& p, const NetworkParams& params) {
  const std::size_t n = gains.size();
  if (p.size() != n || params.n() != n) {
    throw std::invalid_argument("evaluate: shape mismatch");
  }
  if (p.power() != params.power()) {
    throw std::invalid_argument("evaluate: power vector and params disagree on P");
  }
  const std::vector<std::size_t> active = p.active_indices();
  const ActiveLinkReport on = evaluate_active(gains, std::span<const std::size_t>(active), params);

  ThroughputReport report;
  report.rates.assign(n, 0.0);
  report.interference.assign(n, 0.0);
  std::vector<char> is_on(n, 0);
  for (std::size_t a = 0; a < active.size(); ++a) {
    report.rates[active[a]] = on.rates[a];
    report.interference[active[a]] = on.interference[a];
    is_on[active[a]] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (is_on[i] != 0) {
      continue;
    }
    double interference = 0.0;
    for (std::size_t j : active) {
      interference += gains.gain(j, i);
    }
    report.interference[i] = interference;
  }
  report.sum_rate = on.sum_rate;
  report.active_count = active.size();
  report.no_active_links = active.empty();
  report.rate_per_link = on.rate_per_link;
  return report;
}

namespace detail {

struct ScaledChannel {
  const ChannelMatrix& base;
  double factor;
  std::size_t size() const noexcept { return base.size(); }
  double gain(std::size_t from, std::size_t to) const noexcept { return factor * base.gain(from, to); }
};

}  // namespace detail

/// Checks that scaling every gain and the noise by c leaves every rate
/// unchanged to relative 1e-10.
inline bool scale_invariance_check(const ChannelMatrix& gains, const PowerVector& p, const NetworkParams& params,
                                   double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    return false;
  }
  const ThroughputReport base = evaluate(gains, p, params);
  const ThroughputReport scaled =
      evaluate(detail::ScaledChannel{gains, c}, p, params.with_noise(c * params.noise()));
  for (std::size_t i = 0; i < base.rates.size(); ++i) {
    const double a = base.rates[i];
    const double b = scaled.rates[i];
    if (std::abs(a - b) > 1e-10 * std::max(std::abs(a), std::abs(b)) && std::abs(a - b) > 1e-300) {
      return false;
    }
  }
  return true;
}

}  // namespace fadingnet
