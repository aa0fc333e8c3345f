#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fadingnet/numeric.hpp"
#include "fadingnet/rng.hpp"

namespace fadingnet {

enum class FadingKind { Rayleigh, LogNormal };

/// I.i.d. channel-gain distribution. Rayleigh fading means exponentially
/// distributed power gains with unit mean; log-normal gains are exp(M + S z)
/// with z standard normal.
class FadingModel {
 public:
  static FadingModel rayleigh() noexcept { return FadingModel(FadingKind::Rayleigh, 0.0, 1.0, 1.0, 1.0); }

  static FadingModel lognormal(double location, double scale) {
    if (!std::isfinite(location) || !(scale > 0.0) || !std::isfinite(scale)) {
      throw std::invalid_argument("FadingModel::lognormal: need finite M and S > 0");
    }
    const double s2 = scale * scale;
    const double mean = std::exp(location + 0.5 * s2);
    const double variance = std::expm1(s2) * std::exp(2.0 * location + s2);
    return FadingModel(FadingKind::LogNormal, location, scale, mean, variance);
  }

  FadingKind kind() const noexcept { return kind_; }
  bool is_rayleigh() const noexcept { return kind_ == FadingKind::Rayleigh; }
  /// Log-normal location M (0 for Rayleigh).
  double location() const noexcept { return location_; }
  /// Log-normal scale S (1 for Rayleigh, where it is unused).
  double scale() const noexcept { return scale_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  std::string name() const { return is_rayleigh() ? "rayleigh" : "lognormal"; }

  /// Maps two independent uniforms to one gain. `u1` must lie in (0, 1] and
  /// `u2` in [0, 1). Rayleigh uses inversion -log(u1) and ignores u2;
  /// log-normal takes z from the cosine branch of Box-Muller.
  double transform(double u1, double u2) const noexcept {
    if (is_rayleigh()) {
      return -std::log(u1);
    }
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return std::exp(location_ + scale_ * z);
  }

  friend bool operator==(const FadingModel&, const FadingModel&) = default;

 private:
  FadingModel(FadingKind kind, double location, double scale, double mean, double variance)
      : kind_(kind), location_(location), scale_(scale), mean_(mean), variance_(variance) {}

  FadingKind kind_;
  double location_;
  double scale_;
  double mean_;
  double variance_;
};

/// Gains of a channel that is never stored: entry (from, to) is computed on
/// demand from (master, stream, from, to). Materializing it gives exactly the
/// matrix returned by sample_channel_matrix for the same arguments.
class LazyChannel {
 public:
  LazyChannel(std::size_t n, FadingModel model, const Seed& seed)
      : n_(n), model_(model), key_(rng::stream_key(seed)) {
    if (n == 0) {
      throw std::invalid_argument("channel needs at least one link");
    }
    if (n > (std::size_t{1} << 31)) {
      throw std::invalid_argument("channel size exceeds the 2^31 link addressing limit");
    }
  }

  std::size_t size() const noexcept { return n_; }
  const FadingModel& model() const noexcept { return model_; }

  /// Gain from transmitter `from` to receiver `to`.
  double gain(std::size_t from, std::size_t to) const noexcept {
    const std::uint64_t cell = (static_cast<std::uint64_t>(from) << 32) | static_cast<std::uint64_t>(to);
    const double u1 = rng::to_open_closed(rng::draw(key_, cell << 1));
    if (model_.is_rayleigh()) {
      return model_.transform(u1, 0.0);
    }
    const double u2 = rng::to_closed_open(rng::draw(key_, (cell << 1) | 1U));
    return model_.transform(u1, u2);
  }

 private:
  std::size_t n_;
  FadingModel model_;
  std::uint64_t key_;
};

/// Dense n x n gain matrix, row = transmitter, column = receiver, row-major.
/// Interference at receiver i is therefore a reduction down column i.
class ChannelMatrix {
 public:
  explicit ChannelMatrix(std::size_t n) : n_(n), gains_(n * n, 0.0) {
    if (n == 0) {
      throw std::invalid_argument("ChannelMatrix: n must be positive");
    }
  }

  ChannelMatrix(std::size_t n, std::vector<double> row_major) : n_(n), gains_(std::move(row_major)) {
    if (n == 0 || gains_.size() != n * n) {
      throw std::invalid_argument("ChannelMatrix: expected n*n gains with n > 0");
    }
    for (double g : gains_) {
      if (!std::isfinite(g) || g < 0.0) {
        throw std::invalid_argument("ChannelMatrix: gains must be finite and nonnegative");
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  double gain(std::size_t from, std::size_t to) const noexcept { return gains_[from * n_ + to]; }
  void set(std::size_t from, std::size_t to, double g) {
    if (!std::isfinite(g) || g < 0.0) {
      throw std::invalid_argument("ChannelMatrix: gains must be finite and nonnegative");
    }
    gains_[from * n_ + to] = g;
  }
  const std::vector<double>& data() const noexcept { return gains_; }

  friend bool operator==(const ChannelMatrix&, const ChannelMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> gains_;
};

/// Anything that exposes link count and (from, to) gains.
template <typename T>
concept GainSource = requires(const T& g, std::size_t a) {
  { g.size() } -> std::convertible_to<std::size_t>;
  { g.gain(a, a) } -> std::convertible_to<double>;
};

template <GainSource Source>
ChannelMatrix materialize(const Source& source) {
  const std::size_t n = source.size();
  std::vector<double> gains(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      gains[j * n + i] = source.gain(j, i);
    }
  }
  return ChannelMatrix(n, std::move(gains));
}

inline ChannelMatrix sample_channel_matrix(std::size_t n, const FadingModel& model, const Seed& seed) {
  if (n == 0) {
    throw std::invalid_argument("sample_channel_matrix: n must be positive");
  }
  return materialize(LazyChannel(n, model, seed));
}

/// Standard normal upper tail Q(z).
inline double normal_upper_tail(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// q = 1 - F(t), exact.
inline double tail_probability(const FadingModel& model, double t) {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("tail_probability: t must be nonnegative");
  }
  if (model.is_rayleigh()) {
    return std::exp(-t);
  }
  if (t == 0.0) {
    return 1.0;
  }
  return normal_upper_tail((std::log(t) - model.location()) / model.scale());
}

/// log(1 - F(t)), finite far into the tail where q itself underflows.
inline double log_tail_probability(const FadingModel& model, double t) {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("log_tail_probability: t must be nonnegative");
  }
  if (model.is_rayleigh()) {
    return -t;
  }
  if (t == 0.0) {
    return 0.0;
  }
  const double z = (std::log(t) - model.location()) / model.scale();
  if (z < 30.0) {
    return std::log(normal_upper_tail(z));
  }
  // Asymptotic Mills-ratio expansion, accurate to ~1e-12 relative for z >= 30.
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z * std::sqrt(2.0 * std::numbers::pi)) + std::log(series);
}

/// Large-t approximation of the log-normal tail:
///   q ~ S / (sqrt(2 pi) u) * exp(-u^2 / (2 S^2)),  u = log t - M.
/// Defined for u > 0 only. Below u = 2S the relative error exceeds ~20% and
/// the value should not be trusted.
inline double lognormal_tail_approx(const FadingModel& model, double t) {
  if (model.is_rayleigh()) {
    throw std::invalid_argument("lognormal_tail_approx: model must be log-normal");
  }
  if (!(t > 0.0)) {
    throw std::invalid_argument("lognormal_tail_approx: t must be positive");
  }
  const double u = std::log(t) - model.location();
  if (!(u > 0.0)) {
    throw std::invalid_argument("lognormal_tail_approx: requires log t > M");
  }
  const double s = model.scale();
  return s / (std::sqrt(2.0 * std::numbers::pi) * u) * std::exp(-u * u / (2.0 * s * s));
}

/// E[g | g <= delta].
inline double conditional_mean_below(const FadingModel& model, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("conditional_mean_below: delta must be positive and finite");
  }
  if (model.is_rayleigh()) {
    // 1 - delta e^-delta / (1 - e^-delta), written without cancellation.
    return 1.0 - delta / std::expm1(delta);
  }
  // Integrate in z = (log x - M) / S: E[g; g <= delta] = int e^{M + S z} phi(z) dz.
  const double m = model.location();
  const double s = model.scale();
  const double z_hi = (std::log(delta) - m) / s;
  const double mass = normal_upper_tail(-z_hi);
  if (!(mass > 0.0)) {
    throw std::domain_error("conditional_mean_below: delta lies beyond representable lower tail");
  }
  // Unit-width panels keep the adaptive rule from stepping over a peak that
  // sits in a narrow slice of a long interval.
  const double z_lo = std::min(z_hi, 0.0) - 40.0;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [&](double z) { return std::exp(m + s * z - 0.5 * z * z) * inv_sqrt_2pi; };
  const double scale = std::exp(m + s * z_hi) * mass;
  double partial = 0.0;
  for (double a = z_hi - 1.0; a + 1.0 > z_lo; a -= 1.0) {
    partial += numeric::integrate(integrand, std::max(a, z_lo), a + 1.0, 1e-13 * scale);
  }
  return partial / mass;
}

}  // namespace fadingnet
