#pragma once

#include <cstdint>

namespace fadingnet {

/// Identifies one reproducible random stream: a master seed plus a stream
/// index (normally the trial index).
struct Seed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

namespace rng {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-(master, stream) key. Distinct streams of one master get
/// independent-looking SplitMix64 states.
constexpr std::uint64_t stream_key(const Seed& seed) noexcept {
  return mix64(mix64(seed.master + kGoldenGamma) ^ mix64(seed.stream ^ 0x5851f42d4c957f2dULL));
}

/// Counter-based draw: the `counter`-th output of a SplitMix64 generator whose
/// state starts at `key`. Any counter can be evaluated directly, so lazily
/// sampled entries are a pure function of (master, stream, counter).
constexpr std::uint64_t draw(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix64(key + kGoldenGamma * (counter + 1));
}

/// Uniform on (0, 1]; never returns 0, so -log(u) is finite.
constexpr double to_open_closed(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Uniform on [0, 1).
constexpr double to_closed_open(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential view of a counter-based stream, for consumers that just need
/// "the next number".
class Stream {
 public:
  explicit constexpr Stream(const Seed& seed) noexcept : key_(stream_key(seed)) {}

  constexpr std::uint64_t next_u64() noexcept { return draw(key_, counter_++); }
  constexpr double uniform() noexcept { return to_closed_open(next_u64()); }
  constexpr double uniform_positive() noexcept { return to_open_closed(next_u64()); }

  /// Uniform integer in [0, bound). Lemire's multiply-shift; the tiny bias is
  /// irrelevant at the bounds used here (< 2^32).
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  constexpr std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rng
}  // namespace fadingnet
