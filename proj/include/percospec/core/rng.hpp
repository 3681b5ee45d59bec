#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

#include "percospec/core/error.hpp"

namespace percospec {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/*
 * Identifies one random stream: (master seed, experiment label, replica, purpose, sub-index).
 *
 * The labels are hashed into the Philox key; the replica index occupies the high half of
 * the 128-bit counter, so streams of different replicas never share a counter block and
 * regenerating from the same SeedSpec is bit-identical whatever the thread layout.
 */
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t experiment = 0;
  std::uint64_t replica = 0;
  std::uint64_t purpose = 0;
  std::uint64_t sub = 0;

  SeedSpec() = default;
  SeedSpec(std::uint64_t master, std::string_view experiment_label)
      : master_seed(master), experiment(fnv1a(experiment_label)) {}

  [[nodiscard]] SeedSpec with_replica(std::uint64_t index) const {
    SeedSpec s = *this;
    s.replica = index;
    return s;
  }
  [[nodiscard]] SeedSpec with_purpose(std::string_view tag) const {
    SeedSpec s = *this;
    s.purpose = fnv1a(tag);
    s.sub = 0;
    return s;
  }
  [[nodiscard]] SeedSpec with_sub(std::uint64_t index) const {
    SeedSpec s = *this;
    s.sub = index;
    return s;
  }

  /// Child seed for a library routine: the stream depends on every field of this one, purpose and sub included.
  [[nodiscard]] SeedSpec derive(std::string_view tag) const {
    SeedSpec s = *this;
    s.experiment = splitmix64(experiment ^ splitmix64(purpose ^ splitmix64(sub + 0x2545f4914f6cdd1dull)));
    s.purpose = fnv1a(tag);
    s.sub = 0;
    return s;
  }

  [[nodiscard]] std::uint64_t key() const {
    std::uint64_t k = splitmix64(master_seed);
    k = splitmix64(k ^ experiment);
    k = splitmix64(k ^ (purpose * 0x9e3779b97f4a7c15ull));
    return splitmix64(k ^ (sub + 0x632be59bd9b4e019ull));
  }

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Sequential generator over one Philox stream; models UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(const SeedSpec& spec) {
    const std::uint64_t k = spec.key();
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    replica_lo_ = static_cast<std::uint32_t>(spec.replica);
    replica_hi_ = static_cast<std::uint32_t>(spec.replica >> 32);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ >= 2) refill();
    const std::uint64_t lo = block_[2 * pos_];
    const std::uint64_t hi = block_[2 * pos_ + 1];
    ++pos_;
    return (hi << 32) | lo;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  int sign() { return ((*this)() >> 63) ? 1 : -1; }
  std::uint64_t below(std::uint64_t n) {
    // Lemire-free simple rejection; n is small in every caller.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do {
      v = (*this)();
    } while (v >= limit);
    return v % n;
  }

  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw ParameterError("poisson: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_inversion(mean);
    return poisson_ptrs(mean);
  }

 private:
  void refill() {
    block_ = philox4x32({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                         replica_lo_, replica_hi_},
                        key_);
    ++counter_;
    pos_ = 0;
  }

  std::uint64_t poisson_inversion(double mean) {
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  // Transformed rejection with squeeze (Hormann 1993), valid for mean >= 10.
  std::uint64_t poisson_ptrs(double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::fabs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
          -mean + k * loglam - std::lgamma(k + 1.0)) {
        return static_cast<std::uint64_t>(k);
      }
    }
  }

  std::array<std::uint32_t, 2> key_{};
  std::uint32_t replica_lo_ = 0;
  std::uint32_t replica_hi_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 2;
};

}  // namespace percospec
