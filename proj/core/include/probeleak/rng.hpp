#pragma once

// Deterministic randomness. Every draw in the project flows through
// Xoshiro256ss seeded by SplitMix64, and the binomial/multinomial samplers
// below use only IEEE +, -, *, / so that a (seed, input) pair yields the same
// output on every conforming platform. These algorithms are part of the
// file-format contract: changing them changes recorded histograms.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace probeleak {

// SplitMix64 (Steele, Lea, Flood 2014). Used for seeding and hashing.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

// The SplitMix64 output function applied to a single word.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive hash of a seed and a list of indices:
//   h = mix64(seed); for each i: h = mix64(h ^ mix64(i + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> indices);

// xoshiro256** 1.0 (Blackman, Vigna). State filled from SplitMix64(seed).
class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256ss(std::uint64_t seed);

  std::uint64_t operator()();
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n) by rejection on the top bits; n >= 1.
  std::uint64_t below(std::uint64_t n);

 private:
  std::array<std::uint64_t, 4> s_{};
};

// Binomial(n, p) by table inversion around the mode. Terms are generated by
// the pmf ratio recurrence and dropped once below 2^-64 of the mode term, so
// the neglected tail mass is under 1e-17 for every n this project uses.
std::uint64_t sample_binomial(Xoshiro256ss& rng, std::uint64_t n, double p);

// Multinomial(n, probs) by sequential binomial conditioning in index order:
// count[i] ~ Binomial(remaining, p_i / remaining_mass). probs need not sum to
// exactly one; the last bin takes whatever remains.
std::vector<std::uint64_t> sample_multinomial(Xoshiro256ss& rng, std::uint64_t n,
                                              std::span<const double> probs);

}  // namespace probeleak
