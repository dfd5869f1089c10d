#include "probeleak/rng.hpp"

#include <algorithm>
#include <bit>

#include "probeleak/errors.hpp"

namespace probeleak {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t i : indices) h = mix64(h ^ mix64(i + 0x9E3779B97F4A7C15ULL));
  return h;
}

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) {
  SplitMix64 sm(seed);
  for (auto& w : s_) w = sm.next();
}

std::uint64_t Xoshiro256ss::operator()() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double Xoshiro256ss::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t Xoshiro256ss::below(std::uint64_t n) {
  if (n == 0) throw InputError("below(0) is empty");
  if (n == 1) return 0;
  const int bits = 64 - std::countl_zero(n - 1);
  for (;;) {
    const std::uint64_t x = (*this)() >> (64 - bits);
    if (x < n) return x;
  }
}

namespace {

constexpr double kTermCutoff = 0x1.0p-64;

std::uint64_t binomial_upper_half(Xoshiro256ss& rng, std::uint64_t n, double p) {
  // p in (0, 1/2]. Weights are relative to the mode term w(mode) = 1.
  const double q = 1.0 - p;
  const double ratio = p / q;
  const auto nd = static_cast<double>(n);
  auto mode = static_cast<std::uint64_t>((nd + 1.0) * p);
  if (mode > n) mode = n;

  // Walk down from the mode to find the low end and accumulate the total.
  double total = 1.0;
  double w = 1.0;
  std::uint64_t lo = mode;
  while (lo > 0) {
    const double next = w * static_cast<double>(lo) / (static_cast<double>(n - lo + 1) * ratio);
    if (next < kTermCutoff) break;
    w = next;
    total += w;
    --lo;
  }
  const double w_lo = w;
  w = 1.0;
  std::uint64_t hi = mode;
  while (hi < n) {
    const double next = w * static_cast<double>(n - hi) / static_cast<double>(hi + 1) * ratio;
    if (next < kTermCutoff) break;
    w = next;
    total += w;
    ++hi;
  }

  // Invert from the low end upward.
  const double target = rng.uniform() * total;
  double acc = 0.0;
  w = w_lo;
  for (std::uint64_t x = lo; x < hi; ++x) {
    acc += w;
    if (target < acc) return x;
    w = w * static_cast<double>(n - x) / static_cast<double>(x + 1) * ratio;
  }
  return hi;
}

}  // namespace

std::uint64_t sample_binomial(Xoshiro256ss& rng, std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("binomial probability outside [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial_upper_half(rng, n, 1.0 - p);
  return binomial_upper_half(rng, n, p);
}

std::vector<std::uint64_t> sample_multinomial(Xoshiro256ss& rng, std::uint64_t n,
                                              std::span<const double> probs) {
  std::vector<std::uint64_t> counts(probs.size(), 0);
  if (probs.empty()) {
    if (n != 0) throw InputError("multinomial over an empty support");
    return counts;
  }
  double remaining_mass = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw InputError("multinomial weight is negative or NaN");
    remaining_mass += p;
  }
  std::uint64_t remaining = n;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    if (probs[i] == 0.0) continue;
    const double cond = remaining_mass > 0.0 ? std::min(1.0, probs[i] / remaining_mass) : 1.0;
    const std::uint64_t c = sample_binomial(rng, remaining, cond);
    counts[i] = c;
    remaining -= c;
    remaining_mass -= probs[i];
  }
  if (remaining > 0) {
    // Final bin, or the last bin with positive weight if trailing bins are empty.
    std::size_t last = probs.size() - 1;
    while (last > 0 && probs[last] == 0.0) --last;
    counts[last] += remaining;
  }
  return counts;
}

}  // namespace probeleak
