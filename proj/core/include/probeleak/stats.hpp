#pragma once

#include <cstdint>
#include <span>

namespace probeleak {

inline constexpr double kZ95 = 1.959963984540054;

struct WilsonInterval {
  double center;
  double half_width;
  [[nodiscard]] double lo() const { return center - half_width; }
  [[nodiscard]] double hi() const { return center + half_width; }
  [[nodiscard]] bool contains(double p) const { return p >= lo() && p <= hi(); }
};

// Wilson score interval for `successes` out of `trials` (trials >= 1).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

// Spearman rank correlation with average ranks for ties. Returns 0 when
// either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

struct LineFit {
  double slope;
  double intercept;
};

// Ordinary least squares y = slope * x + intercept.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace probeleak
