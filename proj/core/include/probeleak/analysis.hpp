#pragma once

// Distinguishability of observation laws and the analytic coupling predictor.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <string>
#include <vector>

#include "probeleak/protocol.hpp"

namespace probeleak {

// Half L1 distance. Throws InputError on depth mismatch.
double tv(const ObservationLaw& p, const ObservationLaw& q);

// sum_b P log(P/Q) in nats with 0 log 0 = 0. Returns +infinity when P puts
// mass where Q has none.
double kl(const ObservationLaw& p, const ObservationLaw& q);

// Jensen-Shannon divergence in nats, in [0, log 2].
double js(const ObservationLaw& p, const ObservationLaw& q);

enum class Metric { TV, KL, JS };
Metric parse_metric(std::string_view name);
double divergence(Metric m, const ObservationLaw& p, const ObservationLaw& q);

// Largest number of sequences enumerated exactly (3^9 = 19683).
inline constexpr std::uint64_t kExactEnumerationCap = 20000;

struct ClassMeans {
  std::size_t position;  // 1-based
  std::array<ObservationLaw, kAlphabetSize> means;
  // Sequences averaged per class: 3^(k-1) in exact mode, the draw count in
  // Monte Carlo mode.
  std::uint64_t samples_per_class;
  // Per-entry standard error of each mean; empty in exact mode.
  std::array<std::vector<double>, kAlphabetSize> std_errors;

  [[nodiscard]] bool exact() const { return std_errors[0].empty(); }
  [[nodiscard]] const ObservationLaw& operator[](Gate a) const {
    return means[static_cast<std::size_t>(a)];
  }
};

struct ExactMeans {};
struct MonteCarloMeans {
  std::uint64_t samples;  // per class
  std::uint64_t seed;
};

// Mean law over sequences with g_t = a, for each gate a. Exact mode needs
// 3^k <= kExactEnumerationCap.
ClassMeans class_means(std::size_t position, std::size_t depth, double theta, double lambda,
                       const std::variant<ExactMeans, MonteCarloMeans>& mode,
                       StepOrder order = StepOrder::GateNoiseCoupleMeasure);

double pairwise_separation(const GateSequence& u, const GateSequence& v, double theta,
                           double lambda, Metric metric,
                           StepOrder order = StepOrder::GateNoiseCoupleMeasure);

// Largest pairwise TV over all depth-k sequences (k = 2 gives the 36 pairs
// scanned for blind spots).
double max_pairwise_tv(std::size_t depth, double theta, double lambda,
                       StepOrder order = StepOrder::GateNoiseCoupleMeasure);

// Golden-section minimisation of a unimodal f on [a, b] to bracket width tol.
double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol);

struct BlindSpotOptions {
  double window_lo = 0.05;
  double window_hi = 6.283185307179586 - 0.05;
  double step = 6.283185307179586 / 4096.0;
  double lambda = 0.0;
  double detect_threshold = 1e-3;  // coarse grid value to trigger refinement
  double theta_tolerance = 1e-8;
  double root_threshold = 1e-8;  // refined value required to report
  std::size_t threads = 0;
};

struct BlindSpotScan {
  std::vector<double> thetas;  // grid
  std::vector<double> values;  // max pairwise depth-2 TV on the grid
  std::vector<double> roots;   // refined blind-spot angles
  // Smallest interior local minimum of the grid curve (nullopt if the curve
  // has none).
  std::optional<std::pair<double, double>> lowest_local_min;
};

// Throws InputError for an empty window or one reaching within 0.05 of a
// decoupling angle.
BlindSpotScan blind_spot_scan(const BlindSpotOptions& options);

struct EnvelopeCurve {
  std::size_t depth;
  std::vector<double> thetas;
  std::vector<double> values;  // sin^2(theta/2) cos^k(theta/2), unnormalized

  // Grid angle of the largest value; ties go to the first.
  [[nodiscard]] double argmax() const;
};

double envelope_value(std::size_t depth, double theta);
EnvelopeCurve envelope(std::size_t depth, std::span<const double> thetas);
std::vector<double> linspace(double lo, double hi, std::size_t count);

// 2 arcsin sqrt(2/(k+2)), the maximiser of the envelope on (0, pi).
double theta_star(std::size_t depth);

// Largest TV between law(theta) and law(2 pi - theta) over all 3^k sequences.
double mirror_deviation(std::size_t depth, double theta, double lambda,
                        StepOrder order = StepOrder::GateNoiseCoupleMeasure);

// Unnormalized fast Walsh-Hadamard transform (natural order).
std::vector<double> wht(std::span<const double> x);
void wht_inplace(std::span<double> x);

// out[i] = x[i ^ (i >> 1)].
std::vector<double> gray_reorder(std::span<const double> x);
// Inverse permutation of gray_reorder.
std::vector<double> gray_restore(std::span<const double> x);

std::string curve_to_csv(std::span<const double> thetas, std::span<const double> values);
std::string curve_to_json(std::span<const double> thetas, std::span<const double> values);

}  // namespace probeleak
