#pragma once

// Exact maximum-likelihood decoding of a hidden gate sequence from a shot
// histogram, under a uniform prior (so ML coincides with MAP).

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probeleak/analysis.hpp"
#include "probeleak/protocol.hpp"
#include "probeleak/stats.hpp"

namespace probeleak {

// Exact laws for all 3^k sequences at one (theta, lambda), in lexicographic
// label order (row i is GateSequence::from_index(i, k)).
class LawTable {
 public:
  // Throws CapacityError when 3^k exceeds kExactEnumerationCap.
  LawTable(std::size_t depth, double theta, double lambda,
           StepOrder order = StepOrder::GateNoiseCoupleMeasure);

  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] double theta() const { return theta_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] StepOrder order() const { return order_; }
  [[nodiscard]] std::size_t size() const { return count_; }
  [[nodiscard]] std::size_t width() const { return width_; }

  [[nodiscard]] std::span<const double> probs(std::size_t i) const {
    return {probs_.data() + i * width_, width_};
  }
  // Natural logs; -inf where the probability is zero.
  [[nodiscard]] std::span<const double> log_probs(std::size_t i) const {
    return {log_probs_.data() + i * width_, width_};
  }
  [[nodiscard]] ObservationLaw law(std::size_t i) const;

 private:
  std::size_t depth_;
  double theta_;
  double lambda_;
  StepOrder order_;
  std::size_t count_;
  std::size_t width_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

LawTable law_table(std::size_t depth, double theta, double lambda,
                   StepOrder order = StepOrder::GateNoiseCoupleMeasure);

struct DecodeOptions {
  // Replace P by (P + 1e-12) / (1 + 2^k 1e-12) before taking logs, so no
  // candidate is eliminated outright.
  bool smoothing = false;
};

inline constexpr double kSmoothingEpsilon = 1e-12;

struct DecodeResult {
  GateSequence predicted;
  double log_likelihood;
  // Best minus second-best log-likelihood; +inf if every rival is eliminated.
  double runner_up_margin;
};

// argmax_g sum_b C(b) log P_g(b); a zero-probability observed outcome
// eliminates the candidate; exact ties go to the lexicographically smallest
// sequence. ConsistencyError if every candidate is eliminated.
DecodeResult ml_decode(const ShotHistogram& hist, const LawTable& table,
                       const DecodeOptions& options = {});

// Exact class means P_{t,a} taken from a table.
ClassMeans class_means_from_table(const LawTable& table, std::size_t position);

// Log class means for every position, laid out [t][a][b].
class PositionMeansTable {
 public:
  explicit PositionMeansTable(std::span<const ClassMeans> means);
  explicit PositionMeansTable(const LawTable& table);

  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] std::span<const double> log_mean(std::size_t t, std::size_t a) const {
    return {log_means_.data() + (t * kAlphabetSize + a) * width_, width_};
  }

 private:
  std::size_t depth_;
  std::size_t width_;
  std::vector<double> log_means_;
};

// For each position t, argmax_a sum_b C(b) log Pbar_{t,a}(b); ties go to the
// smallest label.
GateSequence per_position_decode(const ShotHistogram& hist, std::span<const ClassMeans> means);
GateSequence per_position_decode(const ShotHistogram& hist, const PositionMeansTable& means);

enum class Decoder { ML, PerPosition };
Decoder parse_decoder(std::string_view name);  // "ml" | "perpos"
std::string_view decoder_name(Decoder d);

struct AccuracyReport {
  double strict_accuracy;
  std::vector<double> per_position_accuracy;
  std::uint64_t trials;
  std::uint64_t strict_successes;
  double wilson_halfwidth;  // 95% Wilson half-width of strict_accuracy

  [[nodiscard]] WilsonInterval strict_interval() const {
    return wilson_interval(strict_successes, trials);
  }
  friend bool operator==(const AccuracyReport&, const AccuracyReport&) = default;
};

struct AccuracyConfig {
  std::size_t depth;
  double theta;
  double lambda;
  std::uint64_t shots;
  std::uint64_t trials;
  std::uint64_t seed;
  Decoder decoder = Decoder::ML;
  StepOrder order = StepOrder::GateNoiseCoupleMeasure;
  DecodeOptions decode{};
};

// Trial t: rng = Xoshiro256ss(derive_seed(seed, {t})); hidden sequence index
// = rng.below(3^k); histogram = sample_histogram(law(hidden), shots, rng()).
AccuracyReport evaluate_accuracy(const AccuracyConfig& config);

// Same, reusing a prebuilt table (its depth/theta/lambda/order are used; the
// config's are ignored). `means` may be null for the ML decoder.
AccuracyReport evaluate_accuracy(const AccuracyConfig& config, const LawTable& table,
                                 const PositionMeansTable* means);

// {"strict_accuracy", "per_position_accuracy", "trials", "strict_successes",
//  "wilson_halfwidth"}. The CSV form is the sweep row.
std::string accuracy_report_to_json(const AccuracyReport& report);

}  // namespace probeleak
