#pragma once

// Observation laws over probe bit-strings for a hidden gate sequence, and
// finite-shot histograms drawn from them.
//
// Bit-string convention (project-wide): b = (y_1, ..., y_k) is stored at
// index sum_t y_t 2^(k - t), i.e. the first probe outcome is the most
// significant bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probeleak/quantum.hpp"

namespace probeleak {

inline constexpr std::size_t kMaxDepth = 20;
inline constexpr std::string_view kBitConvention = "y1-msb";

class GateSequence {
 public:
  // Throws InputError for an empty sequence, CapacityError beyond kMaxDepth.
  explicit GateSequence(std::vector<Gate> gates);

  // Comma-separated labels, e.g. "G1,G3,G2".
  static GateSequence parse(std::string_view text);
  // Base-3 digits of `index`, most significant digit first. Index order is
  // lexicographic order on the labels.
  static GateSequence from_index(std::uint64_t index, std::size_t depth);

  [[nodiscard]] std::size_t depth() const { return gates_.size(); }
  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] Gate operator[](std::size_t t) const { return gates_[t]; }
  [[nodiscard]] std::uint64_t index() const;
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const GateSequence&, const GateSequence&) = default;

 private:
  std::vector<Gate> gates_;
};

// 3^depth, throwing CapacityError if it exceeds `cap`.
std::uint64_t sequence_count(std::size_t depth, std::uint64_t cap);

class ObservationLaw {
 public:
  // Validates: length a power of two (depth <= kMaxDepth), entries finite and
  // >= 0, sum within 1e-10 of one. Throws InputError otherwise.
  static ObservationLaw from_probs(std::vector<double> probs);
  static ObservationLaw point_mass(std::size_t depth, std::size_t index);
  static ObservationLaw uniform(std::size_t depth);

  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] std::size_t size() const { return probs_.size(); }
  [[nodiscard]] std::span<const double> probs() const { return probs_; }
  [[nodiscard]] double operator[](std::size_t i) const { return probs_[i]; }

 private:
  ObservationLaw(std::size_t depth, std::vector<double> probs)
      : depth_(depth), probs_(std::move(probs)) {}
  std::size_t depth_;
  std::vector<double> probs_;
};

class ShotHistogram {
 public:
  // Validates length a power of two and shots == sum(counts) >= 1.
  static ShotHistogram from_counts(std::vector<std::uint64_t> counts);

  [[nodiscard]] std::size_t depth() const { return depth_; }
  [[nodiscard]] std::uint64_t shots() const { return shots_; }
  [[nodiscard]] std::span<const std::uint64_t> counts() const { return counts_; }

 private:
  ShotHistogram(std::size_t depth, std::vector<std::uint64_t> counts, std::uint64_t shots)
      : depth_(depth), counts_(std::move(counts)), shots_(shots) {}
  std::size_t depth_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t shots_;
};

// Exact law by branch-tree evaluation through the effective instrument,
// starting from |0><0|. Roundoff negatives above -1e-12 are clipped and the
// vector renormalized; anything larger raises ConsistencyError.
ObservationLaw exact_law(const GateSequence& seq, double theta, double lambda,
                         StepOrder order = StepOrder::GateNoiseCoupleMeasure);

// Unvalidated variant writing 2^k probabilities into `out`; for table builders
// that have already checked their arguments.
void exact_law_into(std::span<const Gate> gates, const KrausPair& kraus, double lambda,
                    StepOrder order, std::span<double> out);

// Same law computed by recursing over joint_step with an arbitrary probe
// model. Exponential and slow; meant as an oracle for small depth.
ObservationLaw joint_law(const GateSequence& seq, const ProbeModel& model, double lambda,
                         StepOrder order = StepOrder::GateNoiseCoupleMeasure);

// Multinomial draw of `shots` outcomes (sequential binomial conditioning in
// index order, Xoshiro256ss seeded with `seed`). Throws InputError for 0 shots.
ShotHistogram sample_histogram(const ObservationLaw& law, std::uint64_t shots, std::uint64_t seed);

// counts / shots.
ObservationLaw empirical_dist(const ShotHistogram& hist);

// Bits of `index` as a string "y1y2...yk".
std::string bitstring(std::size_t index, std::size_t depth);

}  // namespace probeleak
