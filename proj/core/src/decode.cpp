#include "probeleak/decode.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "json.hpp"
#include "probeleak/errors.hpp"
#include "probeleak/rng.hpp"

namespace probeleak {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

struct NonZeroBin {
  std::size_t index;
  double count;
};

std::vector<NonZeroBin> nonzero_bins(const ShotHistogram& hist) {
  std::vector<NonZeroBin> bins;
  const auto counts = hist.counts();
  for (std::size_t b = 0; b < counts.size(); ++b)
    if (counts[b] != 0) bins.push_back({b, static_cast<double>(counts[b])});
  return bins;
}

double score(std::span<const NonZeroBin> bins, std::span<const double> log_p) {
  double s = 0.0;
  for (const auto& nb : bins) {
    const double l = log_p[nb.index];
    if (l == kNegInf) return kNegInf;
    s += nb.count * l;
  }
  return s;
}

double smoothed_score(std::span<const NonZeroBin> bins, std::span<const double> p) {
  const double norm = 1.0 + static_cast<double>(p.size()) * kSmoothingEpsilon;
  double s = 0.0;
  for (const auto& nb : bins) s += nb.count * std::log((p[nb.index] + kSmoothingEpsilon) / norm);
  return s;
}

}  // namespace

LawTable::LawTable(std::size_t depth, double theta, double lambda, StepOrder order)
    : depth_(depth), theta_(theta), lambda_(lambda), order_(order) {
  if (depth == 0) throw InputError("depth must be positive");
  detail::require_probability(lambda, "depolarizing strength");
  count_ = static_cast<std::size_t>(sequence_count(depth, kExactEnumerationCap));
  width_ = std::size_t{1} << depth;
  const KrausPair kraus = instrument_kraus(theta);
  probs_.resize(count_ * width_);
  log_probs_.resize(count_ * width_);
  std::vector<Gate> gates(depth);
  for (std::size_t i = 0; i < count_; ++i) {
    std::size_t idx = i;
    for (std::size_t t = depth; t-- > 0;) {
      gates[t] = static_cast<Gate>(idx % kAlphabetSize);
      idx /= kAlphabetSize;
    }
    auto row = std::span<double>(probs_).subspan(i * width_, width_);
    exact_law_into(gates, kraus, lambda, order, row);
    for (std::size_t b = 0; b < width_; ++b) log_probs_[i * width_ + b] = safe_log(row[b]);
  }
}

ObservationLaw LawTable::law(std::size_t i) const {
  if (i >= count_) throw InputError("law table index out of range");
  const auto p = probs(i);
  return ObservationLaw::from_probs(std::vector<double>(p.begin(), p.end()));
}

LawTable law_table(std::size_t depth, double theta, double lambda, StepOrder order) {
  return LawTable(depth, theta, lambda, order);
}

DecodeResult ml_decode(const ShotHistogram& hist, const LawTable& table,
                       const DecodeOptions& options) {
  if (hist.depth() != table.depth()) throw InputError("histogram depth differs from law table");
  const auto bins = nonzero_bins(hist);
  double best = kNegInf;
  double second = kNegInf;
  std::optional<std::size_t> best_index;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double s =
        options.smoothing ? smoothed_score(bins, table.probs(i)) : score(bins, table.log_probs(i));
    if (s == kNegInf) continue;
    if (!best_index || s > best) {
      second = best;
      best = s;
      best_index = i;
    } else if (s > second) {
      second = s;
    }
  }
  if (!best_index) throw ConsistencyError("every candidate sequence was eliminated");
  const double margin = second == kNegInf ? std::numeric_limits<double>::infinity() : best - second;
  return {GateSequence::from_index(*best_index, table.depth()), best, margin};
}

ClassMeans class_means_from_table(const LawTable& table, std::size_t position) {
  const std::size_t k = table.depth();
  if (position < 1 || position > k) throw InputError("position must lie in 1..k");
  const std::size_t width = table.width();
  std::array<std::vector<double>, kAlphabetSize> sum;
  for (auto& v : sum) v.assign(width, 0.0);
  // Digit of g_t in the base-3 row index.
  std::size_t stride = 1;
  for (std::size_t t = position; t < k; ++t) stride *= kAlphabetSize;
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& acc = sum[(i / stride) % kAlphabetSize];
    const auto p = table.probs(i);
    for (std::size_t b = 0; b < width; ++b) acc[b] += p[b];
  }
  const auto per_class = table.size() / kAlphabetSize;
  std::vector<ObservationLaw> means;
  for (auto& v : sum) {
    for (double& x : v) x /= static_cast<double>(per_class);
    means.push_back(ObservationLaw::from_probs(std::move(v)));
  }
  return ClassMeans{position, {means[0], means[1], means[2]}, per_class, {}};
}

PositionMeansTable::PositionMeansTable(std::span<const ClassMeans> means) {
  if (means.empty()) throw InputError("no class means supplied");
  depth_ = means.size();
  width_ = means[0].means[0].size();
  log_means_.resize(depth_ * kAlphabetSize * width_);
  for (std::size_t t = 0; t < depth_; ++t) {
    if (means[t].position != t + 1) throw InputError("class means must be ordered by position");
    for (std::size_t a = 0; a < kAlphabetSize; ++a) {
      const auto& law = means[t].means[a];
      if (law.size() != width_ || law.depth() != depth_)
        throw InputError("class means have inconsistent depth");
      for (std::size_t b = 0; b < width_; ++b)
        log_means_[(t * kAlphabetSize + a) * width_ + b] = safe_log(law[b]);
    }
  }
}

namespace {
std::vector<ClassMeans> all_positions(const LawTable& table) {
  std::vector<ClassMeans> v;
  for (std::size_t t = 1; t <= table.depth(); ++t) v.push_back(class_means_from_table(table, t));
  return v;
}
}  // namespace

PositionMeansTable::PositionMeansTable(const LawTable& table)
    : PositionMeansTable(all_positions(table)) {}

GateSequence per_position_decode(const ShotHistogram& hist, const PositionMeansTable& means) {
  if (hist.depth() != means.depth()) throw InputError("histogram depth differs from class means");
  const auto bins = nonzero_bins(hist);
  std::vector<Gate> out(means.depth());
  for (std::size_t t = 0; t < means.depth(); ++t) {
    double best = kNegInf;
    std::optional<std::size_t> arg;
    for (std::size_t a = 0; a < kAlphabetSize; ++a) {
      const double s = score(bins, means.log_mean(t, a));
      if (s == kNegInf) continue;
      if (!arg || s > best) {
        best = s;
        arg = a;
      }
    }
    if (!arg) throw ConsistencyError("every gate eliminated at a position");
    out[t] = static_cast<Gate>(*arg);
  }
  return GateSequence(std::move(out));
}

GateSequence per_position_decode(const ShotHistogram& hist, std::span<const ClassMeans> means) {
  return per_position_decode(hist, PositionMeansTable(means));
}

Decoder parse_decoder(std::string_view name) {
  if (name == "ml") return Decoder::ML;
  if (name == "perpos") return Decoder::PerPosition;
  throw InputError("unknown decoder '" + std::string(name) + "' (expected ml or perpos)");
}

std::string_view decoder_name(Decoder d) { return d == Decoder::ML ? "ml" : "perpos"; }

AccuracyReport evaluate_accuracy(const AccuracyConfig& config, const LawTable& table,
                                 const PositionMeansTable* means) {
  if (config.trials == 0) throw InputError("trial count must be at least 1");
  if (config.shots == 0) throw InputError("shot count must be at least 1");
  if (config.depth != table.depth()) throw InputError("config depth differs from law table");
  std::optional<PositionMeansTable> own_means;
  if (config.decoder == Decoder::PerPosition && means == nullptr) {
    own_means.emplace(table);
    means = &*own_means;
  }
  const std::size_t k = table.depth();
  std::uint64_t strict = 0;
  std::vector<std::uint64_t> per_pos(k, 0);
  for (std::uint64_t t = 0; t < config.trials; ++t) {
    Xoshiro256ss rng(derive_seed(config.seed, {t}));
    const std::uint64_t hidden = rng.below(table.size());
    Xoshiro256ss shot_rng(rng());
    const auto hist =
        ShotHistogram::from_counts(sample_multinomial(shot_rng, config.shots, table.probs(hidden)));
    const GateSequence truth = GateSequence::from_index(hidden, k);
    const GateSequence guess = config.decoder == Decoder::ML
                                   ? ml_decode(hist, table, config.decode).predicted
                                   : per_position_decode(hist, *means);
    bool all = true;
    for (std::size_t p = 0; p < k; ++p) {
      if (guess[p] == truth[p]) {
        ++per_pos[p];
      } else {
        all = false;
      }
    }
    if (all) ++strict;
  }
  AccuracyReport r;
  const auto n = static_cast<double>(config.trials);
  r.trials = config.trials;
  r.strict_successes = strict;
  r.strict_accuracy = static_cast<double>(strict) / n;
  for (auto c : per_pos) r.per_position_accuracy.push_back(static_cast<double>(c) / n);
  r.wilson_halfwidth = wilson_interval(strict, config.trials).half_width;
  return r;
}

AccuracyReport evaluate_accuracy(const AccuracyConfig& config) {
  const LawTable table(config.depth, config.theta, config.lambda, config.order);
  return evaluate_accuracy(config, table, nullptr);
}

std::string accuracy_report_to_json(const AccuracyReport& r) {
  nlohmann::json j;
  j["strict_accuracy"] = r.strict_accuracy;
  j["per_position_accuracy"] = r.per_position_accuracy;
  j["trials"] = r.trials;
  j["strict_successes"] = r.strict_successes;
  j["wilson_halfwidth"] = r.wilson_halfwidth;
  return j.dump(2) + "\n";
}

}  // namespace probeleak
