#include "probeleak/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "probeleak/errors.hpp"
#include "probeleak/rng.hpp"

namespace probeleak {

namespace {

std::size_t depth_of_length(std::size_t n, const char* what) {
  if (n == 0 || !std::has_single_bit(n))
    throw InputError(std::string(what) + " length must be a power of two");
  const auto depth = static_cast<std::size_t>(std::countr_zero(n));
  if (depth == 0) throw InputError(std::string(what) + " must cover at least one probe bit");
  if (depth > kMaxDepth) throw CapacityError(std::string(what) + " depth exceeds cap");
  return depth;
}

const std::array<ComplexMat2, kAlphabetSize>& alphabet_unitaries() {
  static const std::array<ComplexMat2, kAlphabetSize> u = {
      gate_unitary(Gate::G1), gate_unitary(Gate::G2), gate_unitary(Gate::G3)};
  return u;
}

bool is_zero(const ComplexMat2& m) {
  return std::all_of(m.a.begin(), m.a.end(), [](const cplx& z) { return z == cplx(0.0, 0.0); });
}

struct BranchTree {
  std::span<const Gate> gates;
  const KrausPair& kraus;
  double lambda;
  StepOrder order;
  std::span<double> out;

  void walk(const ComplexMat2& rho, std::size_t t, std::size_t index) const {
    const std::size_t k = gates.size();
    if (t == k) {
      out[index] = rho.trace().real();
      return;
    }
    if (is_zero(rho)) {
      const std::size_t width = std::size_t{1} << (k - t);
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(index * width), width, 0.0);
      return;
    }
    ComplexMat2 a = conjugate(alphabet_unitaries()[static_cast<std::size_t>(gates[t])], rho);
    if (order == StepOrder::GateNoiseCoupleMeasure) a = detail::depolarize_raw(a, lambda);
    for (std::size_t y = 0; y < 2; ++y) {
      ComplexMat2 post = conjugate(kraus[y], a);
      if (order == StepOrder::GateCoupleMeasureNoise) post = detail::depolarize_raw(post, lambda);
      walk(post, t + 1, 2 * index + y);
    }
  }
};

// Clip roundoff negatives, check normalization, renormalize.
void finalize_law(std::span<double> p) {
  double sum = 0.0;
  for (double& x : p) {
    if (!std::isfinite(x)) throw ConsistencyError("non-finite leaf probability");
    if (x < 0.0) {
      if (x < -1e-12) throw ConsistencyError("leaf probability below -1e-12");
      x = 0.0;
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw ConsistencyError("leaf probabilities do not sum to one");
  for (double& x : p) x /= sum;
}

}  // namespace

GateSequence::GateSequence(std::vector<Gate> gates) : gates_(std::move(gates)) {
  if (gates_.empty()) throw InputError("gate sequence must contain at least one gate");
  if (gates_.size() > kMaxDepth)
    throw CapacityError("gate sequence depth " + std::to_string(gates_.size()) +
                        " exceeds cap " + std::to_string(kMaxDepth));
}

GateSequence GateSequence::parse(std::string_view text) {
  std::vector<Gate> gates;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    std::string_view tok = text.substr(start, end - start);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    gates.push_back(parse_gate(tok));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return GateSequence(std::move(gates));
}

GateSequence GateSequence::from_index(std::uint64_t index, std::size_t depth) {
  if (depth == 0) throw InputError("sequence depth must be positive");
  if (depth > kMaxDepth) throw CapacityError("sequence depth exceeds cap");
  std::vector<Gate> gates(depth);
  for (std::size_t t = depth; t-- > 0;) {
    gates[t] = static_cast<Gate>(index % kAlphabetSize);
    index /= kAlphabetSize;
  }
  if (index != 0) throw InputError("sequence index out of range for depth");
  return GateSequence(std::move(gates));
}

std::uint64_t GateSequence::index() const {
  std::uint64_t i = 0;
  for (Gate g : gates_) i = i * kAlphabetSize + static_cast<std::uint64_t>(g);
  return i;
}

std::string GateSequence::to_string() const {
  std::string s;
  for (std::size_t t = 0; t < gates_.size(); ++t) {
    if (t) s += ',';
    s += gate_name(gates_[t]);
  }
  return s;
}

std::uint64_t sequence_count(std::size_t depth, std::uint64_t cap) {
  std::uint64_t n = 1;
  for (std::size_t t = 0; t < depth; ++t) {
    n *= kAlphabetSize;
    if (n > cap)
      throw CapacityError("3^" + std::to_string(depth) + " sequences exceed enumeration cap " +
                          std::to_string(cap));
  }
  return n;
}

ObservationLaw ObservationLaw::from_probs(std::vector<double> probs) {
  const std::size_t depth = depth_of_length(probs.size(), "observation law");
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0 + 1e-10)
      throw InputError("observation law entry outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) throw InputError("observation law does not sum to one");
  return ObservationLaw(depth, std::move(probs));
}

ObservationLaw ObservationLaw::point_mass(std::size_t depth, std::size_t index) {
  if (depth == 0 || depth > kMaxDepth) throw InputError("law depth out of range");
  std::vector<double> p(std::size_t{1} << depth, 0.0);
  if (index >= p.size()) throw InputError("point-mass index out of range");
  p[index] = 1.0;
  return ObservationLaw(depth, std::move(p));
}

ObservationLaw ObservationLaw::uniform(std::size_t depth) {
  if (depth == 0 || depth > kMaxDepth) throw InputError("law depth out of range");
  const std::size_t n = std::size_t{1} << depth;
  return ObservationLaw(depth, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ShotHistogram ShotHistogram::from_counts(std::vector<std::uint64_t> counts) {
  const std::size_t depth = depth_of_length(counts.size(), "histogram");
  const std::uint64_t shots = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (shots == 0) throw InputError("histogram must contain at least one shot");
  return ShotHistogram(depth, std::move(counts), shots);
}

void exact_law_into(std::span<const Gate> gates, const KrausPair& kraus, double lambda,
                    StepOrder order, std::span<double> out) {
  BranchTree tree{gates, kraus, lambda, order, out};
  tree.walk(ComplexMat2::projector(0), 0, 0);
  finalize_law(out);
}

ObservationLaw exact_law(const GateSequence& seq, double theta, double lambda, StepOrder order) {
  detail::require_probability(lambda, "depolarizing strength");
  const KrausPair kraus = instrument_kraus(theta);
  std::vector<double> p(std::size_t{1} << seq.depth());
  exact_law_into(seq.gates(), kraus, lambda, order, p);
  return ObservationLaw::from_probs(std::move(p));
}

ObservationLaw joint_law(const GateSequence& seq, const ProbeModel& model, double lambda,
                         StepOrder order) {
  detail::require_probability(lambda, "depolarizing strength");
  const std::size_t k = seq.depth();
  std::vector<double> p(std::size_t{1} << k);
  auto recurse = [&](auto&& self, const QubitState& rho, std::size_t t, std::size_t index) -> void {
    if (t == k) {
      p[index] = rho.trace();
      return;
    }
    const auto branches = joint_step(rho, seq[t], lambda, model, order);
    for (std::size_t y = 0; y < 2; ++y) self(self, branches[y].state, t + 1, 2 * index + y);
  };
  recurse(recurse, QubitState::ground(), 0, 0);
  finalize_law(p);
  return ObservationLaw::from_probs(std::move(p));
}

ShotHistogram sample_histogram(const ObservationLaw& law, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw InputError("shot count must be at least 1");
  Xoshiro256ss rng(seed);
  return ShotHistogram::from_counts(sample_multinomial(rng, shots, law.probs()));
}

ObservationLaw empirical_dist(const ShotHistogram& hist) {
  std::vector<double> p(hist.counts().size());
  const auto n = static_cast<double>(hist.shots());
  std::transform(hist.counts().begin(), hist.counts().end(), p.begin(),
                 [n](std::uint64_t c) { return static_cast<double>(c) / n; });
  return ObservationLaw::from_probs(std::move(p));
}

std::string bitstring(std::size_t index, std::size_t depth) {
  std::string s(depth, '0');
  for (std::size_t t = 0; t < depth; ++t)
    if ((index >> (depth - 1 - t)) & 1U) s[t] = '1';
  return s;
}

}  // namespace probeleak
