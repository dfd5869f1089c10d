#include "probeleak/quantum.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "probeleak/errors.hpp"

namespace probeleak {

namespace detail {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InputError(std::string(what) + " must be finite");
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InputError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
}

}  // namespace detail

double gate_angle(Gate g) {
  switch (g) {
    case Gate::G1: return std::numbers::pi / 8.0;
    case Gate::G2: return std::numbers::pi / 2.0;
    case Gate::G3: return std::numbers::pi;
  }
  throw InputError("unknown gate label");
}

std::string_view gate_name(Gate g) {
  switch (g) {
    case Gate::G1: return "G1";
    case Gate::G2: return "G2";
    case Gate::G3: return "G3";
  }
  throw InputError("unknown gate label");
}

Gate parse_gate(std::string_view s) {
  std::string t(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
  if (t == "G1") return Gate::G1;
  if (t == "G2") return Gate::G2;
  if (t == "G3") return Gate::G3;
  throw InputError("unknown gate label '" + std::string(s) + "' (expected G1, G2 or G3)");
}

std::string_view step_order_tag(StepOrder o) {
  return o == StepOrder::GateNoiseCoupleMeasure ? "gncm" : "gcmn";
}

StepOrder parse_step_order(std::string_view tag) {
  if (tag == "gncm") return StepOrder::GateNoiseCoupleMeasure;
  if (tag == "gcmn") return StepOrder::GateCoupleMeasureNoise;
  throw InputError("unknown step order '" + std::string(tag) + "' (expected gncm or gcmn)");
}

QubitState QubitState::from_matrix(const ComplexMat2& m) {
  if (!m.is_finite()) throw InputError("state has non-finite entries");
  if (max_abs_diff(m, m.adjoint()) >= 1e-10) throw InputError("state is not Hermitian");
  const auto ev = hermitian_eigenvalues(m);
  if (ev[0] <= -1e-10) throw InputError("state is not positive semidefinite");
  const double tr = m.trace().real();
  if (tr < -1e-10 || tr > 1.0 + 1e-10) throw InputError("state trace outside [0, 1]");
  return QubitState(m);
}

QubitState QubitState::ground() { return QubitState(ComplexMat2::projector(0)); }

double KrausPair::completeness_error() const {
  const ComplexMat2 s = k0.adjoint() * k0 + k1.adjoint() * k1;
  return max_abs_diff(s, ComplexMat2::identity());
}

ComplexMat2 rx(double angle) {
  detail::require_finite(angle, "rotation angle");
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  ComplexMat2 m;
  m.a = {cplx(c, 0.0), cplx(0.0, -s), cplx(0.0, -s), cplx(c, 0.0)};
  return m;
}

ComplexMat2 gate_unitary(Gate g) { return rx(gate_angle(g)); }

ComplexMat4 crx(double theta) {
  detail::require_finite(theta, "coupling angle");
  const ComplexMat2 r = rx(theta);
  ComplexMat4 m;
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) m(2 + i, 2 + j) = r(i, j);
  return m;
}

QubitState depolarize(const QubitState& rho, double lambda) {
  detail::require_probability(lambda, "depolarizing strength");
  return QubitState::from_matrix(detail::depolarize_raw(rho.matrix(), lambda));
}

KrausPair instrument_kraus(double theta) {
  detail::require_finite(theta, "coupling angle");
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return {ComplexMat2::diag(1.0, c), ComplexMat2::diag(0.0, cplx(0.0, -s))};
}

ProbeModel ProbeModel::controlled_rx(double theta) {
  return {crx(theta), {ComplexMat2::projector(0), ComplexMat2::projector(1)},
          ComplexMat2::projector(0)};
}

std::pair<ComplexMat4, std::array<ComplexMat2, 2>> conjugate_probe(
    const ComplexMat4& v, const std::array<ComplexMat2, 2>& projectors, const ComplexMat2& w) {
  if (!is_unitary(w, 1e-10)) throw InputError("probe basis change W is not unitary");
  const ComplexMat4 lift = kron(ComplexMat2::identity(), w);
  return {conjugate(lift, v), {conjugate(w, projectors[0]), conjugate(w, projectors[1])}};
}

ProbeModel conjugate_probe(const ProbeModel& model, const ComplexMat2& w) {
  auto [v, proj] = conjugate_probe(model.coupling, model.projectors, w);
  return {v, proj, conjugate(w, model.preparation)};
}

namespace {

std::array<Branch, 2> couple_and_measure(const ComplexMat2& rho, const ProbeModel& model) {
  const ComplexMat4 joint = conjugate(model.coupling, kron(rho, model.preparation));
  std::array<Branch, 2> out{Branch{0.0, QubitState::ground()}, Branch{0.0, QubitState::ground()}};
  for (std::size_t y = 0; y < 2; ++y) {
    const ComplexMat4 lift = kron(ComplexMat2::identity(), model.projectors[y]);
    const ComplexMat2 post = partial_trace_probe(lift * joint * lift);
    out[y] = Branch{post.trace().real(), QubitState::from_matrix(post)};
  }
  return out;
}

}  // namespace

std::array<Branch, 2> joint_step(const QubitState& rho, Gate gate, double lambda,
                                 const ProbeModel& model, StepOrder order) {
  detail::require_probability(lambda, "depolarizing strength");
  // Gate (x) I on the joint state equals U rho U^dag on A before the probe
  // is attached, but is applied on the 4x4 state here to stay independent of
  // the single-qubit path.
  const ComplexMat4 gate_lift = kron(gate_unitary(gate), ComplexMat2::identity());
  const ComplexMat4 joint = conjugate(gate_lift, kron(rho.matrix(), ComplexMat2::projector(0)));
  ComplexMat2 a = partial_trace_probe(joint);
  if (order == StepOrder::GateNoiseCoupleMeasure) a = detail::depolarize_raw(a, lambda);
  auto branches = couple_and_measure(a, model);
  if (order == StepOrder::GateCoupleMeasureNoise) {
    for (auto& b : branches)
      b.state = QubitState::from_matrix(detail::depolarize_raw(b.state.matrix(), lambda));
  }
  return branches;
}

std::array<Branch, 2> joint_step_oracle(const QubitState& rho, Gate gate, double theta,
                                        double lambda) {
  return joint_step(rho, gate, lambda, ProbeModel::controlled_rx(theta));
}

std::array<Branch, 2> kraus_step(const QubitState& rho, Gate gate, double lambda,
                                 const KrausPair& kraus, StepOrder order) {
  detail::require_probability(lambda, "depolarizing strength");
  ComplexMat2 a = conjugate(gate_unitary(gate), rho.matrix());
  if (order == StepOrder::GateNoiseCoupleMeasure) a = detail::depolarize_raw(a, lambda);
  std::array<Branch, 2> out{Branch{0.0, QubitState::ground()}, Branch{0.0, QubitState::ground()}};
  for (std::size_t y = 0; y < 2; ++y) {
    ComplexMat2 post = conjugate(kraus[y], a);
    if (order == StepOrder::GateCoupleMeasureNoise) post = detail::depolarize_raw(post, lambda);
    out[y] = Branch{post.trace().real(), QubitState::from_matrix(post)};
  }
  return out;
}

}  // namespace probeleak
