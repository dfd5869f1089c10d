#pragma once

// Single-qubit algebra for the sequential probe protocol: Alice's gate
// alphabet, the depolarizing channel, the controlled-Rx coupling, and the
// two-outcome instrument it induces on Alice's qubit once the probe is
// prepared in |0>, coupled, and read out in Z.
//
// Conventions used everywhere in the project:
//   rx(phi) = cos(phi/2) I - i sin(phi/2) X, so rx(pi)|0> = -i|1>;
//   two-qubit operators act on A (x) E with A the most significant factor.

#include <array>
#include <string>
#include <string_view>
#include <utility>

#include "probeleak/linalg.hpp"

namespace probeleak {

// Alice's commuting alphabet {Rx(pi/8), Rx(pi/2), Rx(pi)}.
enum class Gate : unsigned char { G1 = 0, G2 = 1, G3 = 2 };

inline constexpr std::size_t kAlphabetSize = 3;
inline constexpr std::array<Gate, kAlphabetSize> kAlphabet = {Gate::G1, Gate::G2, Gate::G3};

double gate_angle(Gate g);
std::string_view gate_name(Gate g);
// Accepts "G1".."G3" (case-insensitive); throws InputError otherwise.
Gate parse_gate(std::string_view s);

// Where the depolarizing channel sits inside one timestep.
enum class StepOrder {
  GateNoiseCoupleMeasure,  // default
  GateCoupleMeasureNoise,
};

std::string_view step_order_tag(StepOrder o);  // "gncm" / "gcmn"
StepOrder parse_step_order(std::string_view tag);

// Possibly sub-normalized density matrix of Alice's qubit; the trace carries
// the probability of the branch that produced it.
class QubitState {
 public:
  // Throws InputError unless m is finite, Hermitian (1e-10), PSD (1e-10) and
  // has trace in [0, 1 + 1e-10].
  static QubitState from_matrix(const ComplexMat2& m);
  static QubitState ground();  // |0><0|

  [[nodiscard]] const ComplexMat2& matrix() const { return m_; }
  [[nodiscard]] double trace() const { return m_.trace().real(); }

 private:
  explicit QubitState(const ComplexMat2& m) : m_(m) {}
  ComplexMat2 m_;
};

// Effective instrument on A for probe outcomes y = 0, 1.
struct KrausPair {
  ComplexMat2 k0;
  ComplexMat2 k1;

  [[nodiscard]] const ComplexMat2& operator[](std::size_t y) const { return y == 0 ? k0 : k1; }
  // max-entry deviation of k0^dag k0 + k1^dag k1 from I.
  [[nodiscard]] double completeness_error() const;
};

ComplexMat2 rx(double angle);
ComplexMat2 gate_unitary(Gate g);

// diag(I, rx(theta)) on A (x) E: rotate the probe when A is |1>.
ComplexMat4 crx(double theta);

// (1 - lambda) rho + lambda tr(rho) I/2.
QubitState depolarize(const QubitState& rho, double lambda);

// K_y = <y|_E crx(theta) |0>_E = diag(1, cos(theta/2)), diag(0, -i sin(theta/2)).
KrausPair instrument_kraus(double theta);

// Coupling, readout projectors and probe preparation. Consistent conjugation
// of all three by a probe unitary leaves every observation law unchanged.
struct ProbeModel {
  ComplexMat4 coupling;
  std::array<ComplexMat2, 2> projectors;
  ComplexMat2 preparation;  // probe density matrix before each coupling

  static ProbeModel controlled_rx(double theta);
};

// ((I (x) W) V (I (x) W^dag), {W M_y W^dag}). Throws InputError if W is not
// unitary within 1e-10.
std::pair<ComplexMat4, std::array<ComplexMat2, 2>> conjugate_probe(
    const ComplexMat4& v, const std::array<ComplexMat2, 2>& projectors, const ComplexMat2& w);

// Full basis change on the probe, including the preparation W|0><0|W^dag.
ProbeModel conjugate_probe(const ProbeModel& model, const ComplexMat2& w);

struct Branch {
  double probability;
  QubitState state;  // sub-normalized; trace == probability
};

// One timestep evaluated through the explicit 4x4 joint state: attach the
// probe, apply gate (x) I, depolarize A, couple, project the probe onto |y>,
// trace the probe out. Independent of instrument_kraus by construction.
std::array<Branch, 2> joint_step_oracle(const QubitState& rho, Gate gate, double theta,
                                        double lambda);

// Same step for an arbitrary probe model and either noise placement.
std::array<Branch, 2> joint_step(const QubitState& rho, Gate gate, double lambda,
                                 const ProbeModel& model,
                                 StepOrder order = StepOrder::GateNoiseCoupleMeasure);

// One timestep through the effective instrument: K_y D(U rho U^dag) K_y^dag.
std::array<Branch, 2> kraus_step(const QubitState& rho, Gate gate, double lambda,
                                 const KrausPair& kraus,
                                 StepOrder order = StepOrder::GateNoiseCoupleMeasure);

namespace detail {

// Unvalidated depolarizing map on a raw matrix; used by the hot loops.
inline ComplexMat2 depolarize_raw(const ComplexMat2& rho, double lambda) {
  const double keep = 1.0 - lambda;
  const cplx mix = 0.5 * lambda * rho.trace();
  ComplexMat2 out;
  out.a = {keep * rho.a[0] + mix, keep * rho.a[1], keep * rho.a[2], keep * rho.a[3] + mix};
  return out;
}

void require_finite(double x, const char* what);
void require_probability(double p, const char* what);

}  // namespace detail

}  // namespace probeleak
