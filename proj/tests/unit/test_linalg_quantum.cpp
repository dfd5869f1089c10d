#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "gen.hpp"
#include "probeleak/errors.hpp"
#include "probeleak/linalg.hpp"
#include "probeleak/quantum.hpp"

using namespace probeleak;
namespace t = probeleak::testing;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0, 1};

ComplexMat2 pauli_x() {
  ComplexMat2 x;
  x(0, 1) = 1;
  x(1, 0) = 1;
  return x;
}

double min_eigenvalue(const ComplexMat2& m) { return hermitian_eigenvalues(m)[0]; }

}  // namespace

TEST(Linalg, KronAndPartialTrace) {
  t::Engine e(1);
  const auto a = t::density(e);
  const auto b = t::density(e);
  EXPECT_LT(max_abs_diff(partial_trace_probe(kron(a, b)), a), 1e-14);
  const auto k = kron(ComplexMat2::projector(1), ComplexMat2::projector(0));
  EXPECT_EQ(k(2, 2), cplx(1, 0));
  EXPECT_EQ(k.trace(), cplx(1, 0));
}

TEST(Linalg, HermitianEigenvalues) {
  const auto ev = hermitian_eigenvalues(ComplexMat2::diag(0.25, 0.75));
  EXPECT_NEAR(ev[0], 0.25, 1e-15);
  EXPECT_NEAR(ev[1], 0.75, 1e-15);
  // X has eigenvalues -1, +1.
  const auto xe = hermitian_eigenvalues(pauli_x());
  EXPECT_NEAR(xe[0], -1, 1e-15);
  EXPECT_NEAR(xe[1], 1, 1e-15);
  t::Engine e(2);
  for (int i = 0; i < 200; ++i) {
    const auto rho = t::density(e);
    const auto v = hermitian_eigenvalues(rho);
    const cplx det = rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0);
    EXPECT_NEAR(v[0] + v[1], rho.trace().real(), 1e-14);
    EXPECT_NEAR(v[0] * v[1], det.real(), 1e-14);
  }
}

TEST(Rx, Examples) {
  EXPECT_LT(max_abs_diff(rx(0), ComplexMat2::identity()), 1e-15);
  EXPECT_LT(max_abs_diff(rx(2 * kPi), cplx(-1, 0) * ComplexMat2::identity()), 1e-15);
  EXPECT_LT(max_abs_diff(rx(kPi), -kI * pauli_x()), 1e-15);
}

TEST(Rx, CompositionAndUnitarity) {
  t::Engine e(3);
  for (int i = 0; i < 500; ++i) {
    const double a = t::uniform(e, -10, 10);
    const double b = t::uniform(e, -10, 10);
    EXPECT_LT(max_abs_diff(rx(a) * rx(b), rx(a + b)), 1e-12);
    EXPECT_TRUE(is_unitary(rx(a), 1e-12));
  }
}

TEST(Rx, RejectsNonFinite) {
  EXPECT_THROW(rx(std::numeric_limits<double>::quiet_NaN()), InputError);
  EXPECT_THROW(rx(std::numeric_limits<double>::infinity()), InputError);
  EXPECT_THROW(crx(std::numeric_limits<double>::infinity()), InputError);
}

TEST(Gates, AngleMapIsInjective) {
  EXPECT_DOUBLE_EQ(gate_angle(Gate::G1), kPi / 8);
  EXPECT_DOUBLE_EQ(gate_angle(Gate::G2), kPi / 2);
  EXPECT_DOUBLE_EQ(gate_angle(Gate::G3), kPi);
  EXPECT_EQ(parse_gate("g2"), Gate::G2);
  EXPECT_EQ(gate_name(Gate::G3), "G3");
  EXPECT_THROW(parse_gate("G4"), InputError);
  EXPECT_THROW(parse_gate(""), InputError);
}

TEST(StepOrderTags, RoundTrip) {
  for (auto o : {StepOrder::GateNoiseCoupleMeasure, StepOrder::GateCoupleMeasureNoise})
    EXPECT_EQ(parse_step_order(step_order_tag(o)), o);
  EXPECT_THROW(parse_step_order("noise-first"), InputError);
}

TEST(Crx, Examples) {
  EXPECT_LT(max_abs_diff(crx(0), ComplexMat4::identity()), 1e-15);
  for (double th : {0.3, 1.7, 5.9}) EXPECT_TRUE(is_unitary(crx(th), 1e-12));
  // |1>_A |0>_E has index 2; the image should be -i |1>_A |1>_E (index 3).
  const auto u = crx(kPi);
  for (std::size_t r = 0; r < 4; ++r) {
    const cplx expected = r == 3 ? -kI : cplx(0, 0);
    EXPECT_LT(std::abs(u(r, 2) - expected), 1e-15) << "row " << r;
  }
}

TEST(QubitStateValidation, Rejections) {
  EXPECT_NO_THROW(QubitState::from_matrix(ComplexMat2::diag(0.5, 0.5)));
  EXPECT_THROW(QubitState::from_matrix(ComplexMat2::diag(1.2, 0)), InputError);
  EXPECT_THROW(QubitState::from_matrix(ComplexMat2::diag(1.5, -0.5)), InputError);
  ComplexMat2 non_herm = ComplexMat2::diag(0.5, 0.5);
  non_herm(0, 1) = 0.1;
  EXPECT_THROW(QubitState::from_matrix(non_herm), InputError);
  ComplexMat2 nan = ComplexMat2::diag(std::numeric_limits<double>::quiet_NaN(), 0);
  EXPECT_THROW(QubitState::from_matrix(nan), InputError);
}

TEST(Depolarize, Examples) {
  t::Engine e(4);
  const auto rho = QubitState::from_matrix(t::density(e));
  EXPECT_LT(max_abs_diff(depolarize(rho, 0).matrix(), rho.matrix()), 1e-15);
  const auto g = QubitState::ground();
  EXPECT_LT(max_abs_diff(depolarize(g, 1).matrix(), ComplexMat2::diag(0.5, 0.5)), 1e-15);
  EXPECT_LT(max_abs_diff(depolarize(g, 0.5).matrix(), ComplexMat2::diag(0.75, 0.25)), 1e-15);
  EXPECT_THROW(depolarize(g, -0.01), InputError);
  EXPECT_THROW(depolarize(g, 1.01), InputError);
}

TEST(Depolarize, PreservesTraceAndPositivity) {
  t::Engine e(5);
  for (int i = 0; i < 1000; ++i) {
    const auto rho = QubitState::from_matrix(t::density(e, true));
    const double lambda = t::uniform(e, 0, 1);
    const auto out = depolarize(rho, lambda);
    EXPECT_NEAR(out.trace(), rho.trace(), 1e-12);
    EXPECT_GE(min_eigenvalue(out.matrix()), -1e-10);
  }
}

TEST(InstrumentKraus, Examples) {
  const auto k0 = instrument_kraus(0);
  EXPECT_LT(max_abs_diff(k0.k0, ComplexMat2::identity()), 1e-15);
  EXPECT_LT(max_abs_diff(k0.k1, ComplexMat2::zero()), 1e-15);
  const auto kp = instrument_kraus(kPi);
  EXPECT_LT(max_abs_diff(kp.k0, ComplexMat2::diag(1, 0)), 1e-15);
  EXPECT_LT(max_abs_diff(kp.k1, ComplexMat2::diag(0, -kI)), 1e-15);
}

TEST(InstrumentKraus, MatchesContractionOfCoupling) {
  // K_y = <y|_E crx(theta) |0>_E read straight off the 4x4 matrix.
  t::Engine e(6);
  for (int i = 0; i < 100; ++i) {
    const double th = t::angle(e);
    const auto v = crx(th);
    const auto k = instrument_kraus(th);
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c)
          EXPECT_LT(std::abs(k[y](r, c) - v(2 * r + y, 2 * c)), 1e-15);
  }
}

TEST(InstrumentKraus, CompletenessOnGrid) {
  for (int i = 0; i < 1000; ++i) {
    const double th = 2 * kPi * i / 999.0;
    EXPECT_LT(instrument_kraus(th).completeness_error(), 1e-12) << th;
  }
}

TEST(ConjugateProbe, IdentityLeavesModelUnchanged) {
  const auto m = ProbeModel::controlled_rx(1.1);
  const auto [v, proj] = conjugate_probe(m.coupling, m.projectors, ComplexMat2::identity());
  EXPECT_LT(max_abs_diff(v, m.coupling), 1e-15);
  EXPECT_LT(max_abs_diff(proj[0], m.projectors[0]), 1e-15);
  EXPECT_LT(max_abs_diff(proj[1], m.projectors[1]), 1e-15);
}

TEST(ConjugateProbe, PauliXSwapsProjectors) {
  const auto m = ProbeModel::controlled_rx(0.7);
  const auto [v, proj] = conjugate_probe(m.coupling, m.projectors, pauli_x());
  EXPECT_LT(max_abs_diff(proj[0], m.projectors[1]), 1e-15);
  EXPECT_LT(max_abs_diff(proj[1], m.projectors[0]), 1e-15);
  // Consistent conjugation, including the preparation, keeps step statistics.
  const auto c = conjugate_probe(m, pauli_x());
  t::Engine e(7);
  for (int i = 0; i < 50; ++i) {
    const auto rho = QubitState::from_matrix(t::density(e));
    const auto g = t::gate(e);
    const double l = t::uniform(e, 0, 1);
    const auto a = joint_step(rho, g, l, m);
    const auto b = joint_step(rho, g, l, c);
    for (std::size_t y = 0; y < 2; ++y) EXPECT_NEAR(a[y].probability, b[y].probability, 1e-12);
  }
}

TEST(ConjugateProbe, RejectsNonUnitary) {
  const auto m = ProbeModel::controlled_rx(0.7);
  EXPECT_THROW(conjugate_probe(m.coupling, m.projectors, ComplexMat2::diag(1, 1.001)), InputError);
  EXPECT_THROW(conjugate_probe(m, ComplexMat2::diag(2, 1)), InputError);
}

TEST(JointStepOracle, Examples) {
  t::Engine e(8);
  const auto rho = QubitState::from_matrix(t::density(e));
  const auto b = joint_step_oracle(rho, Gate::G2, 0.0, 0.3);
  EXPECT_NEAR(b[1].probability, 0.0, 1e-15);
  const auto c = joint_step_oracle(QubitState::ground(), Gate::G3, kPi, 0.0);
  EXPECT_NEAR(c[1].probability, 1.0, 1e-12);
  EXPECT_NEAR(c[0].probability, 0.0, 1e-12);
}

TEST(JointStepOracle, SingleStepClosedForm) {
  // From |0><0|: P(y = 1) = [(1 - lambda) sin^2(phi/2) + lambda/2] sin^2(theta/2).
  t::Engine e(9);
  for (int i = 0; i < 200; ++i) {
    const auto g = t::gate(e);
    const double th = t::angle(e);
    const double l = t::uniform(e, 0, 1);
    const double s = std::sin(gate_angle(g) / 2);
    const double h = std::sin(th / 2);
    const double expected = ((1 - l) * s * s + l / 2) * h * h;
    EXPECT_NEAR(joint_step_oracle(QubitState::ground(), g, th, l)[1].probability, expected, 1e-12);
  }
}

TEST(JointStepOracle, AgreesWithKrausPath) {
  t::Engine e(10);
  for (int i = 0; i < 1000; ++i) {
    const auto rho = QubitState::from_matrix(t::density(e, true));
    const auto g = t::gate(e);
    const double th = t::angle(e);
    const double l = t::uniform(e, 0, 1);
    const auto a = joint_step_oracle(rho, g, th, l);
    const auto b = kraus_step(rho, g, l, instrument_kraus(th));
    for (std::size_t y = 0; y < 2; ++y) {
      EXPECT_NEAR(a[y].probability, b[y].probability, 1e-12);
      EXPECT_LT(max_abs_diff(a[y].state.matrix(), b[y].state.matrix()), 1e-12);
    }
    EXPECT_NEAR(a[0].probability + a[1].probability, rho.trace(), 1e-12);
  }
}

TEST(JointStep, NoiseAfterMeasurementAgreesWithKrausPath) {
  t::Engine e(11);
  for (int i = 0; i < 300; ++i) {
    const auto rho = QubitState::from_matrix(t::density(e, true));
    const auto g = t::gate(e);
    const double th = t::angle(e);
    const double l = t::uniform(e, 0, 1);
    const auto a = joint_step(rho, g, l, ProbeModel::controlled_rx(th),
                              StepOrder::GateCoupleMeasureNoise);
    const auto b = kraus_step(rho, g, l, instrument_kraus(th), StepOrder::GateCoupleMeasureNoise);
    for (std::size_t y = 0; y < 2; ++y) {
      EXPECT_NEAR(a[y].probability, b[y].probability, 1e-12);
      EXPECT_LT(max_abs_diff(a[y].state.matrix(), b[y].state.matrix()), 1e-12);
    }
  }
}
