#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace probeleak {

using cplx = std::complex<double>;

// Row-major 2x2 complex matrix.
struct ComplexMat2 {
  std::array<cplx, 4> a{};

  constexpr cplx& operator()(std::size_t r, std::size_t c) { return a[r * 2 + c]; }
  constexpr const cplx& operator()(std::size_t r, std::size_t c) const { return a[r * 2 + c]; }

  static ComplexMat2 identity();
  static ComplexMat2 zero() { return {}; }
  static ComplexMat2 diag(cplx d0, cplx d1);
  // |i><i| for i in {0, 1}.
  static ComplexMat2 projector(std::size_t i);

  [[nodiscard]] ComplexMat2 adjoint() const;
  [[nodiscard]] cplx trace() const { return a[0] + a[3]; }
  [[nodiscard]] bool is_finite() const;

  ComplexMat2& operator+=(const ComplexMat2& o);
  ComplexMat2& operator-=(const ComplexMat2& o);
  ComplexMat2& operator*=(cplx s);
};

ComplexMat2 operator*(const ComplexMat2& x, const ComplexMat2& y);
ComplexMat2 operator+(ComplexMat2 x, const ComplexMat2& y);
ComplexMat2 operator-(ComplexMat2 x, const ComplexMat2& y);
ComplexMat2 operator*(cplx s, ComplexMat2 x);

// Row-major 4x4 complex matrix on A (x) E, A the high factor: basis index
// is 2*a + e.
struct ComplexMat4 {
  std::array<cplx, 16> a{};

  constexpr cplx& operator()(std::size_t r, std::size_t c) { return a[r * 4 + c]; }
  constexpr const cplx& operator()(std::size_t r, std::size_t c) const { return a[r * 4 + c]; }

  static ComplexMat4 identity();

  [[nodiscard]] ComplexMat4 adjoint() const;
  [[nodiscard]] cplx trace() const { return a[0] + a[5] + a[10] + a[15]; }
  [[nodiscard]] bool is_finite() const;
};

ComplexMat4 operator*(const ComplexMat4& x, const ComplexMat4& y);

// X (x) Y with X on A and Y on E.
ComplexMat4 kron(const ComplexMat2& x, const ComplexMat2& y);

// Tr_E of a 4x4 operator.
ComplexMat2 partial_trace_probe(const ComplexMat4& m);

// U rho U^dagger.
inline ComplexMat2 conjugate(const ComplexMat2& u, const ComplexMat2& rho) {
  return u * rho * u.adjoint();
}
inline ComplexMat4 conjugate(const ComplexMat4& u, const ComplexMat4& rho) {
  return u * rho * u.adjoint();
}

// Largest entrywise modulus of x - y.
double max_abs_diff(const ComplexMat2& x, const ComplexMat2& y);
double max_abs_diff(const ComplexMat4& x, const ComplexMat4& y);

// Eigenvalues of a Hermitian 2x2 matrix, ascending, via the closed form
// (t/2) -/+ sqrt((d/2)^2 + |b|^2). The anti-Hermitian part is ignored.
std::array<double, 2> hermitian_eigenvalues(const ComplexMat2& m);

bool is_unitary(const ComplexMat2& u, double tol);
bool is_unitary(const ComplexMat4& u, double tol);

}  // namespace probeleak
