#include "probeleak/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace probeleak {

namespace {

template <std::size_t N>
bool all_finite(const std::array<cplx, N>& a) {
  return std::all_of(a.begin(), a.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

template <std::size_t N>
double max_abs(const std::array<cplx, N>& x, const std::array<cplx, N>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace

ComplexMat2 ComplexMat2::identity() { return diag(1.0, 1.0); }

ComplexMat2 ComplexMat2::diag(cplx d0, cplx d1) {
  ComplexMat2 m;
  m.a[0] = d0;
  m.a[3] = d1;
  return m;
}

ComplexMat2 ComplexMat2::projector(std::size_t i) {
  return i == 0 ? diag(1.0, 0.0) : diag(0.0, 1.0);
}

ComplexMat2 ComplexMat2::adjoint() const {
  ComplexMat2 m;
  m.a = {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
  return m;
}

bool ComplexMat2::is_finite() const { return all_finite(a); }

ComplexMat2& ComplexMat2::operator+=(const ComplexMat2& o) {
  for (std::size_t i = 0; i < 4; ++i) a[i] += o.a[i];
  return *this;
}

ComplexMat2& ComplexMat2::operator-=(const ComplexMat2& o) {
  for (std::size_t i = 0; i < 4; ++i) a[i] -= o.a[i];
  return *this;
}

ComplexMat2& ComplexMat2::operator*=(cplx s) {
  for (auto& z : a) z *= s;
  return *this;
}

ComplexMat2 operator*(const ComplexMat2& x, const ComplexMat2& y) {
  ComplexMat2 m;
  m.a[0] = x.a[0] * y.a[0] + x.a[1] * y.a[2];
  m.a[1] = x.a[0] * y.a[1] + x.a[1] * y.a[3];
  m.a[2] = x.a[2] * y.a[0] + x.a[3] * y.a[2];
  m.a[3] = x.a[2] * y.a[1] + x.a[3] * y.a[3];
  return m;
}

ComplexMat2 operator+(ComplexMat2 x, const ComplexMat2& y) { return x += y; }
ComplexMat2 operator-(ComplexMat2 x, const ComplexMat2& y) { return x -= y; }
ComplexMat2 operator*(cplx s, ComplexMat2 x) { return x *= s; }

ComplexMat4 ComplexMat4::identity() {
  ComplexMat4 m;
  for (std::size_t i = 0; i < 4; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMat4 ComplexMat4::adjoint() const {
  ComplexMat4 m;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) m(r, c) = std::conj((*this)(c, r));
  return m;
}

bool ComplexMat4::is_finite() const { return all_finite(a); }

ComplexMat4 operator*(const ComplexMat4& x, const ComplexMat4& y) {
  ComplexMat4 m;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < 4; ++j) s += x(r, j) * y(j, c);
      m(r, c) = s;
    }
  return m;
}

ComplexMat4 kron(const ComplexMat2& x, const ComplexMat2& y) {
  ComplexMat4 m;
  for (std::size_t ar = 0; ar < 2; ++ar)
    for (std::size_t ac = 0; ac < 2; ++ac)
      for (std::size_t er = 0; er < 2; ++er)
        for (std::size_t ec = 0; ec < 2; ++ec)
          m(2 * ar + er, 2 * ac + ec) = x(ar, ac) * y(er, ec);
  return m;
}

ComplexMat2 partial_trace_probe(const ComplexMat4& m) {
  ComplexMat2 out;
  for (std::size_t ar = 0; ar < 2; ++ar)
    for (std::size_t ac = 0; ac < 2; ++ac)
      out(ar, ac) = m(2 * ar, 2 * ac) + m(2 * ar + 1, 2 * ac + 1);
  return out;
}

double max_abs_diff(const ComplexMat2& x, const ComplexMat2& y) { return max_abs(x.a, y.a); }
double max_abs_diff(const ComplexMat4& x, const ComplexMat4& y) { return max_abs(x.a, y.a); }

std::array<double, 2> hermitian_eigenvalues(const ComplexMat2& m) {
  const double p = m.a[0].real();
  const double q = m.a[3].real();
  const cplx b = 0.5 * (m.a[1] + std::conj(m.a[2]));
  const double mean = 0.5 * (p + q);
  const double half_gap = 0.5 * (p - q);
  const double r = std::hypot(half_gap, std::abs(b));
  return {mean - r, mean + r};
}

bool is_unitary(const ComplexMat2& u, double tol) {
  return u.is_finite() && max_abs_diff(u.adjoint() * u, ComplexMat2::identity()) < tol;
}

bool is_unitary(const ComplexMat4& u, double tol) {
  return u.is_finite() && max_abs_diff(u.adjoint() * u, ComplexMat4::identity()) < tol;
}

}  // namespace probeleak
