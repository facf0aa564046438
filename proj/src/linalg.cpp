#include "qrdyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "qrdyn/error.hpp"

namespace qrdyn {

Matrix operator*(const Matrix& x, const Matrix& y) {
  if (x.n != y.n) throw Error(ErrorCode::DimensionMismatch, "matrix product of different sizes");
  Matrix r{x.n, {}};
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      double s = 0.0;
      for (int k = 0; k < x.n; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

double determinant(const Matrix& m) noexcept {
  if (m.n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Matrix transpose(const Matrix& m) noexcept {
  Matrix t{m.n, {}};
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) t(i, j) = m(j, i);
  return t;
}

namespace {

std::array<double, 3> singular_values_2(const Matrix& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double p = std::hypot(a + d, c - b);
  const double q = std::hypot(a - d, b + c);
  return {0.5 * (p + q), 0.5 * std::abs(p - q), 0.0};
}

// Eigenvalues of a symmetric 3×3 matrix, descending.
std::array<double, 3> symmetric_eigenvalues(const Matrix& s) {
  const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
  std::array<double, 3> ev{s(0, 0), s(1, 1), s(2, 2)};
  if (p1 > 0.0) {
    const double q = (s(0, 0) + s(1, 1) + s(2, 2)) / 3.0;
    const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
                      (s(2, 2) - q) * (s(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Matrix bm = s;
    for (int i = 0; i < 3; ++i) bm(i, i) -= q;
    for (auto& v : bm.a) v /= p;
    const double r = std::clamp(determinant(bm) / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    ev[0] = q + 2.0 * p * std::cos(phi);
    ev[2] = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    ev[1] = 3.0 * q - ev[0] - ev[2];
  }
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::array<double, 3> singular_values_3(const Matrix& m) {
  const Matrix mtm = transpose(m) * m;
  const auto ev = symmetric_eigenvalues(mtm);
  std::array<double, 3> s{std::sqrt(std::max(ev[0], 0.0)), std::sqrt(std::max(ev[1], 0.0)),
                          std::sqrt(std::max(ev[2], 0.0))};
  const double det = std::abs(determinant(m));
  if (s[0] * s[1] > 0.0) s[2] = det / (s[0] * s[1]);
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

}  // namespace

std::array<double, 3> singular_values(const Matrix& m) {
  if (m.n == 2) return singular_values_2(m);
  if (m.n == 3) return singular_values_3(m);
  throw Error(ErrorCode::InvalidArgument, "singular_values supports n = 2, 3");
}

}  // namespace qrdyn
