#pragma once

#include <array>
#include <cstddef>

namespace qrdyn {

// Dense n×n matrix, n ∈ {2, 3}, row-major.
struct Matrix {
  int n = 2;
  std::array<double, 9> a{};

  static Matrix identity(int n) {
    Matrix m{n, {}};
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  double operator()(int i, int j) const noexcept { return a[static_cast<std::size_t>(i * 3 + j)]; }
  double& operator()(int i, int j) noexcept { return a[static_cast<std::size_t>(i * 3 + j)]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

Matrix operator*(const Matrix& x, const Matrix& y);
double determinant(const Matrix& m) noexcept;
Matrix transpose(const Matrix& m) noexcept;

// Singular values sorted descending. Closed form for n = 2; eigenvalues of
// MᵀM by the trigonometric cubic for n = 3, with the smallest recovered from
// |det| to keep Πσ_i = |det M| tight.
std::array<double, 3> singular_values(const Matrix& m);

}  // namespace qrdyn
