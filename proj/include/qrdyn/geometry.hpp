#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>

namespace qrdyn {

// A point of R^n for n in {2, 3}. Unused trailing coordinates are zero.
// Arithmetic is unchecked; use Point::checked when building from user input.
class Point {
 public:
  static constexpr int kMaxDim = 3;

  Point() = default;
  explicit Point(int dim) : dim_(dim) {}
  Point(double x, double y) : v_{x, y, 0.0}, dim_(2) {}
  Point(double x, double y, double z) : v_{x, y, z}, dim_(3) {}

  // Validates dimension and finiteness.
  static Point checked(std::span<const double> coords);
  static Point zero(int dim) { return Point(dim); }

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return v_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return v_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept { return {v_.data(), static_cast<std::size_t>(dim_)}; }

  double norm2() const noexcept { return v_[0] * v_[0] + v_[1] * v_[1] + v_[2] * v_[2]; }
  double norm() const noexcept { return std::hypot(v_[0], v_[1], v_[2]); }
  bool is_finite() const noexcept {
    return std::isfinite(v_[0]) && std::isfinite(v_[1]) && std::isfinite(v_[2]);
  }

  Point& operator+=(const Point& o) noexcept {
    for (std::size_t i = 0; i < 3; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Point& operator-=(const Point& o) noexcept {
    for (std::size_t i = 0; i < 3; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Point& operator*=(double s) noexcept {
    for (auto& c : v_) c *= s;
    return *this;
  }
  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator*(Point a, double s) noexcept { return a *= s; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }
  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::array<double, 3> v_{0.0, 0.0, 0.0};
  int dim_ = 2;
};

double distance(const Point& a, const Point& b) noexcept;

// A point of the compactified space R^n ∪ {∞}.
class ExtendedPoint {
 public:
  ExtendedPoint(const Point& p) : point_(p), dim_(p.dim()) {}  // NOLINT: implicit by intent
  static ExtendedPoint infinity(int dim) { return ExtendedPoint(dim); }

  bool is_infinity() const noexcept { return !point_.has_value(); }
  const Point& point() const { return point_.value(); }
  int dim() const noexcept { return dim_; }

  friend bool operator==(const ExtendedPoint&, const ExtendedPoint&) = default;

 private:
  explicit ExtendedPoint(int dim) : dim_(dim) {}
  std::optional<Point> point_;
  int dim_;
};

// Axis-aligned box with low_i < high_i on every axis.
class BoxRegion {
 public:
  BoxRegion(const Point& low, const Point& high);
  // The cube [lo, hi]^dim.
  static BoxRegion cube(int dim, double lo, double hi);

  int dim() const noexcept { return low_.dim(); }
  const Point& low() const noexcept { return low_; }
  const Point& high() const noexcept { return high_; }
  double width(int axis) const noexcept { return high_[axis] - low_[axis]; }
  Point center() const noexcept { return 0.5 * (low_ + high_); }
  bool contains(const Point& p) const noexcept;
  // True when the closed ball B(0, r) lies inside the box.
  bool contains_ball(double r) const noexcept;

  friend bool operator==(const BoxRegion&, const BoxRegion&) = default;

 private:
  Point low_;
  Point high_;
};

struct CylindricalPoint {
  double r = 0.0;
  double phi = 0.0;  // [0, 2π); 0 when r == 0
  double y = 0.0;    // the extra coordinate when dim == 3
  int dim = 2;
};

// Chordal metric on the sphere of diameter 1: q(0, ∞) = 1.
double chordal_distance(const ExtendedPoint& a, const ExtendedPoint& b);

// Inversion in the unit sphere, x ↦ x/|x|², swapping 0 and ∞.
ExtendedPoint invert_sphere(const ExtendedPoint& x);

CylindricalPoint cart_to_cyl(const Point& x);
Point cyl_to_cart(const CylindricalPoint& c);

// Validates n ∈ {2, 3}.
void require_supported_dim(int dim);

}  // namespace qrdyn
