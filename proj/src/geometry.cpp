#include "qrdyn/geometry.hpp"

#include <numbers>
#include <string>

#include "qrdyn/error.hpp"

namespace qrdyn {

void require_supported_dim(int dim) {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorCode::InvalidArgument,
                "dimension must be 2 or 3, got " + std::to_string(dim));
  }
}

Point Point::checked(std::span<const double> coords) {
  require_supported_dim(static_cast<int>(coords.size()));
  Point p(static_cast<int>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i])) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
    p[static_cast<int>(i)] = coords[i];
  }
  return p;
}

double distance(const Point& a, const Point& b) noexcept { return (a - b).norm(); }

BoxRegion::BoxRegion(const Point& low, const Point& high) : low_(low), high_(high) {
  if (low.dim() != high.dim()) throw Error(ErrorCode::DimensionMismatch, "box corners differ in dimension");
  require_supported_dim(low.dim());
  for (int i = 0; i < low.dim(); ++i) {
    if (!(low[i] < high[i]) || !std::isfinite(low[i]) || !std::isfinite(high[i])) {
      throw Error(ErrorCode::InvalidArgument, "box requires finite low < high on every axis");
    }
  }
}

BoxRegion BoxRegion::cube(int dim, double lo, double hi) {
  require_supported_dim(dim);
  Point l(dim), h(dim);
  for (int i = 0; i < dim; ++i) {
    l[i] = lo;
    h[i] = hi;
  }
  return {l, h};
}

bool BoxRegion::contains(const Point& p) const noexcept {
  for (int i = 0; i < dim(); ++i) {
    if (p[i] < low_[i] || p[i] > high_[i]) return false;
  }
  return true;
}

bool BoxRegion::contains_ball(double r) const noexcept {
  for (int i = 0; i < dim(); ++i) {
    if (low_[i] > -r || high_[i] < r) return false;
  }
  return true;
}

namespace {
void require_same_dim(const ExtendedPoint& a, const ExtendedPoint& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");
}
}  // namespace

double chordal_distance(const ExtendedPoint& a, const ExtendedPoint& b) {
  require_same_dim(a, b);
  if (a.is_infinity() && b.is_infinity()) return 0.0;
  if (a.is_infinity()) return 1.0 / std::hypot(1.0, b.point().norm());
  if (b.is_infinity()) return 1.0 / std::hypot(1.0, a.point().norm());
  const double ha = std::hypot(1.0, a.point().norm());
  const double hb = std::hypot(1.0, b.point().norm());
  // Larger factor first: symmetric in a, b and no overflow of ha·hb.
  return (distance(a.point(), b.point()) / std::max(ha, hb)) / std::min(ha, hb);
}

ExtendedPoint invert_sphere(const ExtendedPoint& x) {
  if (x.is_infinity()) return Point::zero(x.dim());
  const Point& p = x.point();
  const double n2 = p.norm2();
  if (n2 == 0.0) return ExtendedPoint::infinity(x.dim());
  return p * (1.0 / n2);
}

CylindricalPoint cart_to_cyl(const Point& x) {
  CylindricalPoint c;
  c.dim = x.dim();
  c.r = std::hypot(x[0], x[1]);
  if (c.r > 0.0) {
    double phi = std::atan2(x[1], x[0]);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
    c.phi = phi;
  }
  c.y = x.dim() == 3 ? x[2] : 0.0;
  return c;
}

Point cyl_to_cart(const CylindricalPoint& c) {
  Point p(c.dim);
  p[0] = c.r * std::cos(c.phi);
  p[1] = c.r * std::sin(c.phi);
  if (c.dim == 3) p[2] = c.y;
  return p;
}

}  // namespace qrdyn
