#include "qrdyn/maps.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "qrdyn/error.hpp"

namespace qrdyn {

MapInstance::MapInstance(MapMetadata meta, EvalFn eval, JacobianFn jac, PreimageFn pre)
    : meta_(std::move(meta)), eval_(std::move(eval)), jac_(std::move(jac)), pre_(std::move(pre)) {
  require_supported_dim(meta_.dimension);
  if (meta_.polynomial_type && (!meta_.degree || *meta_.degree == 0)) {
    throw Error(ErrorCode::InvalidArgument, "polynomial-type map needs a finite degree");
  }
  if (meta_.inner_dilatation && !(*meta_.inner_dilatation >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "K_I must be ≥ 1");
  }
  if (!eval_) throw Error(ErrorCode::InvalidArgument, "map without evaluation rule");
}

Matrix MapInstance::exact_jacobian(const Point& x) const {
  if (!jac_) throw Error(ErrorCode::MissingOracle, meta_.name + " has no exact Jacobian");
  return jac_(x);
}

std::vector<Point> MapInstance::preimages_exact(const Point& y) const {
  if (!pre_) throw Error(ErrorCode::MissingOracle, meta_.name + " has no exact preimage rule");
  if (y.dim() != dim()) throw Error(ErrorCode::DimensionMismatch, "target dimension");
  return dedup_points(pre_(y), kPreimageDedupTol);
}

std::vector<Point> dedup_points(std::vector<Point> pts, double tol) {
  std::vector<Point> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : out) {
      if (distance(p, q) <= tol * std::max(1.0, q.norm())) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------- winding

MapInstance make_winding(int dim, int k) {
  require_supported_dim(dim);
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "winding map needs k ≥ 2 (k = 1 is injective)");
  MapMetadata meta;
  meta.dimension = dim;
  meta.degree = static_cast<std::uint64_t>(k);
  meta.inner_dilatation = static_cast<double>(k);
  meta.polynomial_type = true;
  meta.name = "winding";
  meta.description = "winding map (r, phi, y) -> (r, " + std::to_string(k) + " phi, y) in R^" +
                     std::to_string(dim);
  const double kk = static_cast<double>(k);

  auto eval = [kk](const Point& x) {
    Point out = x;
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return out;
    const double phi = std::atan2(x[1], x[0]);
    out[0] = r * std::cos(kk * phi);
    out[1] = r * std::sin(kk * phi);
    return out;
  };
  auto jac = [kk, dim](const Point& x) {
    Matrix m = Matrix::identity(dim);
    const double phi = std::atan2(x[1], x[0]);
    const double c = std::cos(phi), s = std::sin(phi);
    const double ck = std::cos(kk * phi), sk = std::sin(kk * phi);
    m(0, 0) = c * ck + s * kk * sk;
    m(1, 0) = c * sk - s * kk * ck;
    m(0, 1) = s * ck - c * kk * sk;
    m(1, 1) = s * sk + c * kk * ck;
    return m;
  };
  auto pre = [k, kk](const Point& y) {
    const CylindricalPoint c = cart_to_cyl(y);
    if (c.r == 0.0) return std::vector<Point>{y};
    std::vector<Point> out;
    for (int j = 0; j < k; ++j) {
      CylindricalPoint p = c;
      p.phi = (c.phi + 2.0 * std::numbers::pi * j) / kk;
      out.push_back(cyl_to_cart(p));
    }
    return out;
  };
  return MapInstance(std::move(meta), eval, jac, pre);
}

// ------------------------------------------------------ complex polynomials

MapInstance make_complex_poly(std::vector<std::complex<double>> coeffs) {
  if (!coeffs.empty() && coeffs.back() == std::complex<double>(0.0)) {
    throw Error(ErrorCode::InvalidArgument, "leading coefficient must be nonzero");
  }
  if (coeffs.size() < 3) throw Error(ErrorCode::InvalidArgument, "complex polynomial needs degree ≥ 2");
  for (const auto& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
    }
  }
  MapMetadata meta;
  meta.dimension = 2;
  meta.degree = coeffs.size() - 1;
  meta.inner_dilatation = 1.0;
  meta.polynomial_type = true;
  meta.name = "complex_poly";
  std::ostringstream desc;
  desc.precision(17);
  desc << "complex polynomial, ascending coefficients";
  for (const auto& c : coeffs) desc << " (" << c.real() << "," << c.imag() << ")";
  meta.description = desc.str();

  auto eval = [coeffs](const Point& x) {
    const std::complex<double> z(x[0], x[1]);
    std::complex<double> p = coeffs.back();
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) p = p * z + coeffs[i];
    return Point(p.real(), p.imag());
  };
  auto jac = [coeffs](const Point& x) {
    const std::complex<double> z(x[0], x[1]);
    std::complex<double> p = coeffs.back(), dp = 0.0;
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
      dp = dp * z + p;
      p = p * z + coeffs[i];
    }
    Matrix m{2, {}};
    m(0, 0) = dp.real();
    m(0, 1) = -dp.imag();
    m(1, 0) = dp.imag();
    m(1, 1) = dp.real();
    return m;
  };
  auto pre = [coeffs](const Point& y) {
    auto shifted = coeffs;
    shifted[0] -= std::complex<double>(y[0], y[1]);
    std::vector<Point> out;
    for (const auto& r : polynomial_roots(shifted)) out.emplace_back(r.real(), r.imag());
    return out;
  };
  return MapInstance(std::move(meta), eval, jac, pre);
}

MapInstance make_zsquared() {
  auto f = make_complex_poly({0.0, 0.0, 1.0});
  MapMetadata meta = f.metadata();
  meta.name = "zsquared";
  meta.description = "z^2 on R^2";
  return MapInstance(std::move(meta), f.eval_fn(), f.jacobian_fn(), f.preimage_fn());
}

// -------------------------------------------------- conjugated quadratic

MapInstance make_conjugated_quadratic(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "conjugated quadratic needs lambda > 1");
  }
  MapMetadata meta;
  meta.dimension = 2;
  meta.degree = 2;
  meta.polynomial_type = true;
  meta.name = "conjugated_quadratic";
  std::ostringstream desc;
  desc.precision(17);
  desc << "h^-1 o z^2 o h with h = diag(" << lambda << ", 1); uniformly quasiregular";
  meta.description = desc.str();

  auto eval = [lambda](const Point& x) {
    return Point((lambda * lambda * x[0] * x[0] - x[1] * x[1]) / lambda, 2.0 * lambda * x[0] * x[1]);
  };
  auto jac = [lambda](const Point& x) {
    Matrix m{2, {}};
    m(0, 0) = 2.0 * lambda * x[0];
    m(0, 1) = -2.0 * x[1] / lambda;
    m(1, 0) = 2.0 * lambda * x[1];
    m(1, 1) = 2.0 * lambda * x[0];
    return m;
  };
  return MapInstance(std::move(meta), eval, jac);
}

// ----------------------------------------------------------------- Zorich

namespace zorich_detail {

double fold(double t) noexcept {
  double m = std::fmod(t + 1.0, 4.0);
  if (m < 0.0) m += 4.0;
  return 1.0 - std::abs(m - 2.0);
}

int parity(double t) noexcept {
  if (!std::isfinite(t)) return 0;
  double p = std::fmod(std::floor((t + 1.0) / 2.0), 2.0);
  if (p < 0.0) p += 2.0;
  return p >= 1.0 ? 1 : 0;
}

}  // namespace zorich_detail

MapInstance make_zorich() {
  MapMetadata meta;
  meta.dimension = 3;
  meta.polynomial_type = false;
  meta.name = "zorich";
  meta.description =
      "Zorich-type map e^{x3} * s * h(fold(x1), fold(x2)); infinity-norm pyramid on the unit "
      "sphere; essential singularity at infinity";
  auto eval = [](const Point& x) {
    using namespace zorich_detail;
    const double u = fold(x[0]);
    const double v = fold(x[1]);
    double w = 1.0 - std::max(std::abs(u), std::abs(v));
    if ((parity(x[0]) + parity(x[1])) % 2 == 1) w = -w;
    const double scale = std::exp(x[2]) / std::hypot(u, v, w);
    return Point(scale * u, scale * v, scale * w);
  };
  return MapInstance(std::move(meta), eval);
}

// --------------------------------------------------------------- iterates

MapInstance make_iterate(const MapInstance& f, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "iterate needs k ≥ 1");
  if (k == 1) return f;
  MapMetadata meta = f.metadata();
  if (meta.degree) {
    std::uint64_t d = 1;
    for (int i = 0; i < k; ++i) {
      if (d > std::numeric_limits<std::uint64_t>::max() / *meta.degree) {
        throw Error(ErrorCode::DegreeOverflow, "degree d^k exceeds 64 bits");
      }
      d *= *meta.degree;
    }
    meta.degree = d;
  }
  // K_I is submultiplicative; K_I^k is exact for the conformal and winding
  // families and an upper bound otherwise.
  if (meta.inner_dilatation) {
    const double ki = std::pow(*meta.inner_dilatation, k);
    meta.inner_dilatation = std::isfinite(ki) ? std::optional<double>(ki) : std::nullopt;
  }
  meta.description = "(" + meta.description + ")^" + std::to_string(k);

  auto base = f.eval_fn();
  auto eval = [base, k](const Point& x) {
    Point p = x;
    for (int i = 0; i < k; ++i) p = base(p);
    return p;
  };
  MapInstance::JacobianFn jac;
  if (f.has_exact_jacobian()) {
    auto bj = f.jacobian_fn();
    jac = [base, bj, k](const Point& x) {
      Point p = x;
      Matrix m = bj(p);
      for (int i = 1; i < k; ++i) {
        p = base(p);
        m = bj(p) * m;
      }
      return m;
    };
  }
  MapInstance::PreimageFn pre;
  if (f.has_exact_preimages()) {
    auto bp = f.preimage_fn();
    pre = [bp, k](const Point& y) {
      std::vector<Point> layer{y};
      for (int i = 0; i < k; ++i) {
        std::vector<Point> next;
        for (const auto& q : layer) {
          for (const auto& p : dedup_points(bp(q), kPreimageDedupTol)) next.push_back(p);
        }
        layer = dedup_points(std::move(next), kPreimageDedupTol);
      }
      return layer;
    };
  }
  return MapInstance(std::move(meta), eval, jac, pre);
}

MapInstance make_custom(MapMetadata meta, MapInstance::EvalFn eval) {
  return MapInstance(std::move(meta), std::move(eval));
}

}  // namespace qrdyn
