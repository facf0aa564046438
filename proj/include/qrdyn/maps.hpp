#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qrdyn/geometry.hpp"
#include "qrdyn/linalg.hpp"

namespace qrdyn {

struct MapMetadata {
  int dimension = 2;
  std::optional<std::uint64_t> degree;
  std::optional<double> inner_dilatation;  // K_I
  bool polynomial_type = false;
  std::string name;         // CLI descriptor name
  std::string description;  // human-readable, includes parameters
};

// An evaluatable quasiregular map plus metadata and the optional exact rules.
// Immutable after construction; evaluation is pure and thread-safe.
class MapInstance {
 public:
  using EvalFn = std::function<Point(const Point&)>;
  using JacobianFn = std::function<Matrix(const Point&)>;
  using PreimageFn = std::function<std::vector<Point>(const Point&)>;

  MapInstance(MapMetadata meta, EvalFn eval, JacobianFn jac = {}, PreimageFn pre = {});

  const MapMetadata& metadata() const noexcept { return meta_; }
  int dim() const noexcept { return meta_.dimension; }

  Point operator()(const Point& x) const { return eval_(x); }
  Point evaluate(const Point& x) const { return eval_(x); }

  bool has_exact_jacobian() const noexcept { return static_cast<bool>(jac_); }
  bool has_exact_preimages() const noexcept { return static_cast<bool>(pre_); }
  Matrix exact_jacobian(const Point& x) const;

  // All solutions of f(x) = y for generic y, deduplicated at 1e-9.
  // Throws MissingOracle when the map has no exact preimage rule.
  std::vector<Point> preimages_exact(const Point& y) const;

  const EvalFn& eval_fn() const noexcept { return eval_; }
  const JacobianFn& jacobian_fn() const noexcept { return jac_; }
  const PreimageFn& preimage_fn() const noexcept { return pre_; }

 private:
  MapMetadata meta_;
  EvalFn eval_;
  JacobianFn jac_;
  PreimageFn pre_;
};

inline constexpr double kPreimageDedupTol = 1e-9;

// (r, φ, y) ↦ (r, kφ, y). Degree k, K_I = k, norm preserving.
MapInstance make_winding(int dim, int k);

// Complex polynomial as a map of R². coeffs[i] multiplies z^i.
MapInstance make_complex_poly(std::vector<std::complex<double>> coeffs);
MapInstance make_zsquared();

// h⁻¹ ∘ z² ∘ h with h = diag(λ, 1).
MapInstance make_conjugated_quadratic(double stretch);

// Zorich-type exponential analogue in R³; essential singularity at ∞.
MapInstance make_zorich();

// f composed k times; degree d^k when known.
MapInstance make_iterate(const MapInstance& f, int k);

// Generic map wrapper, used for fixtures and tests.
MapInstance make_custom(MapMetadata meta, MapInstance::EvalFn eval);

// Deduplicate points closer than tol (first occurrence kept).
std::vector<Point> dedup_points(std::vector<Point> pts, double tol);

// Roots of a complex polynomial (coeffs ascending), clusters of a multiple
// root merged to their mean. Aberth–Ehrlich iteration with Newton polishing.
std::vector<std::complex<double>> polynomial_roots(const std::vector<std::complex<double>>& coeffs);

// Fold, parity and pyramid helpers of the Zorich map, exposed for tests.
namespace zorich_detail {
double fold(double t) noexcept;
int parity(double t) noexcept;
}  // namespace zorich_detail

}  // namespace qrdyn
