#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrdyn/geometry.hpp"
#include "qrdyn/linalg.hpp"
#include "qrdyn/maps.hpp"

namespace qrdyn {

// Central differences; columns are partial derivatives.
Matrix numeric_jacobian(const MapInstance& f, const Point& x, double h);
// Default step 1e-5·max(1, |x|).
Matrix numeric_jacobian(const MapInstance& f, const Point& x);

struct DilatationQuotients {
  double outer = 1.0;  // σ₁ⁿ / det
  double inner = 1.0;  // det / σₙⁿ
};

// Pointwise quotients from the numeric Jacobian. Throws BranchPointSuspected
// when det ≤ 1e-12·σ₁ⁿ.
DilatationQuotients dilatation_at(const MapInstance& f, const Point& x);
// Non-throwing form for sampling loops.
std::optional<DilatationQuotients> try_dilatation_at(const MapInstance& f, const Point& x);

struct DilatationEstimate {
  double outer = 1.0;  // K_O estimate (sampled sup)
  double inner = 1.0;  // K_I estimate (sampled sup)
  std::size_t samples_used = 0;
  Point argmax_point;  // where max(K_O, K_I) was attained
  std::size_t rejected_near_branch = 0;

  double maximal() const noexcept { return outer > inner ? outer : inner; }
};

// Sampled sup of the pointwise quotients over a Halton sample of the box.
// OpenMP over samples with a serial max-reduction; result independent of
// thread count.
DilatationEstimate estimate_dilatation(const MapInstance& f, const BoxRegion& region,
                                       std::size_t samples, std::uint64_t seed = 0);

enum class DegreeMethod { ExactOracle, Subdivision };
std::string to_string(DegreeMethod m);

struct DegreeEstimate {
  std::uint64_t count = 0;
  DegreeMethod method = DegreeMethod::ExactOracle;
  std::vector<Point> target_points;
};

struct DegreeOptions {
  bool force_subdivision = false;
  double min_diameter = 1e-6;
  double cluster_tol = 1e-4;
  std::size_t max_boxes = 1u << 22;
};

// Max preimage count over the targets: exact oracle when present, otherwise
// Lipschitz-pruned box subdivision of `search` (heuristic).
DegreeEstimate estimate_degree(const MapInstance& f, const std::vector<Point>& targets,
                               const BoxRegion& search, const DegreeOptions& opts = {});

// Preimages of y inside `search` by subdivision; one representative per cluster.
std::vector<Point> subdivision_preimages(const MapInstance& f, const Point& y,
                                         const BoxRegion& search, const DegreeOptions& opts = {});

// Local topological index: preimages inside B(x, radius) of a generic point
// near f(x). Throws RadiusTooLarge if f⁻¹(f(x)) has several clusters in the ball.
int estimate_local_index(const MapInstance& f, const Point& x, double radius);

// Dilatation estimates of f¹ … f^max_k (max_k ≤ 8).
std::vector<DilatationEstimate> uqr_probe(const MapInstance& f, int max_k, const BoxRegion& region,
                                          std::size_t samples, std::uint64_t seed = 0);

}  // namespace qrdyn
