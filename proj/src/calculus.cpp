#include "qrdyn/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qrdyn/error.hpp"
#include "qrdyn/sampling.hpp"

namespace qrdyn {

std::string to_string(DegreeMethod m) {
  return m == DegreeMethod::ExactOracle ? "exact-oracle" : "subdivision";
}

Matrix numeric_jacobian(const MapInstance& f, const Point& x, double h) {
  const int n = x.dim();
  Matrix m{n, {}};
  for (int j = 0; j < n; ++j) {
    Point xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Point d = (f(xp) - f(xm)) * (1.0 / (2.0 * h));
    for (int i = 0; i < n; ++i) m(i, j) = d[i];
  }
  return m;
}

Matrix numeric_jacobian(const MapInstance& f, const Point& x) {
  return numeric_jacobian(f, x, 1e-5 * std::max(1.0, x.norm()));
}

std::optional<DilatationQuotients> try_dilatation_at(const MapInstance& f, const Point& x) {
  const Matrix j = numeric_jacobian(f, x);
  const auto s = singular_values(j);
  const int n = j.n;
  const double det = determinant(j);
  const double top = std::pow(s[0], n);
  const double bottom = std::pow(s[static_cast<std::size_t>(n - 1)], n);
  if (!std::isfinite(det) || !std::isfinite(top) || !(det > 1e-12 * top) || !(bottom > 0.0)) {
    return std::nullopt;
  }
  DilatationQuotients q{top / det, det / bottom};
  if (!std::isfinite(q.outer) || !std::isfinite(q.inner)) return std::nullopt;
  return q;
}

DilatationQuotients dilatation_at(const MapInstance& f, const Point& x) {
  auto q = try_dilatation_at(f, x);
  if (!q) throw Error(ErrorCode::BranchPointSuspected, "Jacobian determinant below floor");
  return *q;
}

DilatationEstimate estimate_dilatation(const MapInstance& f, const BoxRegion& region,
                                       std::size_t samples, std::uint64_t seed) {
  if (samples < 100) throw Error(ErrorCode::InvalidArgument, "estimate_dilatation needs ≥ 100 samples");
  if (region.dim() != f.dim()) throw Error(ErrorCode::DimensionMismatch, "region dimension");
  std::vector<std::optional<DilatationQuotients>> results(samples);
  const auto count = static_cast<std::int64_t>(samples);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    results[static_cast<std::size_t>(i)] =
        try_dilatation_at(f, halton_point(region, static_cast<std::uint64_t>(i), seed));
  }
  DilatationEstimate est;
  double best = -1.0;
  for (std::size_t i = 0; i < samples; ++i) {
    if (!results[i]) {
      ++est.rejected_near_branch;
      continue;
    }
    ++est.samples_used;
    est.outer = std::max(est.outer, results[i]->outer);
    est.inner = std::max(est.inner, results[i]->inner);
    const double k = std::max(results[i]->outer, results[i]->inner);
    if (k > best) {
      best = k;
      est.argmax_point = halton_point(region, i, seed);
    }
  }
  if (est.samples_used == 0) throw Error(ErrorCode::AllSamplesRejected, "every sample near the branch set");
  return est;
}

// ------------------------------------------------------------------ degree

namespace {

struct Cell {
  Point center;
  std::array<double, 3> half{};
};

double half_diagonal(const Cell& c, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += c.half[static_cast<std::size_t>(i)] * c.half[static_cast<std::size_t>(i)];
  return std::sqrt(s);
}

// Largest |f(p) − f(center)| over the 3ⁿ lattice of the cell.
double sampled_spread(const MapInstance& f, const Cell& c, const Point& fc, int n) {
  double spread = 0.0;
  const int nz = n == 3 ? 3 : 1;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int e = 0; e < nz; ++e) {
        if (a == 1 && b == 1 && (n == 2 || e == 1)) continue;
        Point p = c.center;
        p[0] += (a - 1) * c.half[0];
        p[1] += (b - 1) * c.half[1];
        if (n == 3) p[2] += (e - 1) * c.half[2];
        const double d = distance(f(p), fc);
        if (std::isfinite(d)) spread = std::max(spread, d);
      }
  return spread;
}

std::size_t find_set(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

void check_search_box(const MapInstance& f, const Point& y, const BoxRegion& box) {
  const int n = box.dim();
  constexpr int kPerEdge = 33;
  const double limit = 2.0 * y.norm();
  for (int axis = 0; axis < n; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const int other0 = (axis + 1) % n;
      const int other1 = (axis + 2) % n;
      const int m1 = n == 3 ? kPerEdge : 1;
      for (int i = 0; i < kPerEdge; ++i)
        for (int j = 0; j < m1; ++j) {
          Point p(n);
          p[axis] = side == 0 ? box.low()[axis] : box.high()[axis];
          p[other0] = box.low()[other0] + box.width(other0) * i / (kPerEdge - 1);
          if (n == 3) p[other1] = box.low()[other1] + box.width(other1) * j / (kPerEdge - 1);
          if (f(p).norm() <= limit) {
            throw Error(ErrorCode::SearchBoxTooSmall,
                        "a boundary point of the search box maps within twice the target norm");
          }
        }
    }
  }
}

}  // namespace

std::vector<Point> subdivision_preimages(const MapInstance& f, const Point& y,
                                         const BoxRegion& search, const DegreeOptions& opts) {
  const int n = search.dim();
  std::vector<Cell> level{Cell{search.center(), {}}};
  for (int i = 0; i < n; ++i) level[0].half[static_cast<std::size_t>(i)] = 0.5 * search.width(i);

  std::vector<Cell> finest;
  std::vector<double> finest_residual;
  while (!level.empty()) {
    std::vector<Cell> next;
    for (const auto& c : level) {
      const Point fc = f(c.center);
      const double residual = distance(fc, y);
      if (!std::isfinite(residual)) continue;
      const double diam = 2.0 * half_diagonal(c, n);
      // Lipschitz bound L from the lattice, kept when |f(c) − y| ≤ L·diam.
      const double lipschitz = sampled_spread(f, c, fc, n) / (0.5 * diam);
      if (residual > lipschitz * diam) continue;
      if (diam <= opts.min_diameter) {
        finest.push_back(c);
        finest_residual.push_back(residual);
        continue;
      }
      const int children = 1 << n;
      for (int m = 0; m < children; ++m) {
        Cell child;
        child.center = c.center;
        for (int i = 0; i < n; ++i) {
          const auto ui = static_cast<std::size_t>(i);
          child.half[ui] = 0.5 * c.half[ui];
          child.center[i] += ((m >> i) & 1 ? 1.0 : -1.0) * child.half[ui];
        }
        next.push_back(child);
      }
    }
    if (next.size() > opts.max_boxes) {
      throw Error(ErrorCode::InvalidArgument, "subdivision exceeded the box budget");
    }
    level = std::move(next);
  }

  std::vector<std::size_t> parent(finest.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < finest.size(); ++i)
    for (std::size_t j = i + 1; j < finest.size(); ++j)
      if (distance(finest[i].center, finest[j].center) <= opts.cluster_tol) {
        parent[find_set(parent, j)] = find_set(parent, i);
      }
  std::vector<std::size_t> best(finest.size(), finest.size());
  for (std::size_t i = 0; i < finest.size(); ++i) {
    const std::size_t r = find_set(parent, i);
    if (best[r] == finest.size() || finest_residual[i] < finest_residual[best[r]]) best[r] = i;
  }
  std::vector<Point> reps;
  for (std::size_t r = 0; r < finest.size(); ++r) {
    if (best[r] != finest.size()) reps.push_back(finest[best[r]].center);
  }
  return reps;
}

DegreeEstimate estimate_degree(const MapInstance& f, const std::vector<Point>& targets,
                               const BoxRegion& search, const DegreeOptions& opts) {
  if (!f.metadata().polynomial_type) {
    throw Error(ErrorCode::NotPolynomialType, "degree estimation needs a polynomial-type map");
  }
  if (targets.empty()) throw Error(ErrorCode::InvalidArgument, "no target points");
  DegreeEstimate est;
  est.target_points = targets;
  if (f.has_exact_preimages() && !opts.force_subdivision) {
    est.method = DegreeMethod::ExactOracle;
    for (const auto& y : targets) est.count = std::max<std::uint64_t>(est.count, f.preimages_exact(y).size());
    return est;
  }
  est.method = DegreeMethod::Subdivision;
  for (const auto& y : targets) {
    check_search_box(f, y, search);
    est.count = std::max<std::uint64_t>(est.count, subdivision_preimages(f, y, search, opts).size());
  }
  return est;
}

int estimate_local_index(const MapInstance& f, const Point& x, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const int n = x.dim();
  const Point y0 = f(x);

  double lipschitz = 0.0;
  for (const auto& d : sphere_directions(n, 64, 3)) {
    lipschitz = std::max(lipschitz, distance(f(x + (0.5 * radius) * d), y0) / (0.5 * radius));
  }
  if (!(lipschitz > 0.0)) throw Error(ErrorCode::InvalidArgument, "map is locally constant");

  Point generic(n);
  generic[0] = 0.6180339887498949;
  generic[1] = 0.3819660112501051;
  if (n == 3) generic[2] = 0.2360679774997897;
  generic *= 1.0 / generic.norm();
  const Point w = y0 + (1e-2 * radius * lipschitz) * generic;

  auto inside = [&](const std::vector<Point>& pts) {
    std::size_t c = 0;
    for (const auto& p : pts) c += distance(p, x) < radius ? 1 : 0;
    return c;
  };

  std::size_t fibre, count;
  if (f.has_exact_preimages()) {
    fibre = inside(f.preimages_exact(y0));
    count = inside(f.preimages_exact(w));
  } else {
    Point lo = x, hi = x;
    for (int i = 0; i < n; ++i) {
      lo[i] -= radius;
      hi[i] += radius;
    }
    const BoxRegion ball_box(lo, hi);
    DegreeOptions opts;
    opts.min_diameter = 1e-6 * radius;
    opts.cluster_tol = 1e-4 * radius;
    fibre = inside(subdivision_preimages(f, y0, ball_box, opts));
    count = inside(subdivision_preimages(f, w, ball_box, opts));
  }
  if (fibre > 1) {
    throw Error(ErrorCode::RadiusTooLarge, "several preimage clusters of f(x) inside the ball");
  }
  if (count == 0) throw Error(ErrorCode::ValidationFailed, "no preimage of the perturbed value found");
  return static_cast<int>(count);
}

std::vector<DilatationEstimate> uqr_probe(const MapInstance& f, int max_k, const BoxRegion& region,
                                          std::size_t samples, std::uint64_t seed) {
  if (max_k < 1 || max_k > 8) throw Error(ErrorCode::InvalidArgument, "uqr_probe needs 1 ≤ max_k ≤ 8");
  std::vector<DilatationEstimate> out;
  for (int k = 1; k <= max_k; ++k) out.push_back(estimate_dilatation(make_iterate(f, k), region, samples, seed));
  return out;
}

}  // namespace qrdyn
