#include "qrdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <omp.h>

#include "qrdyn/error.hpp"
#include "qrdyn/sampling.hpp"

namespace qrdyn {

namespace {

std::size_t find_set(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

void unite(std::vector<std::size_t>& parent, std::size_t a, std::size_t b) {
  a = find_set(parent, a);
  b = find_set(parent, b);
  if (a == b) return;
  if (a < b) std::swap(a, b);
  parent[a] = b;  // smaller index wins: deterministic roots
}

const EscapeCertificate& require_certificate(const EscapeGrid& g, const char* who) {
  if (!g.certificate) {
    throw Error(ErrorCode::NotApplicable, std::string(who) + " needs a certified grid");
  }
  return *g.certificate;
}

bool boundary_cell(const EscapeGrid& g, std::size_t idx) {
  bool esc = false, sent = false;
  for_each_neighbour(g.resolution, idx, [&](std::size_t j) {
    if (g.cells[j] == kSentinel) sent = true; else esc = true;
  });
  return esc && sent;
}

// Stride-subsample `pool` down to at most `cap` entries (cap = 0: all).
std::vector<std::size_t> spread_sample(const std::vector<std::size_t>& pool, std::size_t cap) {
  if (cap == 0 || pool.size() <= cap) return pool;
  std::vector<std::size_t> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < cap; ++i) out.push_back(pool[i * pool.size() / cap]);
  return out;
}

std::string describe(const Point& p) {
  std::ostringstream os;
  os.precision(10);
  os << "(";
  for (int i = 0; i < p.dim(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- boundary

BoundarySet extract_boundary_serial(const EscapeGrid& g) {
  BoundarySet b{g.box, g.resolution, {}};
  for (std::size_t idx = 0; idx < g.cells.size(); ++idx) {
    if (boundary_cell(g, idx)) b.cells.push_back(idx);
  }
  return b;
}

BoundarySet extract_boundary(const EscapeGrid& g) {
  std::vector<char> flag(g.cells.size(), 0);
  const auto total = static_cast<std::int64_t>(g.cells.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    flag[static_cast<std::size_t>(idx)] = boundary_cell(g, static_cast<std::size_t>(idx)) ? 1 : 0;
  }
  BoundarySet b{g.box, g.resolution, {}};
  for (std::size_t idx = 0; idx < flag.size(); ++idx) {
    if (flag[idx]) b.cells.push_back(idx);
  }
  return b;
}

std::vector<std::size_t> isolated_boundary_cells(const BoundarySet& b) {
  std::vector<char> member(b.resolution.total(), 0);
  for (auto c : b.cells) member[c] = 1;
  std::vector<std::size_t> isolated;
  for (auto c : b.cells) {
    bool neighbour = false;
    for_each_neighbour(b.resolution, c, [&](std::size_t j) {
      if (j != c && member[j]) neighbour = true;
    });
    if (!neighbour) isolated.push_back(c);
  }
  return isolated;
}

double hausdorff_to_curve(const EscapeGrid& g, const BoundarySet& b, const std::vector<Point>& curve) {
  if (b.cells.empty() || curve.empty()) return std::numeric_limits<double>::infinity();
  std::vector<Point> centers;
  centers.reserve(b.cells.size());
  for (auto c : b.cells) centers.push_back(g.cell_center(c));
  auto directed = [](const std::vector<Point>& from, const std::vector<Point>& to) {
    std::vector<double> best(from.size());
    const auto m = static_cast<std::int64_t>(from.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& q : to) d = std::min(d, distance(from[static_cast<std::size_t>(i)], q));
      best[static_cast<std::size_t>(i)] = d;
    }
    return *std::max_element(best.begin(), best.end());
  };
  return std::max(directed(centers, curve), directed(curve, centers));
}

// ------------------------------------------------------------ connectivity

CheckReport connectivity_check(const EscapeGrid& g) {
  const auto& cert = require_certificate(g, "connectivity_check");
  if (!g.box.contains_ball(cert.r_prime)) {
    throw Error(ErrorCode::BoxTooSmall, "grid box does not contain the closed ball of radius R'");
  }
  CheckReport rep;
  rep.name = "connectivity";
  const std::size_t total = g.cells.size();
  const std::size_t infinity = total;
  std::vector<std::size_t> parent(total + 1);
  std::iota(parent.begin(), parent.end(), 0);
  const auto& res = g.resolution;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!g.escaping(idx)) continue;
    const auto ijk = g.unravel(idx);
    std::size_t stride = 1;
    for (int a = 0; a < g.dim(); ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const auto n = res.cells[ua];
      if (ijk[ua] == 0 || ijk[ua] + 1 == n) unite(parent, idx, infinity);
      if (ijk[ua] + 1 < n && g.escaping(idx + stride)) unite(parent, idx, idx + stride);
      stride *= n;
    }
  }
  const std::size_t inf_root = find_set(parent, infinity);
  std::vector<std::size_t> island_roots;
  std::size_t attached = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!g.escaping(idx)) continue;
    const std::size_t r = find_set(parent, idx);
    if (r == inf_root) {
      ++attached;
    } else if (std::find(island_roots.begin(), island_roots.end(), r) == island_roots.end()) {
      island_roots.push_back(r);
      if (rep.witness_cells.size() < 16) {
        rep.witness_cells.push_back(idx);
        rep.witnesses.push_back(g.cell_center(idx));
      }
    }
  }
  rep.parameters["escaping_cells"] = static_cast<double>(g.escaping_count());
  rep.parameters["infinity_component_cells"] = static_cast<double>(attached);
  rep.parameters["components"] = static_cast<double>(island_roots.size() + (attached > 0 ? 1 : 0));
  rep.pass = attached > 0 && island_roots.empty();
  if (attached == 0) {
    rep.notes.push_back("no escaping cell touches the box faces");
    if (rep.witness_cells.empty()) {
      rep.witness_cells.push_back(0);
      rep.witnesses.push_back(g.cell_center(0));
    }
  }
  if (!island_roots.empty()) rep.notes.push_back("escaping islands not attached to infinity");
  return rep;
}

// --------------------------------------------------------------- invariance

CheckReport invariance_check(const MapInstance& f, const EscapeGrid& g, const InvarianceOptions& opts) {
  if (g.horizon < 2) throw Error(ErrorCode::InvalidArgument, "invariance check needs horizon ≥ 2");
  CheckReport rep;
  rep.name = "invariance";
  const EscapeCertificate* cert = g.certificate ? &*g.certificate : nullptr;
  const std::size_t total = g.cells.size();
  std::vector<std::size_t> picks;
  if (opts.samples >= total) {
    picks.resize(total);
    std::iota(picks.begin(), picks.end(), 0);
  } else {
    std::uint64_t state = opts.seed;
    for (std::size_t i = 0; i < opts.samples; ++i) {
      picks.push_back(std::min(total - 1, static_cast<std::size_t>(unit_double(splitmix64(state)) * static_cast<double>(total))));
    }
  }
  std::vector<Outcome> image(picks.size());
  const auto m = static_cast<std::int64_t>(picks.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < m; ++i) {
    const auto u = static_cast<std::size_t>(i);
    image[u] = classify_point(f, f(g.cell_center(picks[u])), cert, g.horizon - 1);
  }
  std::size_t agree = 0, mismatch = 0, indeterminate = 0;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const bool grid_esc = g.escaping(picks[i]);
    const bool img_esc = image[i].escaping();
    if (grid_esc == img_esc) {
      ++agree;
    } else if (cert && grid_esc && !img_esc) {
      // x certified-escaping forces f(x) to escape one step sooner.
      ++mismatch;
      if (rep.witness_cells.size() < 16) {
        rep.witness_cells.push_back(picks[i]);
        rep.witnesses.push_back(g.cell_center(picks[i]));
      }
    } else {
      ++indeterminate;
      if (indeterminate <= 8) rep.notes.push_back("indeterminate at " + describe(g.cell_center(picks[i])));
    }
  }
  rep.parameters["samples"] = static_cast<double>(picks.size());
  rep.parameters["agreement_fraction"] = picks.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(picks.size());
  rep.parameters["certified_mismatches"] = static_cast<double>(mismatch);
  rep.parameters["indeterminate"] = static_cast<double>(indeterminate);
  if (!cert) rep.notes.push_back("no certificate: outcomes are uncertified, disagreements indeterminate");
  rep.pass = mismatch == 0;
  return rep;
}

// ------------------------------------------------------- I(f^k) = I(f)

CheckReport escaping_set_agreement(const MapInstance& f, const EscapeCertificate& cert_f, int horizon_f,
                                   const MapInstance& g, const EscapeCertificate& cert_g, int horizon_g,
                                   const BoxRegion& box, const GridResolution& res) {
  const EscapeGrid gf = classify_grid(f, box, res, cert_f, horizon_f);
  const EscapeGrid gg = classify_grid(g, box, res, cert_g, horizon_g);
  CheckReport rep;
  rep.name = "iterate_consistency";
  std::size_t diff = 0;
  for (std::size_t i = 0; i < gf.cells.size(); ++i) {
    if (gf.escaping(i) != gg.escaping(i)) {
      ++diff;
      if (rep.witness_cells.size() < 16) {
        rep.witness_cells.push_back(i);
        rep.witnesses.push_back(gf.cell_center(i));
      }
    }
  }
  rep.parameters["symmetric_difference"] = static_cast<double>(diff);
  rep.parameters["escaping_cells_f"] = static_cast<double>(gf.escaping_count());
  rep.parameters["escaping_cells_g"] = static_cast<double>(gg.escaping_count());
  rep.parameters["horizon_f"] = horizon_f;
  rep.parameters["horizon_g"] = horizon_g;
  rep.parameters["r_prime_f"] = cert_f.r_prime;
  rep.parameters["r_prime_g"] = cert_g.r_prime;
  rep.pass = diff == 0;
  return rep;
}

CheckReport iterate_consistency_check(const MapInstance& f, int k, const BoxRegion& box,
                                      const GridResolution& res, int horizon, CertificateMethod method) {
  if (k != 2 && k != 3) throw Error(ErrorCode::InvalidArgument, "iterate consistency needs k ∈ {2, 3}");
  if (static_cast<long>(horizon) * k > kMaxHorizon) throw Error(ErrorCode::InvalidArgument, "horizon·k too large");
  const MapInstance fk = make_iterate(f, k);
  const auto cert_f = estimate_certificate(f, method);
  const auto cert_k = estimate_certificate(fk, method);
  CheckReport rep = escaping_set_agreement(f, cert_f, horizon * k, fk, cert_k, horizon, box, res);
  rep.parameters["k"] = k;
  return rep;
}

// ---------------------------------------------------------- equicontinuity

namespace {

// Orbit of a point set under f; entries that overflow become ∞ and stay there.
class OrbitCloud {
 public:
  OrbitCloud(const MapInstance& f, std::vector<Point> pts) : f_(f), pts_(std::move(pts)), inf_(pts_.size(), 0) {
    mark();
  }
  void step() {
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!inf_[i]) pts_[i] = f_(pts_[i]);
    }
    mark();
  }
  double oscillation() const {
    double osc = 0.0;
    for (std::size_t i = 0; i < pts_.size(); ++i)
      for (std::size_t j = i + 1; j < pts_.size(); ++j) osc = std::max(osc, chordal_distance(ext(i), ext(j)));
    return osc;
  }

 private:
  ExtendedPoint ext(std::size_t i) const {
    return inf_[i] ? ExtendedPoint::infinity(pts_[i].dim()) : ExtendedPoint(pts_[i]);
  }
  void mark() {
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!pts_[i].is_finite() || !std::isfinite(pts_[i].norm())) inf_[i] = 1;
    }
  }
  const MapInstance& f_;
  std::vector<Point> pts_;
  std::vector<char> inf_;
};

std::vector<Point> corners_and_center(const EscapeGrid& g, std::size_t idx) {
  const Point c = g.cell_center(idx);
  std::vector<Point> pts{c};
  const int n = g.dim();
  for (int m = 0; m < (1 << n); ++m) {
    Point p = c;
    for (int a = 0; a < n; ++a) p[a] += ((m >> a) & 1 ? 0.5 : -0.5) * g.cell_width(a);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

CheckReport equicontinuity_probe(const MapInstance& f, const EscapeGrid& g, const BoundarySet& b,
                                 const EquicontinuityOptions& opts) {
  const auto& cert = require_certificate(g, "equicontinuity_probe");
  if (!b.matches(g)) throw Error(ErrorCode::GridMismatch, "boundary set from a different grid");
  const int horizon = g.horizon;
  CheckReport rep;
  rep.name = "equicontinuity";

  // Interior: cells whose closed neighbourhood is entirely escaping.
  std::vector<std::size_t> pool;
  for (std::size_t idx = 0; idx < g.cells.size(); ++idx) {
    if (!g.escaping(idx)) continue;
    bool all = true;
    for_each_neighbour(g.resolution, idx, [&](std::size_t j) { all = all && g.escaping(j); });
    if (all) pool.push_back(idx);
  }
  const auto interior = spread_sample(pool, opts.max_interior_cells);
  // Past the escape time each step at least doubles |x|, so every orbit lies
  // within chordal distance 1/(2^m R') of ∞ after m more steps; the cloud is
  // only guaranteed to be eps-small once 2/(2^m R') < eps.
  const int margin = std::max(3, static_cast<int>(std::ceil(std::log2(2.0 / (opts.interior_eps * cert.r_prime)))));
  // 0 skipped, 1 pass, 2 fail
  std::vector<int> interior_state(interior.size(), 0);
  {
    const auto m = static_cast<std::int64_t>(interior.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < m; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const auto pts = corners_and_center(g, interior[u]);
      int last_escape = 0;
      bool certified = true;
      for (const auto& p : pts) {
        const Outcome o = classify_point(f, p, &cert, horizon);
        if (!o.certified()) certified = false;
        last_escape = std::max(last_escape, o.time);
      }
      if (!certified || last_escape + margin > horizon) continue;
      OrbitCloud cloud(f, pts);
      bool ok = true;
      for (int k = 0; k <= horizon; ++k) {
        if (k >= last_escape + margin && !(cloud.oscillation() < opts.interior_eps)) {
          ok = false;
          break;
        }
        if (k < horizon) cloud.step();
      }
      interior_state[u] = ok ? 1 : 2;
    }
  }
  std::size_t interior_tested = 0, interior_failed = 0;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (interior_state[i] == 0) continue;
    ++interior_tested;
    if (interior_state[i] == 2) {
      ++interior_failed;
      if (rep.witness_cells.size() < 16) {
        rep.witness_cells.push_back(interior[i]);
        rep.witnesses.push_back(g.cell_center(interior[i]));
      }
    }
  }

  // Boundary: the closed neighbourhood holds both classes, so its orbit
  // cloud must spread to chordal distance ≥ delta.
  const auto boundary = spread_sample(b.cells, opts.max_boundary_cells);
  std::vector<double> peak(boundary.size(), 0.0);
  {
    const auto m = static_cast<std::int64_t>(boundary.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < m; ++i) {
      const auto u = static_cast<std::size_t>(i);
      auto pts = corners_and_center(g, boundary[u]);
      for_each_neighbour(g.resolution, boundary[u], [&](std::size_t j) {
        if (j != boundary[u]) pts.push_back(g.cell_center(j));
      });
      OrbitCloud cloud(f, pts);
      double best = 0.0;
      for (int k = 0; k <= horizon; ++k) {
        best = std::max(best, cloud.oscillation());
        if (best >= opts.boundary_delta) break;
        if (k < horizon) cloud.step();
      }
      peak[u] = best;
    }
  }
  std::size_t boundary_failed = 0;
  double min_peak = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    min_peak = std::min(min_peak, peak[i]);
    if (peak[i] < opts.boundary_delta) {
      ++boundary_failed;
      if (rep.witness_cells.size() < 32) {
        rep.witness_cells.push_back(boundary[i]);
        rep.witnesses.push_back(g.cell_center(boundary[i]));
      }
    }
  }

  rep.parameters["interior_eps"] = opts.interior_eps;
  rep.parameters["interior_settle_margin"] = margin;
  rep.parameters["boundary_delta"] = opts.boundary_delta;
  rep.parameters["interior_cells_tested"] = static_cast<double>(interior_tested);
  rep.parameters["interior_cells_failed"] = static_cast<double>(interior_failed);
  rep.parameters["boundary_cells_tested"] = static_cast<double>(boundary.size());
  rep.parameters["boundary_cells_failed"] = static_cast<double>(boundary_failed);
  rep.parameters["boundary_min_peak_oscillation"] = boundary.empty() ? 0.0 : min_peak;
  rep.pass = interior_failed == 0 && boundary_failed == 0 && interior_tested > 0 && !boundary.empty();
  if (interior_tested == 0) rep.notes.push_back("no interior cell could be tested");
  if (boundary.empty()) rep.notes.push_back("empty boundary: the dichotomy is not observable");
  if (!rep.pass && rep.witness_cells.empty()) {
    rep.witness_cells.push_back(0);
    rep.witnesses.push_back(g.cell_center(0));
  }
  return rep;
}

// ------------------------------------------------------------ fixed points

FixedPointResult fixed_point_search(const MapInstance& f, const BoxRegion& region, const EscapeCertificate* cert,
                                    const FixedPointOptions& opts) {
  if (!f.metadata().polynomial_type) {
    throw Error(ErrorCode::NotApplicable, "fixed point search needs a polynomial-type map");
  }
  if (region.dim() != f.dim()) throw Error(ErrorCode::DimensionMismatch, "region dimension");
  if (cert && !region.contains_ball(cert->r_prime)) {
    throw Error(ErrorCode::BoxTooSmall, "search region must contain the closed R' ball");
  }
  const int n = f.dim();
  const std::uint32_t m = opts.coarse_resolution ? opts.coarse_resolution : (n == 2 ? 64u : 24u);
  const GridResolution res = GridResolution::uniform(n, m);
  EscapeGrid lattice;  // geometry helper only
  lattice.box = region;
  lattice.resolution = res;

  auto residual = [&](const Point& x) {
    const double r = distance(f(x), x);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  };

  // Candidate cells: |F(c)| within the sampled spread of F = f − id over the cell.
  std::vector<std::size_t> candidates;
  std::array<double, 3> half{};
  for (int a = 0; a < n; ++a) half[static_cast<std::size_t>(a)] = 0.5 * lattice.cell_width(a);
  for (std::size_t idx = 0; idx < res.total(); ++idx) {
    const Point c = lattice.cell_center(idx);
    const Point fc = f(c) - c;
    const double r = fc.norm();
    if (!std::isfinite(r)) continue;
    double spread = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      Point p = c;
      for (int a = 0; a < n; ++a) p[a] += ((mask >> a) & 1 ? 1.0 : -1.0) * half[static_cast<std::size_t>(a)];
      spread = std::max(spread, distance(f(p) - p, fc));
    }
    if (r <= 2.0 * spread) candidates.push_back(idx);
  }

  std::vector<Point> refined(candidates.size());
  std::vector<double> refined_res(candidates.size(), std::numeric_limits<double>::infinity());
  const auto mc = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t ci = 0; ci < mc; ++ci) {
    const auto u = static_cast<std::size_t>(ci);
    Point c = lattice.cell_center(candidates[u]);
    auto w = half;
    double best = residual(c);
    for (int it = 0; it < opts.max_refinements && best > 1e-4 * opts.tolerance * std::max(1.0, c.norm()); ++it) {
      Point best_p = c;
      const int nz = n == 3 ? 5 : 1;
      for (int a = 0; a < 5; ++a)
        for (int b2 = 0; b2 < 5; ++b2)
          for (int e = 0; e < nz; ++e) {
            Point p = c;
            p[0] += (a - 2) * 0.5 * w[0];
            p[1] += (b2 - 2) * 0.5 * w[1];
            if (n == 3) p[2] += (e - 2) * 0.5 * w[2];
            const double r = residual(p);
            if (r < best) {
              best = r;
              best_p = p;
            }
          }
      c = best_p;
      for (auto& h : w) h *= 0.5;
    }
    refined[u] = c;
    refined_res[u] = best;
  }

  std::vector<Point> converged;
  std::vector<double> converged_res;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (refined_res[i] <= opts.tolerance && region.contains(refined[i])) {
      converged.push_back(refined[i]);
      converged_res.push_back(refined_res[i]);
    }
  }
  FixedPointResult out;
  out.candidates = candidates.size();
  for (std::size_t i = 0; i < converged.size(); ++i) {
    bool dup = false;
    for (const auto& q : out.points) {
      if (distance(q, converged[i]) <= opts.dedup_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      out.points.push_back(converged[i]);
      out.residuals.push_back(converged_res[i]);
    }
  }
  if (out.points.empty()) throw Error(ErrorCode::NoFixedPointFound, "no residual below tolerance");
  if (static_cast<double>(out.points.size()) > opts.continuum_fraction * static_cast<double>(res.total())) {
    out.continuum = true;
    constexpr std::size_t kRepresentatives = 32;
    std::vector<Point> reps;
    std::vector<double> rres;
    for (std::size_t i = 0; i < kRepresentatives && i < out.points.size(); ++i) {
      const std::size_t j = i * out.points.size() / std::min(kRepresentatives, out.points.size());
      reps.push_back(out.points[j]);
      rres.push_back(out.residuals[j]);
    }
    out.points = std::move(reps);
    out.residuals = std::move(rres);
  }
  return out;
}

// --------------------------------------------------- unbounded boundary

CheckReport unbounded_boundary_probe(const MapInstance& f, const std::vector<double>& radii,
                                     const UnboundedProbeOptions& opts) {
  if (f.metadata().polynomial_type) {
    throw Error(ErrorCode::NotApplicable, "unbounded boundary probe is for essential singularities only");
  }
  if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "no radii");
  CheckReport rep;
  rep.name = "unbounded_boundary";
  const ClassifyOptions copts{opts.escape_bound};
  bool all = true;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double rho = radii[ri];
    const auto dirs = sphere_directions(f.dim(), opts.directions, opts.seed + ri);
    std::vector<Outcome> outcome(dirs.size());
    const auto m = static_cast<std::int64_t>(dirs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < m; ++i) {
      const auto u = static_cast<std::size_t>(i);
      outcome[u] = classify_point(f, rho * dirs[u], nullptr, opts.horizon, copts);
    }
    std::optional<std::size_t> esc, bounded;
    std::size_t n_esc = 0, n_bounded = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (outcome[i].escaping()) {
        ++n_esc;
        if (!esc) esc = i;
      } else {
        ++n_bounded;
        if (!bounded) bounded = i;
      }
    }
    std::ostringstream key;
    key << "radius_" << rho;
    rep.parameters[key.str() + "_escaping"] = static_cast<double>(n_esc);
    rep.parameters[key.str() + "_bounded"] = static_cast<double>(n_bounded);
    if (esc) rep.witnesses.push_back(rho * dirs[*esc]);
    if (bounded) rep.witnesses.push_back(rho * dirs[*bounded]);
    if (!esc || !bounded) {
      all = false;
      if (!esc && !bounded) rep.witnesses.push_back(rho * dirs.front());
      rep.notes.push_back("radius " + std::to_string(rho) + ": missing " +
                          (esc ? "horizon-bounded" : "escaping") + " witness");
    }
  }
  rep.parameters["escape_bound"] = opts.escape_bound;
  rep.parameters["horizon"] = opts.horizon;
  rep.parameters["directions"] = static_cast<double>(opts.directions);
  rep.notes.push_back("uncertified: escape declared heuristically at |x| > escape_bound; horizon-bounded means unknown, not non-escaping");
  rep.notes.push_back("witnesses alternate escaping, horizon-bounded per radius");
  rep.pass = all;
  return rep;
}

// ------------------------------------------------------- small checks

CheckReport openness_check(const MapInstance& f, const EscapeGrid& g, std::size_t samples) {
  const auto& cert = require_certificate(g, "openness_check");
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    if (g.escaping(i)) pool.push_back(i);
  }
  const auto picks = spread_sample(pool, samples);
  CheckReport rep;
  rep.name = "openness";
  std::vector<double> delta(picks.size(), 0.0);
  const auto m = static_cast<std::int64_t>(picks.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < m; ++i) {
    const auto u = static_cast<std::size_t>(i);
    delta[u] = open_neighbourhood_radius(f, g.cell_center(picks[u]), cert, g.horizon).value_or(0.0);
  }
  double min_delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < picks.size(); ++i) {
    min_delta = std::min(min_delta, delta[i]);
    if (delta[i] == 0.0 && rep.witness_cells.size() < 16) {
      rep.witness_cells.push_back(picks[i]);
      rep.witnesses.push_back(g.cell_center(picks[i]));
    }
  }
  rep.parameters["samples"] = static_cast<double>(picks.size());
  rep.parameters["min_delta"] = picks.empty() ? 0.0 : min_delta;
  rep.pass = !picks.empty() && rep.witness_cells.empty();
  if (picks.empty()) {
    rep.notes.push_back("no certified-escaping cell to probe");
    rep.witnesses.push_back(g.cell_center(0));
  }
  return rep;
}

CheckReport neighbourhood_of_infinity_check(const MapInstance& f, const EscapeCertificate& cert,
                                            std::size_t samples) {
  CheckReport rep;
  rep.name = "neighbourhood_of_infinity";
  const int n = f.dim();
  const auto dirs = sphere_directions(n, samples, 0xbeef);
  std::uint64_t state = 0xfeed;
  constexpr int kSteps = 8;
  for (const auto& d : dirs) {
    const double r = cert.r_prime * (1.0 + 1e-9 + 3.0 * unit_double(splitmix64(state)));
    const Point x = r * d;
    // Labelled escaping at time 0; the orbit must actually keep doubling.
    bool ok = classify_point(f, x, &cert, 1) == Outcome{OutcomeKind::CertifiedEscaping, 0};
    Point p = x;
    for (int j = 0; ok && j < kSteps; ++j) {
      const Point q = f(p);
      if (!q.is_finite() || !std::isfinite(q.norm())) break;  // overflow: escaped
      ok = q.norm() > 2.0 * p.norm();
      p = q;
    }
    if (!ok && rep.witnesses.size() < 16) rep.witnesses.push_back(x);
  }
  rep.parameters["orbit_steps"] = kSteps;
  rep.parameters["samples"] = static_cast<double>(samples);
  rep.parameters["r_prime"] = cert.r_prime;
  rep.pass = rep.witnesses.empty();
  return rep;
}

CheckReport certificate_soundness_check(const MapInstance& f, const EscapeCertificate& cert, std::size_t samples) {
  CheckReport rep;
  rep.name = "certificate_soundness";
  for (const auto& v : cert.validation) {
    if (!(v.ratio > 2.0) && rep.witnesses.size() < 16) rep.witnesses.push_back(v.point);
  }
  for (const auto& p : certificate_violations(f, cert, samples, 0xc0ffee)) {
    if (rep.witnesses.size() < 16) rep.witnesses.push_back(p);
  }
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& v : cert.validation) min_ratio = std::min(min_ratio, v.ratio);
  rep.parameters["samples"] = static_cast<double>(samples);
  rep.parameters["min_validation_ratio"] = min_ratio;
  rep.parameters["r_prime"] = cert.r_prime;
  rep.pass = rep.witnesses.empty();
  return rep;
}

CheckReport perfectness_check(const MapInstance& f, const BoxRegion& box, std::uint32_t res,
                              const EscapeCertificate& cert, int horizon) {
  CheckReport rep;
  rep.name = "perfectness";
  const int n = f.dim();
  std::size_t prev_count = 0;
  bool grows = true;
  for (const std::uint32_t r : {res / 2, res}) {
    const auto g = classify_grid(f, box, GridResolution::uniform(n, r), cert, horizon);
    const auto b = extract_boundary(g);
    const auto iso = isolated_boundary_cells(b);
    const std::string tag = "res_" + std::to_string(r);
    rep.parameters[tag + "_boundary_cells"] = static_cast<double>(b.cells.size());
    rep.parameters[tag + "_isolated_cells"] = static_cast<double>(iso.size());
    for (auto c : iso) {
      if (rep.witnesses.size() < 16) rep.witnesses.push_back(g.cell_center(c));
    }
    if (r == res) grows = b.cells.size() > prev_count;
    prev_count = b.cells.size();
  }
  rep.parameters["boundary_grows"] = grows ? 1.0 : 0.0;
  rep.notes.push_back(grows ? "boundary cell count grows under refinement"
                            : "boundary cell count did not grow under refinement");
  rep.pass = rep.witnesses.empty();
  return rep;
}

}  // namespace qrdyn
