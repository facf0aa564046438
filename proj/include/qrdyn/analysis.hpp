#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrdyn/escape.hpp"
#include "qrdyn/geometry.hpp"
#include "qrdyn/maps.hpp"

namespace qrdyn {

// Cells whose closed 3ⁿ neighbourhood (clipped to the box) holds both an
// escaping and a sentinel cell. Carries the grid shape so it can be checked
// against the grid it came from.
struct BoundarySet {
  BoxRegion box = BoxRegion::cube(2, -1.0, 1.0);
  GridResolution resolution;
  std::vector<std::size_t> cells;  // ascending

  bool matches(const EscapeGrid& g) const noexcept {
    return box == g.box && resolution == g.resolution;
  }
};

struct CheckReport {
  std::string name;
  bool pass = false;
  std::vector<Point> witnesses;
  std::vector<std::size_t> witness_cells;
  std::map<std::string, double> parameters;
  std::vector<std::string> notes;

  // A failing check must point at something.
  bool well_formed() const noexcept { return pass || !witnesses.empty() || !witness_cells.empty(); }
};

BoundarySet extract_boundary(const EscapeGrid& g);
BoundarySet extract_boundary_serial(const EscapeGrid& g);

// Boundary cells with no other boundary cell among their 3ⁿ−1 neighbours.
std::vector<std::size_t> isolated_boundary_cells(const BoundarySet& b);

// Calls fn(neighbour_index) for every in-box cell of the closed 3ⁿ
// neighbourhood of idx, including idx itself.
template <typename Fn>
void for_each_neighbour(const GridResolution& res, std::size_t idx, Fn&& fn);

// Union-find over escaping cells (face adjacency) plus a virtual ∞ node tied
// to escaping cells on the box faces. Throws BoxTooSmall when the box does
// not contain the closed R′ ball, NotApplicable without a certificate.
CheckReport connectivity_check(const EscapeGrid& g);

struct InvarianceOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 7;
};

// Grid class of sampled cell centers x versus classify_point(f(x)) at horizon
// N−1. A certified outcome contradicted by the other side fails; a
// disagreement resting on a horizon-bounded label is indeterminate.
CheckReport invariance_check(const MapInstance& f, const EscapeGrid& g,
                             const InvarianceOptions& opts = {});

// Certified-escaping sets of f (horizon horizon_f) and g (horizon horizon_g)
// on the same lattice must coincide.
CheckReport escaping_set_agreement(const MapInstance& f, const EscapeCertificate& cert_f,
                                   int horizon_f, const MapInstance& g,
                                   const EscapeCertificate& cert_g, int horizon_g,
                                   const BoxRegion& box, const GridResolution& res);

// I(f^k) = I(f) at cell scale: f with horizon N·k against f^k with horizon N.
CheckReport iterate_consistency_check(const MapInstance& f, int k, const BoxRegion& box,
                                      const GridResolution& res, int horizon,
                                      CertificateMethod method);

struct EquicontinuityOptions {
  double interior_eps = 1e-3;
  double boundary_delta = 0.5;
  std::size_t max_interior_cells = 256;
  std::size_t max_boundary_cells = 0;  // 0: all
};

// Interior cells: chordal oscillation of f^k over the cell's corners and
// center stays below eps for every k from the cell's last escape time + m to
// the horizon, m = max(3, ⌈log2(2 / (eps·R′))⌉) steps of guaranteed doubling. Boundary cells: oscillation over corners, center and the closed
// neighbourhood's centers reaches delta at some k ≤ horizon.
CheckReport equicontinuity_probe(const MapInstance& f, const EscapeGrid& g, const BoundarySet& b,
                                 const EquicontinuityOptions& opts = {});

struct FixedPointOptions {
  std::uint32_t coarse_resolution = 0;  // 0: 64 in 2D, 24 in 3D
  double tolerance = 1e-9;
  double dedup_tol = 1e-6;
  int max_refinements = 120;
  double continuum_fraction = 0.05;
};

struct FixedPointResult {
  std::vector<Point> points;
  std::vector<double> residuals;
  bool continuum = false;  // fixed points form a continuum; points are representatives
  std::size_t candidates = 0;
};

// Coarse minimisation of |f(x) − x| then repeated subdivision around each
// local minimum. Throws NotApplicable for non polynomial-type maps,
// NoFixedPointFound when nothing reaches the tolerance, BoxTooSmall when a
// certificate is supplied and the region misses the closed R′ ball.
FixedPointResult fixed_point_search(const MapInstance& f, const BoxRegion& region,
                                    const EscapeCertificate* cert = nullptr,
                                    const FixedPointOptions& opts = {});

struct UnboundedProbeOptions {
  std::size_t directions = 4096;
  int horizon = 100;
  double escape_bound = kDefaultEscapeBound;
  std::uint64_t seed = 11;
};

// Essential-singularity maps only (NotApplicable otherwise): at every radius
// look for a heuristically escaping and a horizon-bounded sphere sample.
CheckReport unbounded_boundary_probe(const MapInstance& f, const std::vector<double>& radii,
                                     const UnboundedProbeOptions& opts = {});

// Openness probe over certified-escaping samples of the grid.
CheckReport openness_check(const MapInstance& f, const EscapeGrid& g, std::size_t samples = 100);

// Points sampled with R′ < |x| ≤ 4R′ must be certified-escaping at time 0
// and their orbits must keep doubling in norm for 8 steps (or overflow).
CheckReport neighbourhood_of_infinity_check(const MapInstance& f, const EscapeCertificate& cert,
                                            std::size_t samples = 1000);

// Fresh samples in [R′, 4R′] satisfy the doubling inequality.
CheckReport certificate_soundness_check(const MapInstance& f, const EscapeCertificate& cert,
                                        std::size_t samples = 1000);

// Perfectness proxy at two resolutions (res/2 and res) plus boundary growth.
CheckReport perfectness_check(const MapInstance& f, const BoxRegion& box, std::uint32_t res,
                              const EscapeCertificate& cert, int horizon);

// Hausdorff distance between boundary cell centers and a reference curve
// given as a dense point sample.
double hausdorff_to_curve(const EscapeGrid& g, const BoundarySet& b,
                          const std::vector<Point>& curve);

// ---------------------------------------------------------------------------

template <typename Fn>
void for_each_neighbour(const GridResolution& res, std::size_t idx, Fn&& fn) {
  const auto nx = static_cast<std::int64_t>(res.cells[0]);
  const auto ny = static_cast<std::int64_t>(res.cells[1]);
  const auto nz = res.dim == 3 ? static_cast<std::int64_t>(res.cells[2]) : 1;
  const auto i = static_cast<std::int64_t>(idx) % nx;
  const auto j = (static_cast<std::int64_t>(idx) / nx) % ny;
  const auto k = static_cast<std::int64_t>(idx) / (nx * ny);
  const std::int64_t dz = res.dim == 3 ? 1 : 0;
  for (std::int64_t c = k - dz; c <= k + dz; ++c) {
    if (c < 0 || c >= nz) continue;
    for (std::int64_t b = j - 1; b <= j + 1; ++b) {
      if (b < 0 || b >= ny) continue;
      for (std::int64_t a = i - 1; a <= i + 1; ++a) {
        if (a < 0 || a >= nx) continue;
        fn(static_cast<std::size_t>(a + nx * (b + ny * c)));
      }
    }
  }
}

}  // namespace qrdyn
