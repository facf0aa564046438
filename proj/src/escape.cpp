#include "qrdyn/escape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <omp.h>

#include "qrdyn/calculus.hpp"
#include "qrdyn/error.hpp"
#include "qrdyn/sampling.hpp"

namespace qrdyn {

std::string to_string(CertificateMethod m) {
  return m == CertificateMethod::Holder ? "holder" : "doubling-search";
}

std::string to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::CertifiedEscaping: return "certified-escaping";
    case OutcomeKind::HeuristicEscaping: return "escaping-uncertified";
    case OutcomeKind::HorizonBounded: return "horizon-bounded";
    case OutcomeKind::Overflowed: return "overflowed";
  }
  return "unknown";
}

double holder_exponent(std::uint64_t degree, double inner_dilatation, int dim) {
  return std::pow(static_cast<double>(degree) / inner_dilatation, 1.0 / (dim - 1));
}

namespace {

// |x|^alpha / |f(x)| without intermediate overflow.
double growth_quotient(const MapInstance& f, const Point& x, double alpha) {
  const double nx = x.norm();
  const double nf = f(x).norm();
  if (!(nf > 0.0)) return std::numeric_limits<double>::infinity();
  const double direct = std::pow(nx, alpha) / nf;
  if (std::isfinite(direct) && direct > 0.0) return direct;
  return std::exp(alpha * std::log(nx) - std::log(nf));
}

bool doubles_on_sphere(const MapInstance& f, double r, const std::vector<Point>& dirs) {
  for (const auto& d : dirs) {
    if (!(f(r * d).norm() > 2.0 * r)) return false;
  }
  return true;
}

}  // namespace

EscapeCertificate estimate_certificate(const MapInstance& f, CertificateMethod method,
                                       const CertificateParams& params) {
  const MapMetadata& meta = f.metadata();
  if (!meta.polynomial_type || !meta.degree) {
    throw Error(ErrorCode::NotPolynomialType,
                meta.name + " has an essential singularity at infinity; no escape radius exists");
  }
  if (params.directions < 64 || params.radii < 2 || !(params.base_radius > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "certificate sampling needs ≥ 64 directions and ≥ 2 radii");
  }
  const int n = f.dim();
  EscapeCertificate cert;
  cert.method = method;

  if (method == CertificateMethod::Holder) {
    double ki = 0.0;
    if (meta.inner_dilatation) {
      ki = *meta.inner_dilatation;
    } else {
      const double r = 4.0 * params.base_radius;
      ki = estimate_dilatation(f, BoxRegion::cube(n, -r, r), params.dilatation_samples, params.seed).inner;
    }
    cert.alpha = holder_exponent(*meta.degree, ki, n);
    if (!(cert.alpha > 1.0 + 1e-12)) {
      throw Error(ErrorCode::DegreeNotAboveDilatation,
                  "alpha = " + std::to_string(cert.alpha) + " (degree " + std::to_string(*meta.degree) +
                      ", K_I " + std::to_string(ki) + ")");
    }
    cert.R = params.base_radius;
    const auto dirs = sphere_directions(n, params.directions, params.seed);
    double c = 0.0;
    for (std::size_t i = 0; i < params.radii; ++i) {
      const double rho = cert.R * std::pow(64.0, static_cast<double>(i) / static_cast<double>(params.radii - 1));
      for (const auto& d : dirs) c = std::max(c, growth_quotient(f, rho * d, cert.alpha));
    }
    cert.C = c;
    cert.r_prime = std::max(cert.R, std::pow(2.0 * c, 1.0 / (cert.alpha - 1.0)));
  } else {
    cert.alpha = 1.0;
    cert.C = 0.5;
    const auto dirs = sphere_directions(n, params.directions, params.seed);
    std::vector<double> ladder;
    for (double r = params.ladder_min; r <= params.ladder_max; r *= std::pow(2.0, 0.125)) ladder.push_back(r);
    std::vector<char> good(ladder.size());
    for (std::size_t j = 0; j < ladder.size(); ++j) good[j] = doubles_on_sphere(f, ladder[j], dirs) ? 1 : 0;
    constexpr std::size_t kSpan = 48;  // 64 = 2^(48/8)
    std::optional<double> rho;
    for (std::size_t j = 0; j + kSpan < ladder.size() && !rho; ++j) {
      if (std::all_of(good.begin() + static_cast<std::ptrdiff_t>(j),
                      good.begin() + static_cast<std::ptrdiff_t>(j + kSpan + 1), [](char g) { return g != 0; })) {
        rho = ladder[j];
      }
    }
    if (!rho) throw Error(ErrorCode::ValidationFailed, "no sampled radius with |f(x)| > 2|x| on [rho, 64 rho]");
    cert.R = *rho;
    cert.r_prime = *rho;
  }

  if (!std::isfinite(cert.r_prime)) throw Error(ErrorCode::ValidationFailed, "escape radius is not finite");

  // The growth estimate is only trusted once the doubling property is
  // observed on fresh spheres just outside R′ and at 2R′.
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    const auto dirs = sphere_directions(n, params.validation_directions,
                                        params.seed + 0x9e37ULL * static_cast<std::uint64_t>(attempt + 1));
    std::vector<ValidationSample> samples;
    bool ok = true;
    for (const double r : {cert.r_prime * (1.0 + 1e-6), 2.0 * cert.r_prime}) {
      for (const auto& d : dirs) {
        const Point x = r * d;
        const double ratio = f(x).norm() / x.norm();
        samples.push_back({x, ratio});
        if (!(ratio > 2.0)) ok = false;
      }
    }
    if (ok) {
      cert.validation = std::move(samples);
      return cert;
    }
    cert.r_prime *= params.inflation;
    ++cert.inflations;
  }
  throw Error(ErrorCode::ValidationFailed, "doubling property not observed after inflating R'");
}

Outcome classify_point(const MapInstance& f, const Point& x, const EscapeCertificate* cert,
                       int horizon, const ClassifyOptions& opts) {
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be ≥ 1");
  const double bound = cert ? cert->r_prime : opts.escape_bound;
  const double bound2 = bound * bound;
  const OutcomeKind kind = cert ? OutcomeKind::CertifiedEscaping : OutcomeKind::HeuristicEscaping;
  Point p = x;
  for (int t = 0; t < horizon; ++t) {
    if (!p.is_finite()) return {OutcomeKind::Overflowed, t};
    if (p.norm2() > bound2) return {kind, t};
    p = f(p);
  }
  return {OutcomeKind::HorizonBounded, horizon};
}

// ------------------------------------------------------------------- grids

GridResolution GridResolution::uniform(int dim, std::uint32_t n) {
  require_supported_dim(dim);
  GridResolution r;
  r.dim = dim;
  r.cells = {n, n, dim == 3 ? n : 1u};
  return r;
}

std::size_t GridResolution::total() const noexcept {
  std::size_t t = 1;
  for (int i = 0; i < dim; ++i) t *= cells[static_cast<std::size_t>(i)];
  return t;
}

std::size_t EscapeGrid::index(std::span<const std::uint32_t> ijk) const noexcept {
  std::size_t idx = 0;
  for (int a = dim() - 1; a >= 0; --a) {
    idx = idx * resolution.cells[static_cast<std::size_t>(a)] + ijk[static_cast<std::size_t>(a)];
  }
  return idx;
}

std::array<std::uint32_t, 3> EscapeGrid::unravel(std::size_t idx) const noexcept {
  std::array<std::uint32_t, 3> ijk{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    const auto n = resolution.cells[static_cast<std::size_t>(a)];
    ijk[static_cast<std::size_t>(a)] = static_cast<std::uint32_t>(idx % n);
    idx /= n;
  }
  return ijk;
}

namespace {

Point lattice_center(const BoxRegion& box, const GridResolution& res, std::size_t idx) noexcept {
  Point p(res.dim);
  for (int a = 0; a < res.dim; ++a) {
    const auto n = res.cells[static_cast<std::size_t>(a)];
    const auto i = idx % n;
    idx /= n;
    p[a] = box.low()[a] + (static_cast<double>(i) + 0.5) * (box.width(a) / static_cast<double>(n));
  }
  return p;
}

std::uint16_t encode_outcome(const Outcome& o) noexcept {
  return o.escaping() ? static_cast<std::uint16_t>(o.time) : kSentinel;
}

EscapeGrid prepare_grid(const MapInstance& f, const BoxRegion& box, const GridResolution& res,
                        const std::optional<EscapeCertificate>& cert, int horizon) {
  if (box.dim() != f.dim() || res.dim != f.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "grid, box and map dimensions differ");
  }
  if (horizon < 1 || horizon > kMaxHorizon) {
    throw Error(ErrorCode::InvalidArgument, "horizon must lie in [1, 65534]");
  }
  for (int a = 0; a < res.dim; ++a) {
    if (res.cells[static_cast<std::size_t>(a)] == 0) throw Error(ErrorCode::InvalidArgument, "zero cell count");
  }
  if (res.total() > (std::size_t{1} << 30)) throw Error(ErrorCode::InvalidArgument, "more than 2^30 cells");
  EscapeGrid g;
  g.box = box;
  g.resolution = res;
  g.horizon = horizon;
  g.certificate = cert;
  g.cells.assign(res.total(), kSentinel);
  return g;
}

}  // namespace

Point EscapeGrid::cell_center(std::size_t idx) const noexcept { return lattice_center(box, resolution, idx); }

double EscapeGrid::cell_width(int axis) const noexcept {
  return box.width(axis) / static_cast<double>(resolution.cells[static_cast<std::size_t>(axis)]);
}

std::size_t EscapeGrid::escaping_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](std::uint16_t c) { return c != kSentinel; }));
}

std::optional<std::size_t> EscapeGrid::locate(const Point& p) const noexcept {
  if (!box.contains(p)) return std::nullopt;
  std::array<std::uint32_t, 3> ijk{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    const auto n = resolution.cells[static_cast<std::size_t>(a)];
    auto i = static_cast<std::int64_t>(std::floor((p[a] - box.low()[a]) / cell_width(a)));
    i = std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(n) - 1);
    ijk[static_cast<std::size_t>(a)] = static_cast<std::uint32_t>(i);
  }
  return index(ijk);
}

EscapeGrid classify_grid_serial(const MapInstance& f, const BoxRegion& box, const GridResolution& res,
                                const std::optional<EscapeCertificate>& cert, int horizon,
                                const GridOptions& opts) {
  EscapeGrid g = prepare_grid(f, box, res, cert, horizon);
  const EscapeCertificate* c = cert ? &*cert : nullptr;
  for (std::size_t idx = 0; idx < g.cells.size(); ++idx) {
    g.cells[idx] = encode_outcome(classify_point(f, lattice_center(box, res, idx), c, horizon, opts.classify));
  }
  return g;
}

EscapeGrid classify_grid(const MapInstance& f, const BoxRegion& box, const GridResolution& res,
                         const std::optional<EscapeCertificate>& cert, int horizon, const GridOptions& opts) {
  EscapeGrid g = prepare_grid(f, box, res, cert, horizon);
  const EscapeCertificate* c = cert ? &*cert : nullptr;
  const auto total = static_cast<std::int64_t>(g.cells.size());
  std::uint16_t* out = g.cells.data();
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const auto u = static_cast<std::size_t>(idx);
    out[u] = encode_outcome(classify_point(f, lattice_center(box, res, u), c, horizon, opts.classify));
  }
  return g;
}

// ------------------------------------------------------------------ orbits

OrbitRecord orbit_trace(const MapInstance& f, const Point& x, int steps, const EscapeCertificate* cert,
                        const ClassifyOptions& opts) {
  if (steps < 1 || steps > 1'000'000) throw Error(ErrorCode::InvalidArgument, "steps must lie in [1, 10^6]");
  OrbitRecord rec;
  rec.start = x;
  rec.points.reserve(static_cast<std::size_t>(steps) + 1);
  rec.points.push_back(x);
  const double bound = cert ? cert->r_prime : opts.escape_bound;
  const OutcomeKind kind = cert ? OutcomeKind::CertifiedEscaping : OutcomeKind::HeuristicEscaping;
  std::optional<Outcome> outcome;
  Point p = x;
  for (int t = 0; t <= steps; ++t) {
    if (!outcome && t < steps && p.norm() > bound) outcome = Outcome{kind, t};
    if (t == steps) break;
    p = f(p);
    if (!p.is_finite()) {
      if (!outcome) outcome = Outcome{OutcomeKind::Overflowed, t + 1};
      break;
    }
    rec.points.push_back(p);
  }
  rec.outcome = outcome.value_or(Outcome{OutcomeKind::HorizonBounded, steps});
  return rec;
}

std::optional<double> open_neighbourhood_radius(const MapInstance& f, const Point& x,
                                                const EscapeCertificate& cert, int horizon, int max_halvings) {
  if (!classify_point(f, x, &cert, horizon).certified()) return std::nullopt;
  double delta = 1.0;
  for (int j = 1; j <= max_halvings; ++j) {
    delta *= 0.5;
    bool all = true;
    for (int a = 0; a < x.dim() && all; ++a) {
      for (const double s : {-1.0, 1.0}) {
        Point q = x;
        q[a] += s * delta;
        if (!classify_point(f, q, &cert, horizon).certified()) {
          all = false;
          break;
        }
      }
    }
    if (all) return delta;
  }
  return std::nullopt;
}

std::vector<Point> certificate_violations(const MapInstance& f, const EscapeCertificate& cert,
                                          std::size_t samples, std::uint64_t seed) {
  std::vector<Point> bad;
  std::uint64_t state = seed;
  const int n = f.dim();
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = cert.r_prime * (1.0 + 3.0 * unit_double(splitmix64(state)));
    const double t = 2.0 * std::numbers::pi * unit_double(splitmix64(state));
    Point d(n);
    if (n == 2) {
      d = Point(std::cos(t), std::sin(t));
    } else {
      const double z = 2.0 * unit_double(splitmix64(state)) - 1.0;
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      d = Point(s * std::cos(t), s * std::sin(t), z);
    }
    const Point x = r * d;
    if (!(f(x).norm() > 2.0 * x.norm())) bad.push_back(x);
  }
  return bad;
}

}  // namespace qrdyn
