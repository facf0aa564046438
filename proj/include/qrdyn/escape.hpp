#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qrdyn/geometry.hpp"
#include "qrdyn/maps.hpp"

namespace qrdyn {

enum class CertificateMethod { Holder, DoublingSearch };
std::string to_string(CertificateMethod m);

struct ValidationSample {
  Point point;
  double ratio = 0.0;  // |f(x)| / |x|
};

// Certifies |f(x)| > 2|x| for |x| > r_prime. For the doubling search the
// growth-bound fields are the α = 1, C = 1/2 instance of |f(x)| ≥ |x|^α / C.
struct EscapeCertificate {
  double alpha = 1.0;
  double C = 0.5;
  double R = 1.0;
  double r_prime = 1.0;
  CertificateMethod method = CertificateMethod::Holder;
  std::vector<ValidationSample> validation;
  int inflations = 0;
};

struct CertificateParams {
  double base_radius = 1.0;            // R; smallest sampled sphere
  std::size_t directions = 256;        // per sphere, ≥ 64
  std::size_t radii = 25;              // geometric in [R, 64R]
  std::size_t validation_directions = 256;
  int max_attempts = 10;
  double inflation = 1.5;
  std::uint64_t seed = 0x5eed;
  // Doubling-search ladder.
  double ladder_min = 1.0 / 64.0;
  double ladder_max = 1e8;
  // Used only when K_I is not in the metadata.
  std::size_t dilatation_samples = 4096;
};

// Throws NotPolynomialType, DegreeNotAboveDilatation (α ≤ 1) or
// ValidationFailed.
EscapeCertificate estimate_certificate(const MapInstance& f, CertificateMethod method,
                                       const CertificateParams& params = {});

// The Hölder exponent (d / K_I)^{1/(n-1)}.
double holder_exponent(std::uint64_t degree, double inner_dilatation, int dim);

enum class OutcomeKind { CertifiedEscaping, HeuristicEscaping, HorizonBounded, Overflowed };
std::string to_string(OutcomeKind k);

struct Outcome {
  OutcomeKind kind = OutcomeKind::HorizonBounded;
  int time = 0;  // iterations applied when escape was detected; horizon when bounded

  bool escaping() const noexcept { return kind != OutcomeKind::HorizonBounded; }
  bool certified() const noexcept { return kind == OutcomeKind::CertifiedEscaping; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

inline constexpr double kDefaultEscapeBound = 1e10;  // M_big
inline constexpr int kMaxHorizon = 65534;
inline constexpr std::uint16_t kSentinel = 0xFFFF;

struct ClassifyOptions {
  double escape_bound = kDefaultEscapeBound;  // used without a certificate
};

// Iterate until |f^t(x)| > R′ (certified), |f^t(x)| > M_big without a
// certificate (heuristic), a non-finite coordinate (overflowed), or t = horizon.
Outcome classify_point(const MapInstance& f, const Point& x, const EscapeCertificate* cert,
                       int horizon, const ClassifyOptions& opts = {});

struct GridResolution {
  std::array<std::uint32_t, 3> cells{1, 1, 1};
  int dim = 2;

  static GridResolution uniform(int dim, std::uint32_t n);
  std::size_t total() const noexcept;
  friend bool operator==(const GridResolution&, const GridResolution&) = default;
};

// Per-cell escape time of the cell center, kSentinel when not escaped by the
// horizon. Cells are row-major with the first axis fastest.
struct EscapeGrid {
  BoxRegion box = BoxRegion::cube(2, -1.0, 1.0);
  GridResolution resolution;
  std::vector<std::uint16_t> cells;
  int horizon = 1;
  std::optional<EscapeCertificate> certificate;

  int dim() const noexcept { return resolution.dim; }
  std::size_t index(std::span<const std::uint32_t> ijk) const noexcept;
  std::array<std::uint32_t, 3> unravel(std::size_t idx) const noexcept;
  Point cell_center(std::size_t idx) const noexcept;
  double cell_width(int axis) const noexcept;
  bool escaping(std::size_t idx) const noexcept { return cells[idx] != kSentinel; }
  std::size_t escaping_count() const noexcept;
  // Index of the cell containing p, if inside the box.
  std::optional<std::size_t> locate(const Point& p) const noexcept;
};

struct GridOptions {
  ClassifyOptions classify;
  int threads = 0;  // 0: OpenMP default
};

// OpenMP kernel: disjoint cell ranges, one write per cell. Bitwise identical
// to classify_grid_serial for any thread count.
EscapeGrid classify_grid(const MapInstance& f, const BoxRegion& box, const GridResolution& res,
                         const std::optional<EscapeCertificate>& cert, int horizon,
                         const GridOptions& opts = {});

// Serial reference implementation of classify_grid.
EscapeGrid classify_grid_serial(const MapInstance& f, const BoxRegion& box,
                                const GridResolution& res,
                                const std::optional<EscapeCertificate>& cert, int horizon,
                                const GridOptions& opts = {});

struct OrbitRecord {
  Point start;
  std::vector<Point> points;  // points[0] = start
  Outcome outcome;
};

OrbitRecord orbit_trace(const MapInstance& f, const Point& x, int steps,
                        const EscapeCertificate* cert = nullptr, const ClassifyOptions& opts = {});

// Largest δ = 2^-j (j ≥ 1) found such that all 2n axis perturbations of x by δ
// are certified-escaping within the horizon, if any.
std::optional<double> open_neighbourhood_radius(const MapInstance& f, const Point& x,
                                                const EscapeCertificate& cert, int horizon,
                                                int max_halvings = 50);

// Soundness probe: fresh random points with |x| in [R′, 4R′]
// that violate |f(x)| > 2|x|.
std::vector<Point> certificate_violations(const MapInstance& f, const EscapeCertificate& cert,
                                          std::size_t samples, std::uint64_t seed);

}  // namespace qrdyn
