#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "qrdyn/analysis.hpp"
#include "qrdyn/error.hpp"

using namespace qrdyn;
using qrdyn::testing::Gen;
using cd = std::complex<double>;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

// Hand-built grid: every cell escaping at time 0 except the listed ones.
EscapeGrid synthetic(std::uint32_t n, const std::vector<std::size_t>& bounded, double half = 3.0) {
  EscapeGrid g;
  g.box = BoxRegion::cube(2, -half, half);
  g.resolution = GridResolution::uniform(2, n);
  g.horizon = 10;
  g.cells.assign(g.resolution.total(), 0);
  for (auto i : bounded) g.cells[i] = kSentinel;
  EscapeCertificate c;
  c.r_prime = 1.0;
  g.certificate = c;
  return g;
}

// Reference boundary by brute force over explicit (i, j) offsets.
std::vector<std::size_t> brute_boundary(const EscapeGrid& g) {
  const int nx = static_cast<int>(g.resolution.cells[0]), ny = static_cast<int>(g.resolution.cells[1]);
  std::vector<std::size_t> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      bool esc = false, sent = false;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          (g.cells[static_cast<std::size_t>(a + nx * b)] == kSentinel ? sent : esc) = true;
        }
      if (esc && sent) out.push_back(static_cast<std::size_t>(i + nx * j));
    }
  return out;
}

struct Fixture {
  MapInstance f = make_zsquared();
  EscapeCertificate cert = estimate_certificate(f, CertificateMethod::Holder);
  EscapeGrid grid(std::uint32_t n, int horizon = 100, double half = 2.5) const {
    return classify_grid(f, BoxRegion::cube(2, -half, half), GridResolution::uniform(2, n), cert, horizon);
  }
};

}  // namespace

TEST(Boundary, MatchesBruteForceAndSerial) {
  Gen gen(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<std::uint32_t>(gen.integer(3, 40));
    std::vector<std::size_t> bounded;
    for (std::size_t i = 0; i < std::size_t{n} * n; ++i)
      if (gen.uniform(0, 1) < 0.3) bounded.push_back(i);
    const auto g = synthetic(n, bounded);
    const auto b = extract_boundary(g);
    EXPECT_EQ(b.cells, brute_boundary(g));
    EXPECT_EQ(b.cells, extract_boundary_serial(g).cells);
    EXPECT_TRUE(b.matches(g));
  }
}

TEST(Boundary, ZSquaredAnnulus) {
  Fixture fx;
  const auto g = fx.grid(256);
  const auto b = extract_boundary(g);
  const double w = g.cell_width(0);
  for (auto c : b.cells) EXPECT_NEAR(g.cell_center(c).norm(), 1.0, 2.0 * w);
}

TEST(Boundary, IsolatedCellFixture) {
  // One bounded cell in a sea of escaping cells: its 3×3 block is boundary,
  // nothing isolated. Two far-apart singleton boundary cells need a custom set.
  const auto g = synthetic(9, {40});
  const auto b = extract_boundary(g);
  EXPECT_EQ(b.cells.size(), 9u);
  EXPECT_TRUE(isolated_boundary_cells(b).empty());
  BoundarySet lone{g.box, g.resolution, {0, 40}};
  EXPECT_EQ(isolated_boundary_cells(lone), (std::vector<std::size_t>{0, 40}));
}

TEST(Connectivity, ZSquaredHasOneComponent) {
  Fixture fx;
  const auto rep = connectivity_check(fx.grid(128));
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.parameters.at("components"), 1.0);
}

TEST(Connectivity, IslandIsReported) {
  // A ring of bounded cells encloses one escaping cell.
  std::vector<std::size_t> ring;
  const std::uint32_t n = 11;
  for (std::uint32_t j = 3; j <= 7; ++j)
    for (std::uint32_t i = 3; i <= 7; ++i)
      if (!(i == 5 && j == 5)) ring.push_back(i + n * j);
  const auto g = synthetic(n, ring);
  const auto rep = connectivity_check(g);
  EXPECT_FALSE(rep.pass);
  EXPECT_TRUE(rep.well_formed());
  ASSERT_EQ(rep.witness_cells.size(), 1u);
  EXPECT_EQ(rep.witness_cells[0], 5u + n * 5u);
}

TEST(Connectivity, Preconditions) {
  Fixture fx;
  EXPECT_EQ(code_of([&] { connectivity_check(fx.grid(32, 50, 1.5)); }), ErrorCode::BoxTooSmall);
  auto g = fx.grid(32);
  g.certificate.reset();
  EXPECT_EQ(code_of([&] { connectivity_check(g); }), ErrorCode::NotApplicable);
}

TEST(Invariance, ZSquaredAgrees) {
  Fixture fx;
  const auto rep = invariance_check(fx.f, fx.grid(256));
  EXPECT_TRUE(rep.pass);
  EXPECT_GE(rep.parameters.at("agreement_fraction"), 0.99);
  EXPECT_EQ(rep.parameters.at("certified_mismatches"), 0.0);
}

TEST(Invariance, WrongMapIsCaught) {
  // A grid of z² checked against 2z²: cells with 1/2 < |x| < 1 are bounded
  // for z² but their images escape, and the reverse never happens, so
  // disagreements are only indeterminate; the grid of 2z² checked against z²
  // has certified-escaping cells whose images stay bounded.
  Fixture fx;
  const auto g2 = make_complex_poly({cd(0), cd(0), cd(2)});
  const auto cert2 = estimate_certificate(g2, CertificateMethod::Holder);
  const auto grid = classify_grid(g2, BoxRegion::cube(2, -2.5, 2.5), GridResolution::uniform(2, 128), cert2, 100);
  const auto rep = invariance_check(fx.f, grid);
  EXPECT_FALSE(rep.pass);
  EXPECT_TRUE(rep.well_formed());
}

TEST(IterateConsistency, IteratesShareTheEscapingSet) {
  Fixture fx;
  const auto box = BoxRegion::cube(2, -2.5, 2.5);
  const auto res = GridResolution::uniform(2, 128);
  EXPECT_TRUE(iterate_consistency_check(fx.f, 2, box, res, 50, CertificateMethod::Holder).pass);
  EXPECT_TRUE(iterate_consistency_check(fx.f, 3, box, res, 30, CertificateMethod::Holder).pass);
  EXPECT_EQ(code_of([&] { iterate_consistency_check(fx.f, 4, box, res, 30, CertificateMethod::Holder); }),
            ErrorCode::InvalidArgument);
}

TEST(IterateConsistency, DifferentMapsDisagree) {
  Fixture fx;
  const auto g2 = make_complex_poly({cd(0), cd(0), cd(2)});
  const auto cert2 = estimate_certificate(g2, CertificateMethod::Holder);
  const auto rep = escaping_set_agreement(fx.f, fx.cert, 100, g2, cert2, 100, BoxRegion::cube(2, -2.5, 2.5),
                                          GridResolution::uniform(2, 64));
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.parameters.at("symmetric_difference"), 0.0);
  for (const auto& w : rep.witnesses) {
    EXPECT_GT(w.norm(), 0.45);
    EXPECT_LT(w.norm(), 1.05);
  }
}

TEST(Equicontinuity, ZSquaredDichotomy) {
  Fixture fx;
  const auto g = fx.grid(128);
  const auto rep = equicontinuity_probe(fx.f, g, extract_boundary(g));
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.parameters.at("interior_cells_tested"), 0.0);
}

TEST(Equicontinuity, MismatchedBoundaryRejected) {
  Fixture fx;
  const auto g = fx.grid(64);
  const auto other = extract_boundary(fx.grid(32));
  EXPECT_EQ(code_of([&] { equicontinuity_probe(fx.f, g, other); }), ErrorCode::GridMismatch);
}

TEST(FixedPoints, ZSquared) {
  Fixture fx;
  const auto r = fixed_point_search(fx.f, BoxRegion::cube(2, -2.5, 2.5), &fx.cert);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_FALSE(r.continuum);
  std::vector<Point> want{Point(0.0, 0.0), Point(1.0, 0.0)};
  for (const auto& w : want) {
    double best = 1e9;
    for (const auto& p : r.points) best = std::min(best, distance(p, w));
    EXPECT_LT(best, 1e-9);
  }
  for (double res : r.residuals) EXPECT_LE(res, 1e-9);
}

TEST(FixedPoints, CubicMatchesRoots) {
  // Fixed points of p are the roots of p(z) − z.
  const std::vector<cd> c{cd(0.2, 0.1), cd(0.5), cd(0), cd(1)};
  const auto f = make_complex_poly(c);
  auto shifted = c;
  shifted[1] -= 1.0;
  const auto roots = polynomial_roots(shifted);
  const auto r = fixed_point_search(f, BoxRegion::cube(2, -3, 3));
  ASSERT_EQ(r.points.size(), roots.size());
  for (const auto& z : roots) {
    double best = 1e9;
    for (const auto& p : r.points) best = std::min(best, distance(p, Point(z.real(), z.imag())));
    EXPECT_LT(best, 1e-8);
  }
}

TEST(FixedPoints, WindingHasAContinuum) {
  const auto r = fixed_point_search(make_winding(3, 3), BoxRegion::cube(3, -2, 2));
  EXPECT_TRUE(r.continuum);
  const auto w = make_winding(3, 3);
  for (const auto& p : r.points) EXPECT_LT(distance(w(p), p), 1e-9);
}

TEST(FixedPoints, Preconditions) {
  Fixture fx;
  EXPECT_EQ(code_of([&] { fixed_point_search(make_zorich(), BoxRegion::cube(3, -1, 1)); }), ErrorCode::NotApplicable);
  EXPECT_EQ(code_of([&] { fixed_point_search(fx.f, BoxRegion::cube(2, -1, 1), &fx.cert); }), ErrorCode::BoxTooSmall);
  // z² + 10 has its fixed points near ±3.2i, outside this box.
  const auto far = make_complex_poly({cd(10), cd(0), cd(1)});
  EXPECT_EQ(code_of([&] { fixed_point_search(far, BoxRegion::cube(2, -1, 1)); }), ErrorCode::NoFixedPointFound);
}

TEST(UnboundedProbe, OnlyForEssentialSingularities) {
  EXPECT_EQ(code_of([] { unbounded_boundary_probe(make_zsquared(), {10.0}); }), ErrorCode::NotApplicable);
}

TEST(UnboundedProbe, ZorichFindsBothKinds) {
  UnboundedProbeOptions opts;
  opts.directions = 1024;
  const auto rep = unbounded_boundary_probe(make_zorich(), {10.0, 20.0}, opts);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.witnesses.size(), 4u);
  bool flagged = false;
  for (const auto& n : rep.notes) flagged = flagged || n.find("uncertified") != std::string::npos;
  EXPECT_TRUE(flagged);
}

TEST(SmallChecks, ZSquaredPasses) {
  Fixture fx;
  const auto g = fx.grid(128);
  EXPECT_TRUE(openness_check(fx.f, g).pass);
  EXPECT_TRUE(neighbourhood_of_infinity_check(fx.f, fx.cert).pass);
  EXPECT_TRUE(certificate_soundness_check(fx.f, fx.cert).pass);
  const auto perfect = perfectness_check(fx.f, BoxRegion::cube(2, -2.5, 2.5), 256, fx.cert, 100);
  EXPECT_TRUE(perfect.pass);
  EXPECT_EQ(perfect.parameters.at("boundary_grows"), 1.0);
}

TEST(SmallChecks, BogusCertificateIsCaught) {
  Fixture fx;
  auto bogus = fx.cert;
  bogus.r_prime = 1.2;  // |z²| > 2|z| fails for 1.2 < |z| < 2
  const auto rep = certificate_soundness_check(fx.f, bogus);
  EXPECT_FALSE(rep.pass);
  EXPECT_TRUE(rep.well_formed());
  EXPECT_FALSE(neighbourhood_of_infinity_check(fx.f, bogus).pass);
}

TEST(Hausdorff, UnitCircleAtFineResolution) {
  Fixture fx;
  const auto g = fx.grid(256);
  std::vector<Point> circle;
  for (int i = 0; i < 4000; ++i) {
    const double t = 2 * std::numbers::pi * i / 4000;
    circle.emplace_back(std::cos(t), std::sin(t));
  }
  const double h = hausdorff_to_curve(g, extract_boundary(g), circle);
  EXPECT_LE(h, 2.0 * g.cell_width(0));
  std::vector<Point> shifted;
  for (const auto& p : circle) shifted.push_back(p + Point(0.5, 0.0));
  EXPECT_GT(hausdorff_to_curve(g, extract_boundary(g), shifted), 0.4);
}

TEST(Examples, ConjugatedQuadraticFixedPoints) {
  const auto g = make_conjugated_quadratic(2.0);
  const auto r = fixed_point_search(g, BoxRegion::cube(2, -5.0, 5.0));
  ASSERT_EQ(r.points.size(), 2u);
  for (const auto& w : {Point(0.0, 0.0), Point(0.5, 0.0)}) {
    double best = 1e9;
    for (const auto& p : r.points) best = std::min(best, distance(p, w));
    EXPECT_LT(best, 1e-9);
  }
}

TEST(Examples, ConstantMapHasNoBoundaryOscillation) {
  Fixture fx;
  const auto g = fx.grid(64);
  MapMetadata meta;
  meta.dimension = 2;
  meta.name = "constant";
  const auto c = make_custom(meta, [](const Point&) { return Point(0.25, 0.0); });
  EquicontinuityOptions opts;
  opts.max_boundary_cells = 16;
  const auto rep = equicontinuity_probe(c, g, extract_boundary(g), opts);
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.witnesses.empty());
}

TEST(Examples, ZorichProbeAtLargeRadius) {
  UnboundedProbeOptions opts;
  opts.directions = 1024;
  const auto rep = unbounded_boundary_probe(make_zorich(), {100.0}, opts);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.witnesses.size(), 2u);
}
