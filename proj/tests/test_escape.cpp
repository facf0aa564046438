#include <gtest/gtest.h>

#include <omp.h>

#include <cmath>

#include "gen.hpp"
#include "qrdyn/error.hpp"
#include "qrdyn/escape.hpp"
#include "qrdyn/maps.hpp"

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

// Escape time of z² at a real point, by hand: |x|^(2^t) > R′.
int zsquared_escape_time(double r, double r_prime) {
  int t = 0;
  while (!(r > r_prime)) {
    r *= r;
    ++t;
  }
  return t;
}

}  // namespace

TEST(HolderExponent, Formula) {
  EXPECT_DOUBLE_EQ(holder_exponent(2, 1.0, 2), 2.0);
  EXPECT_DOUBLE_EQ(holder_exponent(3, 3.0, 3), 1.0);
  EXPECT_NEAR(holder_exponent(8, 2.0, 3), 2.0, 1e-15);
}

TEST(Certificate, ZSquaredHolder) {
  const auto c = estimate_certificate(make_zsquared(), CertificateMethod::Holder);
  EXPECT_EQ(c.alpha, 2.0);
  EXPECT_NEAR(c.C, 1.0, 1e-9);
  EXPECT_GE(c.r_prime, 2.0);
  EXPECT_LE(c.r_prime, 2.2);
  ASSERT_FALSE(c.validation.empty());
  for (const auto& v : c.validation) EXPECT_GT(v.ratio, 2.0);
}

TEST(Certificate, ScaledQuadratic) {
  // |2z²| ≥ 2|z|^2, so C = 1/2 and R′ = (2C)^{1/(α−1)} = 1 before inflation.
  const auto c = estimate_certificate(make_complex_poly({cd(0), cd(0), cd(2)}), CertificateMethod::Holder);
  EXPECT_NEAR(c.C, 0.5, 1e-9);
  EXPECT_GE(c.r_prime, 1.0);
  EXPECT_LE(c.r_prime, 1.1);
}

TEST(Certificate, WindingIsSharp) {
  EXPECT_EQ(code_of([] { estimate_certificate(make_winding(3, 3), CertificateMethod::Holder); }),
            ErrorCode::DegreeNotAboveDilatation);
}

TEST(Certificate, ZorichHasNone) {
  EXPECT_EQ(code_of([] { estimate_certificate(make_zorich(), CertificateMethod::Holder); }), ErrorCode::NotPolynomialType);
  EXPECT_EQ(code_of([] { estimate_certificate(make_zorich(), CertificateMethod::DoublingSearch); }),
            ErrorCode::NotPolynomialType);
}

TEST(Certificate, ConjugatedQuadraticNeedsDoublingSearch) {
  const auto f = make_conjugated_quadratic(2.0);
  EXPECT_EQ(code_of([&] { estimate_certificate(f, CertificateMethod::Holder); }), ErrorCode::DegreeNotAboveDilatation);
  const auto c = estimate_certificate(f, CertificateMethod::DoublingSearch);
  EXPECT_EQ(c.method, CertificateMethod::DoublingSearch);
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_EQ(c.C, 0.5);
  // min over |x| = r of |f(x)| is r²/λ (along the y-axis) so doubling needs r > 2λ = 4.
  EXPECT_GE(c.r_prime, 4.0);
  EXPECT_LE(c.r_prime, 4.0 * std::pow(2.0, 0.25));
  EXPECT_TRUE(certificate_violations(f, c, 2000, 5).empty());
}

TEST(Certificate, SoundOnRandomPolynomials) {
  Gen gen(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cd> c(static_cast<std::size_t>(gen.integer(3, 6)));
    for (auto& z : c) z = cd(gen.uniform(-3, 3), gen.uniform(-3, 3));
    const auto f = make_complex_poly(c);
    const auto cert = estimate_certificate(f, CertificateMethod::Holder);
    EXPECT_TRUE(certificate_violations(f, cert, 500, static_cast<std::uint64_t>(trial)).empty());
  }
}

TEST(ClassifyPoint, ZSquaredKnownOrbits) {
  const auto f = make_zsquared();
  const auto cert = estimate_certificate(f, CertificateMethod::Holder);
  EXPECT_EQ(classify_point(f, Point(3.0, 0.0), &cert, 100), (Outcome{OutcomeKind::CertifiedEscaping, 0}));
  EXPECT_EQ(classify_point(f, Point(0.5, 0.0), &cert, 100), (Outcome{OutcomeKind::HorizonBounded, 100}));
  EXPECT_EQ(classify_point(f, Point(0.0, 1.0), &cert, 100).kind, OutcomeKind::HorizonBounded);
  for (double r : {1.01, 1.1, 1.5, 1.9, 1.0001}) {
    const auto o = classify_point(f, Point(r, 0.0), &cert, 100);
    EXPECT_TRUE(o.certified());
    EXPECT_EQ(o.time, zsquared_escape_time(r, cert.r_prime)) << r;
  }
}

TEST(ClassifyPoint, HeuristicAndOverflow) {
  const auto f = make_zsquared();
  const auto o = classify_point(f, Point(1.5, 0.0), nullptr, 100);
  EXPECT_EQ(o.kind, OutcomeKind::HeuristicEscaping);
  // 1.5^(2^t) > 1e10 first at t = 6.
  EXPECT_EQ(o.time, 6);
  MapMetadata meta;
  meta.name = "blowup";
  const auto g = make_custom(meta, [](const Point& x) { return Point(x[0] * 1e300 * 1e300, x[1]); });
  const auto p = classify_point(g, Point(1.0, 0.0), nullptr, 10, ClassifyOptions{1e308});
  EXPECT_EQ(p.kind, OutcomeKind::Overflowed);
  EXPECT_EQ(p.time, 1);
}

TEST(ClassifyPoint, HorizonBoundsTheTime) {
  const auto f = make_zsquared();
  const auto cert = estimate_certificate(f, CertificateMethod::Holder);
  // 1 + 1e-9 needs about 30 squarings.
  EXPECT_EQ(classify_point(f, Point(1.0 + 1e-9, 0.0), &cert, 10).kind, OutcomeKind::HorizonBounded);
  EXPECT_TRUE(classify_point(f, Point(1.0 + 1e-9, 0.0), &cert, 60).certified());
}

TEST(Grid, IndexAndUnravelRoundTrip) {
  EscapeGrid g;
  g.box = BoxRegion::cube(3, -1, 1);
  g.resolution = GridResolution{{4, 5, 6}, 3};
  for (std::size_t i = 0; i < g.resolution.total(); ++i) {
    const auto ijk = g.unravel(i);
    EXPECT_EQ(g.index(std::span<const std::uint32_t>(ijk.data(), 3)), i);
    EXPECT_EQ(g.locate(g.cell_center(i)), i);
  }
  EXPECT_FALSE(g.locate(Point(1.5, 0.0, 0.0)).has_value());
  // First axis fastest.
  EXPECT_EQ(g.unravel(1)[0], 1u);
  EXPECT_EQ(g.unravel(4)[1], 1u);
}

TEST(Grid, ZSquaredCellsMatchPointClassifier) {
  const auto f = make_zsquared();
  const auto cert = estimate_certificate(f, CertificateMethod::Holder);
  const auto box = BoxRegion::cube(2, -2.5, 2.5);
  const auto g = classify_grid(f, box, GridResolution::uniform(2, 64), cert, 50);
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    const auto o = classify_point(f, g.cell_center(i), &cert, 50);
    EXPECT_EQ(g.cells[i], o.escaping() ? o.time : kSentinel);
  }
  // Cells whose centers are inside the unit disc never escape.
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    if (g.cell_center(i).norm() < 0.99) EXPECT_FALSE(g.escaping(i));
    if (g.cell_center(i).norm() > 1.01) EXPECT_TRUE(g.escaping(i));
  }
}

TEST(Grid, ParallelEqualsSerialForAnyThreadCount) {
  Gen gen(42);
  const MapInstance maps[] = {make_zsquared(), make_conjugated_quadratic(2.0),
                              make_complex_poly({cd(-0.75, 0.1), cd(0), cd(1)})};
  for (const auto& f : maps) {
    const auto cert = estimate_certificate(f, CertificateMethod::DoublingSearch);
    for (int trial = 0; trial < 3; ++trial) {
      const double lo = gen.uniform(-3, -1), hi = gen.uniform(1, 3);
      const auto box = BoxRegion::cube(2, lo, hi);
      const auto res = GridResolution{{static_cast<std::uint32_t>(gen.integer(17, 90)), static_cast<std::uint32_t>(gen.integer(17, 90)), 1}, 2};
      const auto serial = classify_grid_serial(f, box, res, cert, 80);
      for (int threads : {1, 2, 3, 8}) {
        GridOptions opts;
        opts.threads = threads;
        EXPECT_EQ(classify_grid(f, box, res, cert, 80, opts).cells, serial.cells);
      }
    }
  }
}

TEST(Grid, ThreeDimensionalUncertified) {
  const auto g = classify_grid(make_zorich(), BoxRegion(Point(-2.0, -2.0, 0.0), Point(2.0, 2.0, 3.0)),
                               GridResolution::uniform(3, 8), std::nullopt, 20);
  EXPECT_FALSE(g.certificate.has_value());
  EXPECT_EQ(g.cells, classify_grid_serial(make_zorich(), g.box, g.resolution, std::nullopt, 20).cells);
}

TEST(Grid, RejectsBadInput) {
  const auto f = make_zsquared();
  EXPECT_EQ(code_of([&] { classify_grid(f, BoxRegion::cube(2, -1, 1), GridResolution::uniform(2, 8), std::nullopt, 0); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { classify_grid(f, BoxRegion::cube(2, -1, 1), GridResolution::uniform(2, 8), std::nullopt, 65535); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { classify_grid(f, BoxRegion::cube(3, -1, 1), GridResolution::uniform(2, 8), std::nullopt, 10); }),
            ErrorCode::DimensionMismatch);
}

TEST(Orbit, TraceMatchesIteration) {
  const auto f = make_zsquared();
  const auto cert = estimate_certificate(f, CertificateMethod::Holder);
  const auto orbit = orbit_trace(f, Point(1.1, 0.0), 6, &cert);
  ASSERT_EQ(orbit.points.size(), 7u);
  double r = 1.1;
  for (const auto& p : orbit.points) {
    EXPECT_NEAR(p[0], r, 1e-12 * r);
    r *= r;
  }
  EXPECT_TRUE(orbit.outcome.certified());
  EXPECT_EQ(orbit.outcome.time, zsquared_escape_time(1.1, cert.r_prime));
}

TEST(Openness, EscapingPointsHaveEscapingNeighbourhoods) {
  const auto f = make_zsquared();
  const auto cert = estimate_certificate(f, CertificateMethod::Holder);
  const auto d = open_neighbourhood_radius(f, Point(1.2, 0.3), cert, 100);
  ASSERT_TRUE(d.has_value());
  // Every perturbation must still escape.
  for (const Point& e : {Point(1.0, 0.0), Point(-1.0, 0.0), Point(0.0, 1.0), Point(0.0, -1.0)}) {
    EXPECT_TRUE(classify_point(f, Point(1.2, 0.3) + *d * e, &cert, 100).certified());
  }
  EXPECT_FALSE(open_neighbourhood_radius(f, Point(0.2, 0.1), cert, 100).has_value());
}

TEST(Examples, ZSquaredOrbits) {
  const auto f = make_zsquared();
  const auto cert = estimate_certificate(f, CertificateMethod::Holder);
  EXPECT_EQ(classify_point(f, Point(2.5, 0.0), &cert, 100), (Outcome{OutcomeKind::CertifiedEscaping, 0}));
  EXPECT_EQ(classify_point(f, Point(1.5, 0.0), &cert, 100), (Outcome{OutcomeKind::CertifiedEscaping, 1}));
  for (int h : {1, 10, 100, 1000}) EXPECT_EQ(classify_point(f, Point(0.3, 0.0), &cert, h).kind, OutcomeKind::HorizonBounded);

  const auto tr = orbit_trace(f, Point(1.1, 0.0), 4);
  ASSERT_EQ(tr.points.size(), 5u);
  const double want[] = {1.1, 1.21, 1.4641, 2.14358881, 4.5949729863572161};
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(tr.points[static_cast<std::size_t>(i)][0], want[i], 1e-12);
    EXPECT_EQ(tr.points[static_cast<std::size_t>(i)][1], 0.0);
  }
}

TEST(Examples, FixedAndNormPreservingOrbits) {
  const auto tr = orbit_trace(make_conjugated_quadratic(2.0), Point(0.5, 0.0), 20);
  for (const auto& p : tr.points) EXPECT_LT(distance(p, Point(0.5, 0.0)), 1e-15);
  Gen gen(71);
  const auto w = make_winding(3, 2);
  for (int i = 0; i < 50; ++i) {
    const Point x = gen.point(3, -3.0, 3.0);
    for (const auto& p : orbit_trace(w, x, 10).points) EXPECT_NEAR(p.norm(), x.norm(), 1e-12 * x.norm());
  }
}
