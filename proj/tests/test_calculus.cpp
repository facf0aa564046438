#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <omp.h>

#include "gen.hpp"
#include "qrdyn/calculus.hpp"
#include "qrdyn/error.hpp"
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

// K_O and K_I of a linear map from an independent SVD.
std::pair<double, double> linear_dilatations(const Eigen::Matrix3d& a, int n) {
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(a.topLeftCorner(n, n)).singularValues();
  double det = 1.0;
  for (int i = 0; i < n; ++i) det *= s(i);
  return {std::pow(s(0), n) / det, det / std::pow(s(n - 1), n)};
}

MapInstance linear_map(const Eigen::Matrix3d& a, int n) {
  MapMetadata meta;
  meta.dimension = n;
  meta.name = "linear";
  return make_custom(meta, [a, n](const Point& x) {
    Point y(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) y[i] += a(i, j) * x[j];
    return y;
  });
}

}  // namespace

TEST(NumericJacobian, LinearMapIsExact) {
  Eigen::Matrix3d a;
  a << 1, 2, 0, -1, 3, 1, 0.5, 0, 2;
  const auto f = linear_map(a, 3);
  const Matrix j = numeric_jacobian(f, Point(0.3, -0.2, 5.0));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(j(r, c), a(r, c), 1e-9);
}

TEST(Dilatation, LinearMapsMatchSvdOracle) {
  Gen gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(2, 3);
    Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = gen.uniform(-2, 2);
    if (a.topLeftCorner(n, n).determinant() <= 0.05) continue;  // keep orientation-preserving, non-degenerate
    const auto [ko, ki] = linear_dilatations(a, n);
    const auto q = dilatation_at(linear_map(a, n), gen.point(n, -1, 1));
    EXPECT_NEAR(q.outer, ko, 1e-6 * ko);
    EXPECT_NEAR(q.inner, ki, 1e-6 * ki);
  }
}

TEST(Dilatation, HolomorphicIsConformal) {
  const auto f = make_complex_poly({cd(0.3, 0.1), cd(-1), cd(0), cd(2, 1)});
  Gen gen(32);
  for (int i = 0; i < 200; ++i) {
    const auto q = try_dilatation_at(f, gen.point(2, -2, 2));
    if (!q) continue;
    EXPECT_NEAR(q->outer, 1.0, 1e-6);
    EXPECT_NEAR(q->inner, 1.0, 1e-6);
  }
}

TEST(Dilatation, WindingValuesOffTheAxis) {
  // Singular values k, 1, 1: K_O = k², K_I = k.
  for (int k = 2; k <= 4; ++k) {
    const auto q = dilatation_at(make_winding(3, k), Point(1.2, 0.7, -0.4));
    EXPECT_NEAR(q.outer, k * k, 1e-6 * k * k);
    EXPECT_NEAR(q.inner, k, 1e-6 * k);
  }
}

TEST(Dilatation, BranchPointSuspectedAtCriticalPoint) {
  EXPECT_EQ(code_of([] { dilatation_at(make_zsquared(), Point(0.0, 0.0)); }), ErrorCode::BranchPointSuspected);
  EXPECT_FALSE(try_dilatation_at(make_zsquared(), Point(0.0, 0.0)).has_value());
}

TEST(Dilatation, EstimateForWindingOffAxis) {
  const auto e = estimate_dilatation(make_winding(3, 3), BoxRegion(Point(0.5, 0.5, -1.0), Point(2.0, 2.0, 1.0)), 2000);
  EXPECT_NEAR(e.inner, 3.0, 0.03);
  EXPECT_NEAR(e.outer, 9.0, 0.09);
  EXPECT_EQ(e.samples_used, 2000u);
}

TEST(Dilatation, EstimateNeedsEnoughSamples) {
  EXPECT_EQ(code_of([] { estimate_dilatation(make_zsquared(), BoxRegion::cube(2, -1, 1), 99); }),
            ErrorCode::InvalidArgument);
}

TEST(Dilatation, EstimateIsThreadCountIndependent) {
  const auto f = make_conjugated_quadratic(2.0);
  const auto region = BoxRegion::cube(2, -1, 1);
  omp_set_num_threads(1);
  const auto a = estimate_dilatation(f, region, 5000, 9);
  omp_set_num_threads(4);
  const auto b = estimate_dilatation(f, region, 5000, 9);
  EXPECT_EQ(a.outer, b.outer);
  EXPECT_EQ(a.inner, b.inner);
  EXPECT_EQ(a.argmax_point, b.argmax_point);
  EXPECT_EQ(a.rejected_near_branch, b.rejected_near_branch);
}

TEST(Dilatation, ConjugatedQuadraticBoundedByStretchSquared) {
  // Oracle: pointwise quotients of the exact Jacobian via an independent SVD.
  const auto f = make_conjugated_quadratic(2.0);
  const auto e = estimate_dilatation(f, BoxRegion::cube(2, -1, 1), 4000, 1);
  double sup = 0.0;
  Gen gen(33);
  for (int i = 0; i < 4000; ++i) {
    const Point x = gen.point(2, -1, 1);
    const Matrix j = f.exact_jacobian(x);
    Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) a(r, c) = j(r, c);
    if (x.norm() < 1e-3) continue;
    sup = std::max(sup, linear_dilatations(a, 2).first);
  }
  EXPECT_LE(e.maximal(), 4.0 * (1 + 1e-6));
  EXPECT_NEAR(e.maximal(), sup, 0.05);
}

TEST(Degree, ExactOracleForWinding) {
  const auto d = estimate_degree(make_winding(3, 3), {Point(1.0, 0.5, 0.2), Point(-0.3, 0.8, 1.0)}, BoxRegion::cube(3, -2, 2));
  EXPECT_EQ(d.count, 3u);
  EXPECT_EQ(d.method, DegreeMethod::ExactOracle);
}

TEST(Degree, SubdivisionMatchesOracle) {
  Gen gen(34);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<cd> c(static_cast<std::size_t>(gen.integer(3, 5)));
    for (auto& z : c) z = cd(gen.uniform(-0.5, 0.5), gen.uniform(-0.5, 0.5));
    c.back() = 1.0;
    const auto f = make_complex_poly(c);
    const Point y(gen.uniform(-0.5, 0.5), gen.uniform(-0.5, 0.5));
    DegreeOptions opts;
    opts.force_subdivision = true;
    const auto sub = estimate_degree(f, {y}, BoxRegion::cube(2, -4, 4), opts);
    EXPECT_EQ(sub.method, DegreeMethod::Subdivision);
    EXPECT_EQ(sub.count, f.preimages_exact(y).size());
  }
}

TEST(Degree, SubdivisionOnConjugatedQuadratic) {
  const auto f = make_conjugated_quadratic(2.0);
  const auto pre = subdivision_preimages(f, Point(0.3, 0.4), BoxRegion::cube(2, -3, 3));
  EXPECT_EQ(pre.size(), 2u);
  for (const auto& x : pre) EXPECT_LT(distance(f(x), Point(0.3, 0.4)), 1e-5);
}

TEST(Degree, SearchBoxTooSmall) {
  DegreeOptions opts;
  opts.force_subdivision = true;
  EXPECT_EQ(code_of([&] { estimate_degree(make_zsquared(), {Point(4.0, 0.0)}, BoxRegion::cube(2, -1, 1), opts); }),
            ErrorCode::SearchBoxTooSmall);
}

TEST(LocalIndex, CriticalAndRegularPoints) {
  EXPECT_EQ(estimate_local_index(make_zsquared(), Point(0.0, 0.0), 0.1), 2);
  EXPECT_EQ(estimate_local_index(make_zsquared(), Point(1.0, 0.0), 0.1), 1);
  EXPECT_EQ(estimate_local_index(make_complex_poly({cd(0), cd(0), cd(0), cd(1)}), Point(0.0, 0.0), 0.1), 3);
}

TEST(LocalIndex, WindingAxisAndOffAxis) {
  EXPECT_EQ(estimate_local_index(make_winding(3, 3), Point(0.0, 0.0, 0.5), 0.1), 3);
  EXPECT_EQ(estimate_local_index(make_winding(3, 3), Point(1.0, 0.0, 0.5), 0.1), 1);
}

TEST(LocalIndex, WithoutOracleUsesSubdivision) {
  const auto f = make_conjugated_quadratic(2.0);
  EXPECT_EQ(estimate_local_index(f, Point(0.0, 0.0), 0.1), 2);
  EXPECT_EQ(estimate_local_index(f, Point(0.2, 0.3), 0.05), 1);
}

TEST(LocalIndex, RadiusTooLarge) {
  // Both square roots of f(0.05) lie in the ball of radius 1 around 0.05.
  EXPECT_EQ(code_of([] { estimate_local_index(make_zsquared(), Point(0.05, 0.0), 1.0); }), ErrorCode::RadiusTooLarge);
}

TEST(UqrProbe, ConjugatedQuadraticStaysBounded) {
  const auto probe = uqr_probe(make_conjugated_quadratic(2.0), 5, BoxRegion::cube(2, -0.5, 0.5), 2000);
  ASSERT_EQ(probe.size(), 5u);
  for (const auto& e : probe) EXPECT_LE(e.maximal(), 4.5);
}

TEST(UqrProbe, WindingGrowsGeometrically) {
  const auto probe = uqr_probe(make_winding(3, 3), 4, BoxRegion(Point(0.5, 0.5, -1.0), Point(2.0, 2.0, 1.0)), 1000);
  for (std::size_t k = 0; k < probe.size(); ++k) {
    EXPECT_NEAR(probe[k].inner, std::pow(3.0, static_cast<double>(k + 1)), 0.1 * std::pow(3.0, static_cast<double>(k + 1)));
  }
  EXPECT_EQ(code_of([] { uqr_probe(make_zsquared(), 9, BoxRegion::cube(2, -1, 1), 100); }), ErrorCode::InvalidArgument);
}
