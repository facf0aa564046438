#include "suites.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qrdyn/analysis.hpp"
#include "qrdyn/calculus.hpp"
#include "qrdyn/error.hpp"
#include "qrdyn/sampling.hpp"

namespace qrdyn::cli {

namespace {

CheckReport expect_error(const std::string& name, ErrorCode expected, const std::function<void()>& action,
                         const Point& where) {
  CheckReport rep;
  rep.name = name;
  try {
    action();
    rep.notes.push_back("expected " + std::string(to_string(expected)) + " but the call succeeded");
  } catch (const Error& e) {
    rep.pass = e.code() == expected;
    rep.notes.push_back(std::string(rep.pass ? "expected error raised: " : "wrong error: ") + e.what());
  }
  if (!rep.pass) rep.witnesses.push_back(where);
  return rep;
}

CheckReport single_value(const std::string& name, bool pass, const Point& where) {
  CheckReport rep;
  rep.name = name;
  rep.pass = pass;
  if (!pass) rep.witnesses.push_back(where);
  return rep;
}

EscapeCertificate require_certificate(const MapInstance& f, const RunConfig& cfg, std::vector<std::string>& notes) {
  if (cfg.cert == CertChoice::None) throw UsageError("suite " + cfg.suite + " needs a certificate (--cert auto, holder or doubling)");
  auto cert = choose_certificate(f, cfg.cert, notes);
  if (!cert) throw Error(ErrorCode::ValidationFailed, "no escape certificate could be established");
  return *cert;
}

// Dense samples of the Julia set for the maps where it is known in closed form.
std::optional<std::vector<Point>> reference_julia_curve(const RunConfig& cfg) {
  constexpr int kSamples = 20000;
  double sx = 1.0, sy = 1.0;
  if (cfg.map == "conjugated_quadratic") sx = 1.0 / cfg.lambda;  // λ²x² + y² = 1
  else if (cfg.map == "complex_poly") {
    const auto& c = cfg.coeffs;
    const bool monomial = c.size() == 3 && c[0] == 0.0 && c[1] == 0.0 && std::abs(c[2]) == 1.0;
    if (!monomial) return std::nullopt;
  } else if (cfg.map != "zsquared") {
    return std::nullopt;
  }
  std::vector<Point> curve;
  curve.reserve(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    const double t = 2.0 * std::numbers::pi * i / kSamples;
    curve.emplace_back(sx * std::cos(t), sy * std::sin(t));
  }
  return curve;
}

void polyqr_suite(const RunConfig& cfg, ReportDocument& rep) {
  const MapInstance f = build_map(cfg);
  if (!f.metadata().polynomial_type) throw Error(ErrorCode::NotPolynomialType, cfg.map + " is not of polynomial type");
  const EscapeCertificate cert = require_certificate(f, cfg, rep.notes);
  rep.certificate = cert;
  const BoxRegion box = resolve_box(cfg, 1.25 * cert.r_prime);
  const GridResolution res = resolve_resolution(cfg, cfg.dim == 2 ? 256 : 64);
  GridOptions gopts;
  gopts.threads = cfg.threads;
  const EscapeGrid g = classify_grid(f, box, res, cert, cfg.horizon, gopts);
  const BoundarySet b = extract_boundary(g);
  rep.grid = GridParameters{box, res, cfg.horizon, g.escaping_count(), b.cells.size(), true};

  rep.checks.push_back(certificate_soundness_check(f, cert));
  rep.checks.push_back(neighbourhood_of_infinity_check(f, cert));
  rep.checks.push_back(openness_check(f, g));
  rep.checks.push_back(perfectness_check(f, box, res.cells[0], cert, cfg.horizon));
  if (cfg.horizon >= 2) {
    InvarianceOptions iopts;
    iopts.samples = cfg.samples;
    rep.checks.push_back(invariance_check(f, g, iopts));
  }
  if (2L * cfg.horizon <= kMaxHorizon) {
    rep.checks.push_back(iterate_consistency_check(f, 2, box, res, cfg.horizon, cert.method));
  }
  if (box.contains_ball(cert.r_prime)) {
    rep.checks.push_back(connectivity_check(g));
  } else {
    rep.notes.push_back("connectivity skipped: the box does not contain the closed R' ball");
  }
  rep.checks.push_back(equicontinuity_probe(f, g, b));

  CheckReport fixed;
  fixed.name = "fixed_points";
  try {
    const BoxRegion region = box.contains_ball(cert.r_prime) ? box : BoxRegion::cube(cfg.dim, -1.25 * cert.r_prime, 1.25 * cert.r_prime);
    const auto fp = fixed_point_search(f, region, &cert);
    fixed.pass = true;
    fixed.parameters["count"] = static_cast<double>(fp.points.size());
    fixed.parameters["continuum"] = fp.continuum ? 1.0 : 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < fp.points.size(); ++i) {
      worst = std::max(worst, fp.residuals[i]);
      std::ostringstream os;
      os.precision(17);
      os << "fixed point";
      for (double c : fp.points[i].coords()) os << " " << c;
      os << " residual " << fp.residuals[i];
      fixed.notes.push_back(os.str());
    }
    fixed.parameters["max_residual"] = worst;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoFixedPointFound) throw;
    fixed.notes.push_back(e.what());
    fixed.witnesses.push_back(box.center());
  }
  rep.checks.push_back(fixed);
}

void uqr_suite(const RunConfig& cfg, ReportDocument& rep) {
  const MapInstance f = build_map(cfg);
  const BoxRegion region = resolve_box(cfg, cfg.map == "conjugated_quadratic" ? 0.5 : 1.0);
  const auto probe = uqr_probe(f, cfg.max_k, region, std::max<std::size_t>(cfg.samples, 100), 0);
  CheckReport bound;
  bound.name = "uqr_bound";
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const std::string k = std::to_string(i + 1);
    bound.parameters["inner_k" + k] = probe[i].inner;
    bound.parameters["outer_k" + k] = probe[i].outer;
    worst = std::max(worst, probe[i].maximal());
    if (i > 0) bound.parameters["inner_ratio_k" + k] = probe[i].inner / probe[i - 1].inner;
  }
  const double limit = 1.5 * probe.front().maximal();
  bound.parameters["max_dilatation"] = worst;
  bound.parameters["limit"] = limit;
  bound.pass = worst <= limit;
  if (!bound.pass) {
    for (const auto& e : probe) {
      if (e.maximal() > limit) {
        bound.witnesses.push_back(e.argmax_point);
        break;
      }
    }
    bound.notes.push_back("dilatation of the iterates grows: not uniformly quasiregular");
  }
  rep.checks.push_back(bound);

  const auto curve = reference_julia_curve(cfg);
  if (!curve) {
    rep.notes.push_back("no closed-form Julia set for this map; boundary comparison skipped");
    return;
  }
  const EscapeCertificate cert = require_certificate(f, cfg, rep.notes);
  rep.certificate = cert;
  const BoxRegion box = cfg.box_given ? region : BoxRegion::cube(2, -1.25, 1.25);
  const GridResolution res = resolve_resolution(cfg, 512);
  GridOptions gopts;
  gopts.threads = cfg.threads;
  const EscapeGrid g = classify_grid(f, box, res, cert, cfg.horizon, gopts);
  const BoundarySet b = extract_boundary(g);
  rep.grid = GridParameters{box, res, cfg.horizon, g.escaping_count(), b.cells.size(), true};
  const double h = hausdorff_to_curve(g, b, *curve);
  const double tol = 2.0 * std::max(g.cell_width(0), g.cell_width(1));
  CheckReport julia;
  julia.name = "julia_boundary";
  julia.parameters["hausdorff"] = h;
  julia.parameters["tolerance"] = tol;
  julia.pass = h <= tol;
  if (!julia.pass) julia.witnesses.push_back(box.center());
  rep.checks.push_back(julia);
}

void sharpness_suite(const RunConfig& cfg, ReportDocument& rep) {
  const MapInstance f = build_map(cfg);
  const int n = f.dim();
  const double k = f.metadata().degree ? static_cast<double>(*f.metadata().degree) : 0.0;
  rep.checks.push_back(expect_error("holder_certificate_fails", ErrorCode::DegreeNotAboveDilatation,
                                    [&] { estimate_certificate(f, CertificateMethod::Holder); }, Point::zero(n)));

  const BoxRegion box = resolve_box(cfg, 2.0);
  const GridResolution res = resolve_resolution(cfg, n == 3 ? 64 : 256);
  GridOptions gopts;
  gopts.threads = cfg.threads;
  gopts.classify.escape_bound = cfg.escape_bound;
  const EscapeGrid g = classify_grid(f, box, res, std::nullopt, cfg.horizon, gopts);
  const BoundarySet b = extract_boundary(g);
  rep.grid = GridParameters{box, res, cfg.horizon, g.escaping_count(), b.cells.size(), false};
  CheckReport empty;
  empty.name = "empty_escaping_set";
  empty.parameters["escaping_cells"] = static_cast<double>(g.escaping_count());
  empty.pass = g.escaping_count() == 0;
  for (std::size_t i = 0; i < g.cells.size() && empty.witnesses.size() < 16; ++i) {
    if (g.escaping(i)) empty.witnesses.push_back(g.cell_center(i));
  }
  rep.checks.push_back(empty);

  // Sample away from the branch axis, where the Jacobian is singular.
  const BoxRegion off_axis = n == 3 ? BoxRegion(Point(0.5, 0.5, -1.0), Point(2.0, 2.0, 1.0))
                                    : BoxRegion(Point(0.5, 0.5), Point(2.0, 2.0));
  const auto dil = estimate_dilatation(f, off_axis, std::max<std::size_t>(cfg.samples, 100), 0);
  const double ko = std::pow(k, n - 1);
  CheckReport kd;
  kd.name = "dilatation_matches_degree";
  kd.parameters["inner"] = dil.inner;
  kd.parameters["outer"] = dil.outer;
  kd.parameters["expected_inner"] = k;
  kd.parameters["expected_outer"] = ko;
  kd.pass = dil.inner >= 0.95 * k && dil.inner <= 1.05 * k && dil.outer >= 0.9 * ko && dil.outer <= 1.1 * ko;
  if (!kd.pass) kd.witnesses.push_back(dil.argmax_point);
  rep.checks.push_back(kd);

  std::vector<Point> targets;
  for (std::uint64_t i = 0; i < 8; ++i) targets.push_back(f(halton_point(off_axis, i, 3)));
  const auto deg = estimate_degree(f, targets, box);
  CheckReport dc = single_value("degree", static_cast<double>(deg.count) == k, targets.front());
  dc.parameters["degree"] = static_cast<double>(deg.count);
  dc.notes.push_back("method: " + to_string(deg.method));
  rep.checks.push_back(dc);

  Point axis = Point::zero(n);
  if (n == 3) axis[2] = 0.5;
  const int index = estimate_local_index(f, axis, cfg.index_radius);
  CheckReport ic = single_value("branch_axis_index", index == static_cast<int>(k), axis);
  ic.parameters["index"] = index;
  rep.checks.push_back(ic);
}

void essential_suite(const RunConfig& cfg, ReportDocument& rep) {
  const MapInstance f = build_map(cfg);
  const int n = f.dim();
  rep.checks.push_back(expect_error("holder_certificate_fails", ErrorCode::NotPolynomialType,
                                    [&] { estimate_certificate(f, CertificateMethod::Holder); }, Point::zero(n)));
  UnboundedProbeOptions popts;
  popts.horizon = cfg.horizon;
  popts.escape_bound = cfg.escape_bound;
  rep.checks.push_back(unbounded_boundary_probe(f, cfg.radii, popts));

  if (cfg.map == "zorich") {
    // |Z(x)| = e^{x3}: the exponential growth along the third axis.
    CheckReport law;
    law.name = "norm_law";
    const BoxRegion region = resolve_box(cfg, 4.0);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const Point x = halton_point(region, i, 5);
      const double err = std::abs(std::log(f(x).norm()) - x[2]) / std::max(1.0, std::abs(x[2]));
      if (err > 1e-12 && law.witnesses.size() < 16) law.witnesses.push_back(x);
      worst = std::max(worst, err);
    }
    law.parameters["max_relative_error"] = worst;
    law.pass = law.witnesses.empty();
    rep.checks.push_back(law);
  }
  rep.notes.push_back("no escape certificate exists for this map; escape claims are heuristic");
}

}  // namespace

std::optional<EscapeCertificate> choose_certificate(const MapInstance& f, CertChoice choice,
                                                    std::vector<std::string>& notes) {
  switch (choice) {
    case CertChoice::None: return std::nullopt;
    case CertChoice::Holder: return estimate_certificate(f, CertificateMethod::Holder);
    case CertChoice::Doubling: return estimate_certificate(f, CertificateMethod::DoublingSearch);
    case CertChoice::Auto: break;
  }
  if (!f.metadata().polynomial_type) {
    notes.push_back("no certificate: the map is not of polynomial type");
    return std::nullopt;
  }
  try {
    return estimate_certificate(f, CertificateMethod::Holder);
  } catch (const Error& e) {
    notes.push_back(std::string("holder certificate unavailable (") + e.what() + "); trying the doubling search");
  }
  try {
    return estimate_certificate(f, CertificateMethod::DoublingSearch);
  } catch (const Error& e) {
    notes.push_back(std::string("doubling search failed (") + e.what() + "); running uncertified");
  }
  return std::nullopt;
}

void run_suite(const RunConfig& cfg, ReportDocument& report) {
  if (cfg.suite == "polyqr") polyqr_suite(cfg, report);
  else if (cfg.suite == "uqr") uqr_suite(cfg, report);
  else if (cfg.suite == "sharpness") sharpness_suite(cfg, report);
  else if (cfg.suite == "essential") essential_suite(cfg, report);
  else throw UsageError("unknown suite '" + cfg.suite + "'");
}

}  // namespace qrdyn::cli
