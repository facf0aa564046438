#include "qrdyn/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "qrdyn/analysis.hpp"
#include "qrdyn/calculus.hpp"
#include "qrdyn/error.hpp"
#include "qrdyn/io.hpp"
#include "qrdyn/sampling.hpp"
#include "suites.hpp"

namespace qrdyn::cli {

namespace {

// Every value-taking option; config-file keys use the same names.
const std::vector<std::pair<std::string, std::string>> kValueOptions = {
    {"map", "map name: winding, zsquared, complex_poly, conjugated_quadratic, zorich"},
    {"k", "winding degree"},
    {"lambda", "conjugated quadratic stretch (> 1)"},
    {"coeffs", "complex_poly coefficients, ascending, re or re:im, comma separated"},
    {"dim", "dimension (2 or 3)"},
    {"box", "lo,hi for every axis or lo1,hi1,lo2,hi2[,lo3,hi3]"},
    {"res", "cells per axis: n or n1,n2[,n3]"},
    {"horizon", "iteration horizon (1..65534)"},
    {"cert", "auto, holder, doubling or none"},
    {"suite", "verify suite: polyqr, uqr, sharpness, essential"},
    {"max-k", "highest iterate for the uqr probe (1..8)"},
    {"samples", "sample count for estimates and invariance"},
    {"radii", "probe radii for the essential suite, comma separated"},
    {"point", "point for the local index estimate, comma separated"},
    {"index-radius", "ball radius for the local index estimate"},
    {"slice-axis", "slice normal for 3D images (0, 1, 2)"},
    {"slice-offset", "slice coordinate along the normal"},
    {"escape-bound", "heuristic escape bound without a certificate"},
    {"grid", "input grid file (render)"},
    {"out-grid", "write the grid file"},
    {"out-voxels", "write a 3D voxel export"},
    {"out-pgm", "write an escape-time PGM slice"},
    {"out-ppm", "write a class PPM slice"},
    {"report", "write the JSON report"},
    {"threads", "worker threads (0: QRDYN_THREADS or OpenMP default)"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": not a finite number: '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v, long lo, long hi) {
  long n = 0;
  try {
    std::size_t used = 0;
    n = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": not an integer: '" + v + "'");
  }
  if (n < lo || n > hi) {
    throw UsageError("--" + key + ": " + v + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return n;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::complex<double> to_complex(const std::string& v) {
  const auto parts = split(v, ':');
  if (parts.size() == 1) return {to_double("coeffs", parts[0]), 0.0};
  if (parts.size() == 2) return {to_double("coeffs", parts[0]), to_double("coeffs", parts[1])};
  throw UsageError("--coeffs: entry '" + v + "' is not re or re:im");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const bool known = key == "timing" || key == "command" ||
                       std::any_of(kValueOptions.begin(), kValueOptions.end(),
                                   [&](const auto& o) { return o.first == key; });
    if (!known) throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Command to_command(const std::string& s) {
  if (s == "classify") return Command::Classify;
  if (s == "render") return Command::Render;
  if (s == "verify") return Command::Verify;
  if (s == "estimate") return Command::Estimate;
  throw UsageError("unknown command '" + s + "' (classify, render, verify, estimate)");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::Render: return "render";
    case Command::Verify: return "verify";
    case Command::Estimate: return "estimate";
  }
  return "?";
}

int default_dim(const std::string& map) { return map == "winding" || map == "zorich" ? 3 : 2; }

void apply(RunConfig& cfg, const std::string& key, const std::string& v) {
  if (key == "map") cfg.map = v;
  else if (key == "k") cfg.k = static_cast<int>(to_long(key, v, 1, 1 << 20));
  else if (key == "lambda") cfg.lambda = to_double(key, v);
  else if (key == "coeffs") {
    cfg.coeffs.clear();
    for (const auto& item : split(v, ',')) cfg.coeffs.push_back(to_complex(item));
  } else if (key == "dim") {
    cfg.dim = static_cast<int>(to_long(key, v, 2, 3));
    cfg.dim_given = true;
  } else if (key == "box") {
    cfg.box = to_doubles(key, v);
    cfg.box_given = true;
  } else if (key == "res") {
    cfg.res.clear();
    for (const auto& item : split(v, ',')) cfg.res.push_back(static_cast<std::uint32_t>(to_long(key, item, 1, 1 << 16)));
    cfg.res_given = true;
  } else if (key == "horizon") cfg.horizon = static_cast<int>(to_long(key, v, 1, kMaxHorizon));
  else if (key == "cert") {
    if (v == "auto") cfg.cert = CertChoice::Auto;
    else if (v == "holder") cfg.cert = CertChoice::Holder;
    else if (v == "doubling") cfg.cert = CertChoice::Doubling;
    else if (v == "none") cfg.cert = CertChoice::None;
    else throw UsageError("--cert: expected auto, holder, doubling or none");
  } else if (key == "suite") cfg.suite = v;
  else if (key == "max-k") cfg.max_k = static_cast<int>(to_long(key, v, 1, 8));
  else if (key == "samples") cfg.samples = static_cast<std::size_t>(to_long(key, v, 1, 100000000));
  else if (key == "radii") cfg.radii = to_doubles(key, v);
  else if (key == "point") cfg.point = to_doubles(key, v);
  else if (key == "index-radius") cfg.index_radius = to_double(key, v);
  else if (key == "slice-axis") cfg.slice_axis = static_cast<int>(to_long(key, v, 0, 2));
  else if (key == "slice-offset") cfg.slice_offset = to_double(key, v);
  else if (key == "escape-bound") cfg.escape_bound = to_double(key, v);
  else if (key == "grid") cfg.grid_in = v;
  else if (key == "out-grid") cfg.out_grid = v;
  else if (key == "out-voxels") cfg.out_voxels = v;
  else if (key == "out-pgm") cfg.out_pgm = v;
  else if (key == "out-ppm") cfg.out_ppm = v;
  else if (key == "report") cfg.report = v;
  else if (key == "threads") cfg.threads = static_cast<int>(to_long(key, v, 0, 1024));
  else if (key == "timing") {
    if (v == "true" || v == "1") cfg.timing = true;
    else if (v == "false" || v == "0") cfg.timing = false;
    else throw UsageError("timing: expected true or false");
  } else throw UsageError("unknown option '" + key + "'");
}

void validate(RunConfig& cfg) {
  if (!cfg.dim_given) cfg.dim = default_dim(cfg.map);
  try {
    const MapInstance f = build_map(cfg);
    if (f.dim() != cfg.dim) {
      throw UsageError("--dim " + std::to_string(cfg.dim) + " does not match map " + cfg.map + " (dimension " +
                       std::to_string(f.dim()) + ")");
    }
  } catch (const Error& e) {
    throw UsageError(std::string("invalid map: ") + e.what());
  }
  if (cfg.box_given) {
    if (cfg.box.size() != 2 && cfg.box.size() != static_cast<std::size_t>(2 * cfg.dim)) {
      throw UsageError("--box needs 2 or 2·dim values");
    }
    for (std::size_t i = 0; i + 1 < cfg.box.size(); i += 2) {
      if (!(cfg.box[i] < cfg.box[i + 1])) throw UsageError("--box: every lower bound must be below its upper bound");
    }
  }
  if (cfg.res_given && cfg.res.size() != 1 && cfg.res.size() != static_cast<std::size_t>(cfg.dim)) {
    throw UsageError("--res needs 1 or dim values");
  }
  if (!(cfg.lambda > 1.0)) throw UsageError("--lambda must exceed 1");
  if (!(cfg.index_radius > 0.0)) throw UsageError("--index-radius must be positive");
  if (!(cfg.escape_bound > 0.0)) throw UsageError("--escape-bound must be positive");
  if (!cfg.point.empty() && cfg.point.size() != static_cast<std::size_t>(cfg.dim)) {
    throw UsageError("--point needs dim values");
  }
  if (cfg.radii.empty()) throw UsageError("--radii needs at least one radius");
  for (double r : cfg.radii) {
    if (!(r > 0.0)) throw UsageError("--radii must be positive");
  }
  if (cfg.command == Command::Verify) {
    static const std::vector<std::string> suites{"polyqr", "uqr", "sharpness", "essential"};
    if (std::find(suites.begin(), suites.end(), cfg.suite) == suites.end()) {
      throw UsageError("verify needs --suite polyqr, uqr, sharpness or essential");
    }
  }
  if (cfg.command == Command::Render) {
    if (cfg.grid_in.empty()) throw UsageError("render needs --grid");
    if (cfg.out_pgm.empty() && cfg.out_ppm.empty()) throw UsageError("render needs --out-pgm or --out-ppm");
  }
  if (!cfg.out_voxels.empty() && cfg.dim != 3) throw UsageError("--out-voxels needs a 3D map");
}

MapInstance make_map(const RunConfig& cfg) {
  if (cfg.map == "winding") return make_winding(cfg.dim_given ? cfg.dim : 3, cfg.k);
  if (cfg.map == "zsquared") return make_zsquared();
  if (cfg.map == "complex_poly") {
    if (cfg.coeffs.empty()) throw UsageError("complex_poly needs --coeffs");
    return make_complex_poly(cfg.coeffs);
  }
  if (cfg.map == "conjugated_quadratic") return make_conjugated_quadratic(cfg.lambda);
  if (cfg.map == "zorich") return make_zorich();
  throw UsageError("unknown map '" + cfg.map + "'");
}

std::map<std::string, std::string> map_parameters(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  std::ostringstream os;
  os.precision(17);
  if (cfg.map == "winding") out["k"] = std::to_string(cfg.k);
  if (cfg.map == "conjugated_quadratic") {
    os << cfg.lambda;
    out["lambda"] = os.str();
  }
  if (cfg.map == "complex_poly") {
    for (std::size_t i = 0; i < cfg.coeffs.size(); ++i) {
      os << (i ? "," : "") << cfg.coeffs[i].real() << ":" << cfg.coeffs[i].imag();
    }
    out["coeffs"] = os.str();
  }
  out["dim"] = std::to_string(cfg.dim);
  return out;
}

SliceSpec slice_of(const RunConfig& cfg) {
  SliceSpec s;
  s.axis = cfg.slice_axis;
  s.offset = cfg.slice_offset;
  return s;
}

GridParameters grid_parameters(const EscapeGrid& g, const BoundarySet& b) {
  GridParameters p;
  p.box = g.box;
  p.resolution = g.resolution;
  p.horizon = g.horizon;
  p.escaping_cells = g.escaping_count();
  p.boundary_cells = b.cells.size();
  p.certified = g.certificate.has_value();
  return p;
}

void write_images(const RunConfig& cfg, const EscapeGrid& g, const BoundarySet& b) {
  if (!cfg.out_pgm.empty()) write_escape_pgm(g, slice_of(cfg), cfg.out_pgm);
  if (!cfg.out_ppm.empty()) write_class_ppm(g, b, slice_of(cfg), cfg.out_ppm);
}

void run_classify(const RunConfig& cfg, ReportDocument& rep) {
  const MapInstance f = build_map(cfg);
  const auto cert = choose_certificate(f, cfg.cert, rep.notes);
  rep.certificate = cert;
  const BoxRegion box = resolve_box(cfg, cert ? 1.25 * cert->r_prime : 2.0);
  const GridResolution res = resolve_resolution(cfg, cfg.dim == 2 ? 512 : 64);
  GridOptions opts;
  opts.classify.escape_bound = cfg.escape_bound;
  opts.threads = cfg.threads;
  const EscapeGrid g = classify_grid(f, box, res, cert, cfg.horizon, opts);
  const BoundarySet b = extract_boundary(g);
  rep.grid = grid_parameters(g, b);
  rep.estimates["escaping_fraction"] = static_cast<double>(g.escaping_count()) / static_cast<double>(g.cells.size());
  if (!cert) rep.notes.push_back("uncertified: escape declared at |x| > escape_bound");
  if (!cfg.out_grid.empty()) write_grid(g, cfg.out_grid);
  if (!cfg.out_voxels.empty()) export_voxels(g, cfg.out_voxels);
  write_images(cfg, g, b);
}

void run_render(const RunConfig& cfg, ReportDocument& rep) {
  const EscapeGrid g = read_grid(cfg.grid_in);
  const BoundarySet b = extract_boundary(g);
  rep.grid = grid_parameters(g, b);
  write_images(cfg, g, b);
}

void run_estimate(const RunConfig& cfg, ReportDocument& rep) {
  const MapInstance f = build_map(cfg);
  const BoxRegion region = resolve_box(cfg, 2.0);
  const auto dil = estimate_dilatation(f, region, std::max<std::size_t>(cfg.samples, 100), 0);
  rep.estimates["outer_dilatation"] = dil.outer;
  rep.estimates["inner_dilatation"] = dil.inner;
  rep.estimates["maximal_dilatation"] = dil.maximal();
  rep.estimates["dilatation_samples"] = static_cast<double>(dil.samples_used);
  rep.estimates["rejected_near_branch"] = static_cast<double>(dil.rejected_near_branch);
  if (f.metadata().polynomial_type) {
    std::vector<Point> targets;
    for (std::uint64_t i = 0; i < 8; ++i) targets.push_back(f(halton_point(region, i, 0x51)));
    DegreeEstimate deg{};
    try {
      deg = estimate_degree(f, targets, region);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SearchBoxTooSmall) throw;
      // Images of the region can have preimages outside it; widen the search.
      BoxRegion wide = region;
      for (int i = 0; i < 8 && !deg.count; ++i) {
        Point lo = wide.low(), hi = wide.high();
        for (int a = 0; a < f.dim(); ++a) {
          const double c = 0.5 * (lo[a] + hi[a]), w = hi[a] - lo[a];
          lo[a] = c - w;
          hi[a] = c + w;
        }
        wide = BoxRegion(lo, hi);
        try {
          deg = estimate_degree(f, targets, wide);
        } catch (const Error& e2) {
          if (e2.code() != ErrorCode::SearchBoxTooSmall) throw;
        }
      }
    }
    rep.estimates["degree"] = static_cast<double>(deg.count);
    rep.notes.push_back("degree method: " + to_string(deg.method));
  } else {
    rep.notes.push_back("degree not estimated: the map has an essential singularity at infinity");
  }
  if (!cfg.point.empty()) {
    const Point x = Point::checked(cfg.point);
    rep.estimates["local_index"] = estimate_local_index(f, x, cfg.index_radius);
  }
}

void print_summary(const ReportDocument& rep) {
  for (const auto& c : rep.checks) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
  for (const auto& [k, v] : rep.estimates) std::cout << k << " = " << v << "\n";
  if (rep.certificate) {
    std::cout << "certificate " << to_string(rep.certificate->method) << ": alpha = " << rep.certificate->alpha
              << ", R' = " << rep.certificate->r_prime << "\n";
  }
  if (rep.grid) {
    std::cout << "grid: " << rep.grid->escaping_cells << " escaping, " << rep.grid->boundary_cells
              << " boundary cells\n";
  }
  for (const auto& n : rep.notes) std::cout << "note: " << n << "\n";
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"qrdyn: escaping sets of quasiregular maps", "qrdyn"};
  std::string command;
  std::string config_path;
  bool timing = false;
  std::map<std::string, std::string> given;
  app.add_option("command", command, "classify, render, verify or estimate")->required();
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_flag("--timing", timing, "record wall-clock time in the report");
  for (const auto& [name, help] : kValueOptions) {
    app.add_option("--" + name, given[name], help)->allow_extra_args(false);
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  std::map<std::string, std::string> values;
  if (!config_path.empty()) values = read_config_file(config_path);
  for (const auto& [name, help] : kValueOptions) {
    if (app.count("--" + name)) values[name] = given[name];
  }
  if (app.count("--timing")) values["timing"] = timing ? "true" : "false";
  if (values.count("command")) {
    if (to_command(values["command"]) != to_command(command)) throw UsageError("config file names another command");
    values.erase("command");
  }

  RunConfig cfg;
  cfg.command = to_command(command);
  for (const auto& [key, v] : values) apply(cfg, key, v);
  if (!values.count("threads")) {
    if (const char* env = std::getenv("QRDYN_THREADS"); env && *env) apply(cfg, "threads", env);
  }
  validate(cfg);
  return cfg;
}

MapInstance build_map(const RunConfig& cfg) { return make_map(cfg); }

BoxRegion resolve_box(const RunConfig& cfg, double default_half_width) {
  if (!cfg.box_given) return BoxRegion::cube(cfg.dim, -default_half_width, default_half_width);
  if (cfg.box.size() == 2) return BoxRegion::cube(cfg.dim, cfg.box[0], cfg.box[1]);
  Point lo(cfg.dim), hi(cfg.dim);
  for (int a = 0; a < cfg.dim; ++a) {
    lo[a] = cfg.box[static_cast<std::size_t>(2 * a)];
    hi[a] = cfg.box[static_cast<std::size_t>(2 * a + 1)];
  }
  return BoxRegion(lo, hi);
}

GridResolution resolve_resolution(const RunConfig& cfg, std::uint32_t default_cells) {
  if (!cfg.res_given) return GridResolution::uniform(cfg.dim, default_cells);
  if (cfg.res.size() == 1) return GridResolution::uniform(cfg.dim, cfg.res[0]);
  GridResolution r;
  r.dim = cfg.dim;
  for (int a = 0; a < cfg.dim; ++a) r.cells[static_cast<std::size_t>(a)] = cfg.res[static_cast<std::size_t>(a)];
  return r;
}

int dispatch(const RunConfig& cfg) {
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  const auto start = std::chrono::steady_clock::now();
  ReportDocument rep;
  rep.map_name = cfg.map;
  rep.map_parameters = map_parameters(cfg);
  rep.command = to_string(cfg.command);
  rep.suite = cfg.command == Command::Verify ? cfg.suite : "";
  switch (cfg.command) {
    case Command::Classify: run_classify(cfg, rep); break;
    case Command::Render: run_render(cfg, rep); break;
    case Command::Verify: run_suite(cfg, rep); break;
    case Command::Estimate: run_estimate(cfg, rep); break;
  }
  if (cfg.timing) {
    rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  if (!cfg.report.empty()) write_report(rep, cfg.report);
  print_summary(rep);
  const bool all = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckReport& c) { return c.pass; });
  return all ? 0 : 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(parse_config(args));
  } catch (const HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "qrdyn: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "qrdyn: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "qrdyn: unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qrdyn::cli
