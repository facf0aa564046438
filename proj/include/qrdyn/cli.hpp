#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qrdyn/escape.hpp"
#include "qrdyn/maps.hpp"

namespace qrdyn::cli {

enum class Command { Classify, Render, Verify, Estimate };
enum class CertChoice { Auto, Holder, Doubling, None };

struct RunConfig {
  Command command = Command::Classify;
  std::string map = "zsquared";
  int k = 2;
  double lambda = 2.0;
  std::vector<std::complex<double>> coeffs;
  int dim = 2;
  std::vector<double> box;             // 2 values (all axes) or 2·dim values
  std::vector<std::uint32_t> res;      // 1 value or dim values
  int horizon = 100;
  CertChoice cert = CertChoice::Auto;
  std::string suite;
  int max_k = 5;
  std::size_t samples = 10000;
  std::vector<double> radii{10.0, 20.0, 40.0};
  std::vector<double> point;
  double index_radius = 0.1;
  int slice_axis = 2;
  double slice_offset = 0.0;
  double escape_bound = kDefaultEscapeBound;
  std::string grid_in;
  std::string out_grid;
  std::string out_voxels;
  std::string out_pgm;
  std::string out_ppm;
  std::string report;
  bool timing = false;
  int threads = 0;

  // Explicitly provided, as opposed to defaulted.
  bool box_given = false;
  bool res_given = false;
  bool dim_given = false;
};

// Thrown for invalid input; carries the message printed to stderr.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for --help; carries the usage text printed to stdout.
struct HelpRequested : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags override config-file keys (`key = value` lines, `#` comments);
// unknown keys and invalid values throw UsageError. The map descriptor is
// validated by constructing it.
RunConfig parse_config(const std::vector<std::string>& args);

MapInstance build_map(const RunConfig& cfg);
BoxRegion resolve_box(const RunConfig& cfg, double default_half_width);
GridResolution resolve_resolution(const RunConfig& cfg, std::uint32_t default_cells);

// Exit codes: 0 all checks pass, 2 a check failed, 1 usage or runtime error.
int dispatch(const RunConfig& cfg);

// parse_config + dispatch with error reporting.
int run(int argc, char** argv);

}  // namespace qrdyn::cli
