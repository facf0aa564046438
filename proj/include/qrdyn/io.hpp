#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qrdyn/analysis.hpp"
#include "qrdyn/escape.hpp"

namespace qrdyn {

// A 2D view of a grid. For 3D grids `axis` is the normal of the slice and
// `offset` its coordinate; 2D grids ignore both. Image size defaults to the
// grid's cell counts along the two remaining axes.
struct SliceSpec {
  int axis = 2;
  double offset = 0.0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

// Pixel value of an escape time: 255·(1 − t/horizon) rounded and clamped,
// 0 for the sentinel.
std::uint8_t escape_gray(std::uint16_t t, int horizon) noexcept;

std::vector<std::uint8_t> encode_escape_pgm(const EscapeGrid& g, const SliceSpec& s);
std::vector<std::uint8_t> encode_class_ppm(const EscapeGrid& g, const BoundarySet& b,
                                           const SliceSpec& s);
std::vector<std::uint8_t> encode_voxels(const EscapeGrid& g);

void write_escape_pgm(const EscapeGrid& g, const SliceSpec& s, const std::filesystem::path& path);
void write_class_ppm(const EscapeGrid& g, const BoundarySet& b, const SliceSpec& s,
                     const std::filesystem::path& path);
// "QRV1", three u32 LE counts, then u16 LE times (x fastest). 3D grids only.
void export_voxels(const EscapeGrid& g, const std::filesystem::path& path);

// Full grid round-trip format ("QRG1"), used by `render`.
std::vector<std::uint8_t> encode_grid(const EscapeGrid& g);
EscapeGrid decode_grid(const std::vector<std::uint8_t>& bytes);
void write_grid(const EscapeGrid& g, const std::filesystem::path& path);
EscapeGrid read_grid(const std::filesystem::path& path);

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

inline constexpr const char* kToolVersion = "qrdyn 1.0.0";

struct GridParameters {
  BoxRegion box = BoxRegion::cube(2, -1.0, 1.0);
  GridResolution resolution;
  int horizon = 0;
  std::size_t escaping_cells = 0;
  std::size_t boundary_cells = 0;
  bool certified = false;
};

struct ReportDocument {
  std::string map_name;
  std::map<std::string, std::string> map_parameters;
  std::string command;
  std::string suite;
  std::optional<EscapeCertificate> certificate;
  std::optional<GridParameters> grid;
  std::vector<CheckReport> checks;
  std::map<std::string, double> estimates;
  std::vector<std::string> notes;
  std::optional<double> wall_clock_seconds;
  std::string tool_version = kToolVersion;
};

// JSON, keys sorted, doubles at 17 significant digits, non-finite as null.
std::string serialize_report(const ReportDocument& r);
void write_report(const ReportDocument& r, const std::filesystem::path& path);

// 64-bit FNV-1a, used for golden checksums.
std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) noexcept;

}  // namespace qrdyn
