#include "qrdyn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "json.hpp"

#include "qrdyn/error.hpp"

namespace qrdyn {

namespace {

struct SliceGeometry {
  int u = 0, v = 1;  // image x and y axes
  std::uint32_t layer = 0;
  std::uint32_t width = 0, height = 0;
};

SliceGeometry slice_geometry(const EscapeGrid& g, const SliceSpec& s) {
  SliceGeometry out;
  if (g.dim() == 3) {
    if (s.axis < 0 || s.axis > 2) throw Error(ErrorCode::InvalidArgument, "slice axis must be 0, 1 or 2");
    const int axes[3][2] = {{1, 2}, {0, 2}, {0, 1}};
    out.u = axes[s.axis][0];
    out.v = axes[s.axis][1];
    const double lo = g.box.low()[s.axis], hi = g.box.high()[s.axis];
    if (!(s.offset >= lo && s.offset <= hi)) throw Error(ErrorCode::InvalidArgument, "slice offset outside the box");
    const auto n = g.resolution.cells[static_cast<std::size_t>(s.axis)];
    out.layer = std::min<std::uint32_t>(n - 1, static_cast<std::uint32_t>((s.offset - lo) / (hi - lo) * n));
  }
  out.width = s.width ? s.width : g.resolution.cells[static_cast<std::size_t>(out.u)];
  out.height = s.height ? s.height : g.resolution.cells[static_cast<std::size_t>(out.v)];
  return out;
}

// Cell under pixel (px, py); row 0 is the top edge (largest v coordinate).
std::size_t pixel_cell(const EscapeGrid& g, const SliceGeometry& sg, const SliceSpec& s, std::uint32_t px,
                       std::uint32_t py) {
  const auto nu = g.resolution.cells[static_cast<std::size_t>(sg.u)];
  const auto nv = g.resolution.cells[static_cast<std::size_t>(sg.v)];
  std::array<std::uint32_t, 3> ijk{0, 0, 0};
  ijk[static_cast<std::size_t>(sg.u)] = static_cast<std::uint32_t>(std::uint64_t{px} * nu / sg.width);
  ijk[static_cast<std::size_t>(sg.v)] = nv - 1 - static_cast<std::uint32_t>(std::uint64_t{py} * nv / sg.height);
  if (g.dim() == 3) ijk[static_cast<std::size_t>(s.axis)] = sg.layer;
  return g.index(std::span<const std::uint32_t>(ijk.data(), static_cast<std::size_t>(g.dim())));
}

std::vector<std::uint8_t> header(const char* magic, std::uint32_t w, std::uint32_t h) {
  const std::string text = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  return {text.begin(), text.end()};
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}
  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{b_[pos_++]} << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = uint(8);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }
  void expect(const char* magic) {
    need(4);
    if (std::memcmp(b_.data() + pos_, magic, 4) != 0) throw Error(ErrorCode::Io, "bad grid file magic");
    pos_ += 4;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw Error(ErrorCode::Io, "truncated grid file");
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

nlohmann::json point_json(const Point& p) {
  auto a = nlohmann::json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

nlohmann::json check_json(const CheckReport& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["witnesses"] = nlohmann::json::array();
  for (const auto& w : c.witnesses) j["witnesses"].push_back(point_json(w));
  j["witness_cells"] = c.witness_cells;
  j["parameters"] = nlohmann::json::object();
  for (const auto& [k, v] : c.parameters) j["parameters"][k] = v;
  j["notes"] = c.notes;
  return j;
}

// nlohmann's dump prints shortest round-trip doubles; reports want a fixed
// 17 significant digits, so the tree is written out here.
void emit(const nlohmann::json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + nlohmann::json(k).dump() + ": ";
      emit(v, out, indent + 2);
    }
    out += "\n" + close + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      emit(j[i], out, indent + 2);
    }
    out += "\n" + close + "]";
  } else if (j.is_number_float()) {
    const double d = j.get<double>();
    if (!std::isfinite(d)) {
      out += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    out += buf;
  } else {
    out += j.dump();
  }
}

}  // namespace

std::uint8_t escape_gray(std::uint16_t t, int horizon) noexcept {
  if (t == kSentinel || horizon <= 0) return 0;
  const double v = std::round(255.0 * (1.0 - static_cast<double>(t) / horizon));
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

std::vector<std::uint8_t> encode_escape_pgm(const EscapeGrid& g, const SliceSpec& s) {
  const auto sg = slice_geometry(g, s);
  auto out = header("P5", sg.width, sg.height);
  for (std::uint32_t py = 0; py < sg.height; ++py)
    for (std::uint32_t px = 0; px < sg.width; ++px) out.push_back(escape_gray(g.cells[pixel_cell(g, sg, s, px, py)], g.horizon));
  return out;
}

std::vector<std::uint8_t> encode_class_ppm(const EscapeGrid& g, const BoundarySet& b, const SliceSpec& s) {
  if (!b.matches(g)) throw Error(ErrorCode::GridMismatch, "boundary set from a different grid");
  std::vector<char> on_boundary(g.cells.size(), 0);
  for (auto c : b.cells) on_boundary[c] = 1;
  const auto sg = slice_geometry(g, s);
  auto out = header("P6", sg.width, sg.height);
  for (std::uint32_t py = 0; py < sg.height; ++py)
    for (std::uint32_t px = 0; px < sg.width; ++px) {
      const auto idx = pixel_cell(g, sg, s, px, py);
      std::array<std::uint8_t, 3> rgb{0, 0, 0};  // horizon-bounded
      if (on_boundary[idx]) rgb = {255, 0, 0};
      else if (g.escaping(idx)) rgb = {0, 0, escape_gray(g.cells[idx], g.horizon)};
      out.insert(out.end(), rgb.begin(), rgb.end());
    }
  return out;
}

std::vector<std::uint8_t> encode_voxels(const EscapeGrid& g) {
  if (g.dim() != 3) throw Error(ErrorCode::InvalidArgument, "voxel export needs a 3D grid");
  std::vector<std::uint8_t> out{'Q', 'R', 'V', '1'};
  for (auto n : g.resolution.cells) put_u32(out, n);
  out.reserve(out.size() + 2 * g.cells.size());
  for (auto t : g.cells) {
    out.push_back(static_cast<std::uint8_t>(t & 0xFF));
    out.push_back(static_cast<std::uint8_t>(t >> 8));
  }
  return out;
}

void write_escape_pgm(const EscapeGrid& g, const SliceSpec& s, const std::filesystem::path& path) {
  write_bytes(path, encode_escape_pgm(g, s));
}

void write_class_ppm(const EscapeGrid& g, const BoundarySet& b, const SliceSpec& s,
                     const std::filesystem::path& path) {
  write_bytes(path, encode_class_ppm(g, b, s));
}

void export_voxels(const EscapeGrid& g, const std::filesystem::path& path) { write_bytes(path, encode_voxels(g)); }

std::vector<std::uint8_t> encode_grid(const EscapeGrid& g) {
  std::vector<std::uint8_t> out{'Q', 'R', 'G', '1'};
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  for (auto n : g.resolution.cells) put_u32(out, n);
  for (int a = 0; a < 3; ++a) put_f64(out, a < g.dim() ? g.box.low()[a] : 0.0);
  for (int a = 0; a < 3; ++a) put_f64(out, a < g.dim() ? g.box.high()[a] : 0.0);
  put_u32(out, static_cast<std::uint32_t>(g.horizon));
  out.push_back(g.certificate ? 1 : 0);
  put_f64(out, g.certificate ? g.certificate->r_prime : 0.0);
  for (auto t : g.cells) {
    out.push_back(static_cast<std::uint8_t>(t & 0xFF));
    out.push_back(static_cast<std::uint8_t>(t >> 8));
  }
  return out;
}

EscapeGrid decode_grid(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  r.expect("QRG1");
  const auto dim = static_cast<int>(r.uint(4));
  if (dim != 2 && dim != 3) throw Error(ErrorCode::Io, "grid file dimension must be 2 or 3");
  GridResolution res;
  res.dim = dim;
  for (auto& n : res.cells) n = static_cast<std::uint32_t>(r.uint(4));
  std::array<double, 3> lo{}, hi{};
  for (auto& v : lo) v = r.f64();
  for (auto& v : hi) v = r.f64();
  EscapeGrid g;
  try {
    g.box = dim == 2 ? BoxRegion(Point(lo[0], lo[1]), Point(hi[0], hi[1]))
                     : BoxRegion(Point(lo[0], lo[1], lo[2]), Point(hi[0], hi[1], hi[2]));
  } catch (const Error& e) {
    throw Error(ErrorCode::Io, std::string("grid file box: ") + e.what());
  }
  for (int a = 0; a < 3; ++a) {
    const auto n = res.cells[static_cast<std::size_t>(a)];
    if (n == 0 || (a >= dim && n != 1)) throw Error(ErrorCode::Io, "grid file resolution");
  }
  g.resolution = res;
  g.horizon = static_cast<int>(r.uint(4));
  if (g.horizon < 1 || g.horizon > kMaxHorizon) throw Error(ErrorCode::Io, "grid file horizon");
  const bool certified = r.uint(1) != 0;
  const double r_prime = r.f64();
  if (certified) {
    EscapeCertificate c;
    c.r_prime = r_prime;
    g.certificate = c;
  }
  const std::size_t total = res.total();
  if (total > (std::size_t{1} << 30)) throw Error(ErrorCode::Io, "grid file too large");
  g.cells.resize(total);
  for (auto& t : g.cells) {
    t = static_cast<std::uint16_t>(r.uint(2));
    if (t != kSentinel && t >= g.horizon) throw Error(ErrorCode::Io, "grid file escape time beyond horizon");
  }
  if (!r.done()) throw Error(ErrorCode::Io, "trailing bytes in grid file");
  return g;
}

void write_grid(const EscapeGrid& g, const std::filesystem::path& path) { write_bytes(path, encode_grid(g)); }

EscapeGrid read_grid(const std::filesystem::path& path) { return decode_grid(read_bytes(path)); }

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::string serialize_report(const ReportDocument& r) {
  nlohmann::json j;
  j["tool_version"] = r.tool_version;
  j["command"] = r.command;
  j["suite"] = r.suite.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.suite);
  j["map"]["name"] = r.map_name;
  j["map"]["parameters"] = r.map_parameters;
  if (r.certificate) {
    const auto& c = *r.certificate;
    auto& cj = j["certificate"];
    cj["method"] = to_string(c.method);
    cj["alpha"] = c.alpha;
    cj["C"] = c.C;
    cj["R"] = c.R;
    cj["r_prime"] = c.r_prime;
    cj["inflations"] = c.inflations;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& v : c.validation) min_ratio = std::min(min_ratio, v.ratio);
    cj["validation_samples"] = c.validation.size();
    cj["validation_min_ratio"] = c.validation.empty() ? nlohmann::json(nullptr) : nlohmann::json(min_ratio);
  } else {
    j["certificate"] = nullptr;
  }
  if (r.grid) {
    const auto& g = *r.grid;
    auto& gj = j["grid"];
    gj["box"]["low"] = point_json(g.box.low());
    gj["box"]["high"] = point_json(g.box.high());
    gj["resolution"] = std::vector<std::uint32_t>(g.resolution.cells.begin(), g.resolution.cells.begin() + g.resolution.dim);
    gj["horizon"] = g.horizon;
    gj["escaping_cells"] = g.escaping_cells;
    gj["boundary_cells"] = g.boundary_cells;
    gj["certified"] = g.certified;
  } else {
    j["grid"] = nullptr;
  }
  j["checks"] = nlohmann::json::array();
  bool all = true;
  for (const auto& c : r.checks) {
    j["checks"].push_back(check_json(c));
    all = all && c.pass;
  }
  j["all_pass"] = all;
  j["estimates"] = nlohmann::json::object();
  for (const auto& [k, v] : r.estimates) j["estimates"][k] = v;
  j["notes"] = r.notes;
  if (r.wall_clock_seconds) j["wall_clock_seconds"] = *r.wall_clock_seconds;
  std::string out;
  emit(j, out, 0);
  return out + "\n";
}

void write_report(const ReportDocument& r, const std::filesystem::path& path) {
  const std::string text = serialize_report(r);
  write_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace qrdyn
