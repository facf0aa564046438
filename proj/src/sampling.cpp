#include "qrdyn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qrdyn/error.hpp"

namespace qrdyn {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double radical_inverse(std::uint64_t index, unsigned base) noexcept {
  const double inv = 1.0 / base;
  double f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

Point halton_point(const BoxRegion& box, std::uint64_t index, std::uint64_t seed) {
  static constexpr unsigned kBases[3] = {2, 3, 5};
  std::uint64_t state = seed;
  Point p(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    const double shift = unit_double(splitmix64(state));
    double u = radical_inverse(index + 1, kBases[i]) + shift;
    if (u >= 1.0) u -= 1.0;
    p[i] = box.low()[i] + u * box.width(i);
  }
  return p;
}

std::vector<Point> sphere_directions(int dim, std::size_t count, std::uint64_t seed) {
  require_supported_dim(dim);
  std::uint64_t state = seed;
  const double u0 = unit_double(splitmix64(state));
  const double u1 = unit_double(splitmix64(state));
  std::vector<Point> dirs;
  dirs.reserve(count);
  const double two_pi = 2.0 * std::numbers::pi;
  if (dim == 2) {
    for (std::size_t j = 0; j < count; ++j) {
      const double t = two_pi * (static_cast<double>(j) + u0) / static_cast<double>(count);
      dirs.emplace_back(std::cos(t), std::sin(t));
    }
    return dirs;
  }
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double z = 1.0 - 2.0 * (static_cast<double>(j) + u0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double frac = static_cast<double>(j) * golden + u1;
    frac -= std::floor(frac);
    const double t = two_pi * frac;
    dirs.emplace_back(r * std::cos(t), r * std::sin(t), z);
  }
  return dirs;
}

}  // namespace qrdyn
