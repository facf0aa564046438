#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "qrdyn/error.hpp"
#include "qrdyn/maps.hpp"

namespace qrdyn {

namespace {

using cplx = std::complex<double>;

struct Eval {
  cplx p;
  cplx dp;
};

Eval horner(const std::vector<cplx>& c, cplx z) {
  cplx p = c.back(), dp = 0.0;
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[i];
  }
  return {p, dp};
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
  std::vector<cplx> c = coeffs;
  while (!c.empty() && c.back() == cplx(0.0)) c.pop_back();
  if (c.size() < 2) throw Error(ErrorCode::InvalidArgument, "polynomial of degree ≥ 1 required");
  const cplx lead = c.back();
  for (auto& v : c) v /= lead;
  const std::size_t d = c.size() - 1;

  // Cauchy bound for the initial circle.
  double bound = 0.0;
  for (std::size_t i = 0; i < d; ++i) bound = std::max(bound, std::abs(c[i]));
  const double radius = 1.0 + bound;

  std::vector<cplx> z(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d) + 0.4;
    z[j] = std::polar(radius, t);
  }

  constexpr int kMaxIter = 600;
  for (int it = 0; it < kMaxIter; ++it) {
    bool moving = false;
    for (std::size_t i = 0; i < d; ++i) {
      const Eval e = horner(c, z[i]);
      if (e.p == cplx(0.0)) continue;
      const cplx ratio = e.p / e.dp;
      cplx sum = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != i && z[i] != z[j]) sum += 1.0 / (z[i] - z[j]);
      }
      const cplx w = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
      if (std::abs(w) > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(z[i])) moving = true;
      z[i] -= w;
    }
    if (!moving) break;
  }

  // Newton polish, accepted only when the residual drops.
  for (auto& zi : z) {
    for (int it = 0; it < 3; ++it) {
      const Eval e = horner(c, zi);
      if (e.dp == cplx(0.0)) break;
      const cplx cand = zi - e.p / e.dp;
      if (std::abs(horner(c, cand).p) < std::abs(e.p)) zi = cand; else break;
    }
  }

  // A multiple root comes back as a small cloud; the cloud's mean is well
  // conditioned and has a smaller residual than its members.
  std::vector<std::size_t> parent(d);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double scale = std::max(1.0, std::abs(z[i]));
      const double gap = std::abs(z[i] - z[j]);
      if (gap > 1e-4 * scale) continue;
      const double res_mean = std::abs(horner(c, 0.5 * (z[i] + z[j])).p);
      const double res_pair = std::max(std::abs(horner(c, z[i]).p), std::abs(horner(c, z[j]).p));
      if (gap <= kPreimageDedupTol * scale || res_mean <= res_pair) {
        parent[find_root(parent, j)] = find_root(parent, i);
      }
    }
  }
  std::vector<cplx> sums(d, 0.0);
  std::vector<std::size_t> counts(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t r = find_root(parent, i);
    sums[r] += z[i];
    ++counts[r];
  }
  std::vector<cplx> roots;
  for (std::size_t i = 0; i < d; ++i) {
    if (counts[i] > 0) roots.push_back(sums[i] / static_cast<double>(counts[i]));
  }
  return roots;
}

}  // namespace qrdyn
