#pragma once

// Small deterministic generators for the property tests.

#include <cmath>
#include <cstdint>

#include "qrdyn/geometry.hpp"
#include "qrdyn/sampling.hpp"

namespace qrdyn::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : state_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_double(splitmix64(state_)); }
  int integer(int lo, int hi) { return lo + static_cast<int>(splitmix64(state_) % static_cast<std::uint64_t>(hi - lo + 1)); }

  Point point(int dim, double lo, double hi) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = uniform(lo, hi);
    return p;
  }

  // Magnitudes spread over many decades, signs mixed.
  Point wide_point(int dim) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = (integer(0, 1) ? 1.0 : -1.0) * std::pow(10.0, uniform(-6.0, 6.0));
    return p;
  }

 private:
  std::uint64_t state_;
};

}  // namespace qrdyn::testing
