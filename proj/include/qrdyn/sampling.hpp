#pragma once

#include <cstdint>
#include <vector>

#include "qrdyn/geometry.hpp"

namespace qrdyn {

// Platform-independent deterministic sampling. std::*_distribution is
// implementation-defined, so nothing here uses it.

std::uint64_t splitmix64(std::uint64_t& state) noexcept;
// Uniform in [0, 1) from the top 53 bits.
double unit_double(std::uint64_t bits) noexcept;

// Radical inverse of index in the given prime base.
double radical_inverse(std::uint64_t index, unsigned base) noexcept;

// The i-th point of a Halton sequence scrambled by a seed-dependent
// Cranley–Patterson shift, mapped into the box.
Point halton_point(const BoxRegion& box, std::uint64_t index, std::uint64_t seed);

// `count` roughly uniform unit vectors: equi-angular in 2D, a spherical
// Fibonacci lattice in 3D. The seed rotates the pattern so different seeds
// give fresh directions.
std::vector<Point> sphere_directions(int dim, std::size_t count, std::uint64_t seed);

}  // namespace qrdyn
