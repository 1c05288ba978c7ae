#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rplab/measure.hpp"

namespace rplab {

/// Dyadic cube prod_i [n_i/2^k, (n_i+1)/2^k) in shifted coordinates.
/// Shift is the fixed affine map x -> (x+1)/2 taking the unit ball into [0,1)^d.
struct DyadicCube {
    int level = 0;
    std::vector<int64_t> corner;

    double side() const { return std::ldexp(1.0, -level); }
    bool operator==(const DyadicCube& o) const { return level == o.level && corner == o.corner; }
};

/// Shifted coordinate (x+1)/2, clamped into [0, 1).
double shift_coord(double x);

/// Cube of `shifted` at `level`.
std::vector<int64_t> cube_of(std::span<const double> shifted, int level);

/// All positive-mass cubes at the given level, masses summing to 1.
/// Sorted by corner for determinism.
std::vector<std::pair<DyadicCube, double>> dyadic_decompose(const FiniteMeasure& mu, int level);

/// Normalized restriction of mu to q pushed through Hom_Q onto [0,1)^d.
FiniteMeasure conditional(const FiniteMeasure& mu, const DyadicCube& q);

}  // namespace rplab
