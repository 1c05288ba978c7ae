#pragma once

#include <span>
#include <string>
#include <vector>

#include "rplab/rep_core.hpp"

namespace rplab {

/// Weighted finite point set. Points are stored flat, row-major, dim = ambient_n + 1.
/// Generated and ingested measures live in the closed unit ball; conditional
/// measures live in the unit cube (see support note).
struct FiniteMeasure {
    int ambient_n = 2;
    std::vector<double> coords;   // size() == size_points * dim
    std::vector<double> weights;  // probability masses, sum 1
    std::string support = "unit_ball";

    int dim() const { return ambient_n + 1; }
    size_t size() const { return weights.size(); }
    std::span<const double> point(size_t i) const {
        return {coords.data() + i * static_cast<size_t>(dim()), static_cast<size_t>(dim())};
    }
    double weight_sum() const;

    /// Throws InvalidInput unless every point has norm <= 1 + 1e-12.
    void require_unit_ball() const;
};

/// Equal weights 1/#F on the given points; validates the unit-ball invariant.
FiniteMeasure uniform_on(const std::vector<Vec>& points);

FiniteMeasure uniform_on_flat(int ambient_n, std::vector<double> coords);

/// mu-mass of the closed ball B(center, radius), by exhaustive scan. Oracle.
double ball_mass(const FiniteMeasure& mu, std::span<const double> center, double radius);

}  // namespace rplab
