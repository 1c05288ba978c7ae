#include "rplab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rplab/errors.hpp"

namespace rplab {

double shift_coord(double x) {
    double s = (x + 1.0) / 2.0;
    if (s < 0.0) s = 0.0;
    if (s >= 1.0) s = std::nextafter(1.0, 0.0);
    return s;
}

std::vector<int64_t> cube_of(std::span<const double> shifted, int level) {
    const double scale = std::ldexp(1.0, level);
    const int64_t hi = (int64_t{1} << level) - 1;
    std::vector<int64_t> corner(shifted.size());
    for (size_t j = 0; j < shifted.size(); ++j) {
        int64_t c = static_cast<int64_t>(std::floor(shifted[j] * scale));
        corner[j] = std::clamp<int64_t>(c, 0, hi);
    }
    return corner;
}

std::vector<std::pair<DyadicCube, double>> dyadic_decompose(const FiniteMeasure& mu, int level) {
    if (level < 0) throw InvalidInput("dyadic_decompose: level must be >= 0");
    const size_t d = static_cast<size_t>(mu.dim());
    std::map<std::vector<int64_t>, double> masses;
    std::vector<double> shifted(d);
    for (size_t i = 0; i < mu.size(); ++i) {
        if (mu.weights[i] <= 0.0) continue;
        const auto p = mu.point(i);
        for (size_t j = 0; j < d; ++j) shifted[j] = shift_coord(p[j]);
        masses[cube_of(shifted, level)] += mu.weights[i];
    }
    std::vector<std::pair<DyadicCube, double>> out;
    out.reserve(masses.size());
    for (auto& [corner, mass] : masses) out.push_back({DyadicCube{level, corner}, mass});
    return out;
}

FiniteMeasure conditional(const FiniteMeasure& mu, const DyadicCube& q) {
    const size_t d = static_cast<size_t>(mu.dim());
    if (q.corner.size() != d) throw InvalidInput("conditional: cube dimension mismatch");
    const double scale = std::ldexp(1.0, q.level);

    FiniteMeasure out;
    out.ambient_n = mu.ambient_n;
    out.support = "unit_cube";
    double mass = 0.0;
    std::vector<double> shifted(d);
    for (size_t i = 0; i < mu.size(); ++i) {
        const auto p = mu.point(i);
        for (size_t j = 0; j < d; ++j) shifted[j] = shift_coord(p[j]);
        if (cube_of(shifted, q.level) != q.corner) continue;
        for (size_t j = 0; j < d; ++j) {
            double y = shifted[j] * scale - static_cast<double>(q.corner[j]);
            if (y < 0.0) y = 0.0;
            if (y >= 1.0) y = std::nextafter(1.0, 0.0);
            out.coords.push_back(y);
        }
        out.weights.push_back(mu.weights[i]);
        mass += mu.weights[i];
    }
    if (out.weights.empty() || mass <= 0.0) throw EmptyConditional("conditional: cube carries no mass");
    for (double& w : out.weights) w /= mass;
    return out;
}

}  // namespace rplab
