#include "rplab/measure.hpp"

#include <cmath>

#include "rplab/errors.hpp"

namespace rplab {

double FiniteMeasure::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

void FiniteMeasure::require_unit_ball() const {
    for (size_t i = 0; i < size(); ++i) {
        if (norm2(point(i)) > 1.0 + 1e-12)
            throw InvalidInput("point " + std::to_string(i) + " lies outside the closed unit ball (norm " +
                               std::to_string(norm2(point(i))) + ")");
    }
}

FiniteMeasure uniform_on(const std::vector<Vec>& points) {
    if (points.empty()) throw InvalidInput("uniform_on: empty point list");
    const int d = static_cast<int>(points.front().size());
    if (d < 2) throw InvalidInput("uniform_on: ambient dimension must be >= 2");
    std::vector<double> flat;
    flat.reserve(points.size() * static_cast<size_t>(d));
    for (const Vec& p : points) {
        if (static_cast<int>(p.size()) != d) throw InvalidInput("uniform_on: inconsistent point dimensions");
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return uniform_on_flat(d - 1, std::move(flat));
}

FiniteMeasure uniform_on_flat(int ambient_n, std::vector<double> coords) {
    const size_t d = static_cast<size_t>(ambient_n) + 1;
    if (coords.empty() || coords.size() % d != 0) throw InvalidInput("uniform_on: empty or ragged point data");
    const size_t n_pts = coords.size() / d;
    for (double x : coords)
        if (!std::isfinite(x)) throw InvalidInput("uniform_on: non-finite coordinate");
    FiniteMeasure mu;
    mu.ambient_n = ambient_n;
    mu.coords = std::move(coords);
    mu.weights.assign(n_pts, 1.0 / static_cast<double>(n_pts));
    mu.require_unit_ball();
    return mu;
}

double ball_mass(const FiniteMeasure& mu, std::span<const double> center, double radius) {
    if (!(radius > 0.0)) throw InvalidInput("ball_mass: radius must be positive");
    if (static_cast<int>(center.size()) != mu.dim()) throw InvalidInput("ball_mass: center dimension mismatch");
    const double r2 = radius * radius;
    const size_t d = static_cast<size_t>(mu.dim());
    double mass = 0.0;
    for (size_t i = 0; i < mu.size(); ++i) {
        const double* p = mu.coords.data() + i * d;
        double s = 0.0;
        for (size_t j = 0; j < d; ++j) {
            const double diff = p[j] - center[j];
            s += diff * diff;
        }
        if (s <= r2) mass += mu.weights[i];
    }
    return mass;
}

}  // namespace rplab
