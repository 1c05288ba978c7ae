#include "rplab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rplab/errors.hpp"
#include "rplab/grid_index.hpp"
#include "rplab/rng.hpp"

namespace rplab {

std::vector<double> project_all(const FiniteMeasure& mu, const ProjectionSpec& spec) {
    const int d = ambient_dim(spec);
    if (d != mu.dim()) throw InvalidInput("project_all: measure dimension does not match the family");
    const int m = image_dim(spec);
    const std::vector<double> rows = projection_rows(spec);
    std::vector<double> out(mu.size() * static_cast<size_t>(m), 0.0);
    for (size_t i = 0; i < mu.size(); ++i) {
        const double* p = mu.coords.data() + i * static_cast<size_t>(d);
        double* q = out.data() + i * static_cast<size_t>(m);
        for (int a = 0; a < m; ++a) {
            double s = 0.0;
            const double* row = rows.data() + static_cast<size_t>(a) * d;
            for (int j = 0; j < d; ++j) s += row[j] * p[j];
            q[a] = s;
        }
    }
    return out;
}

namespace {

double mass_near_scan(const double* proj, size_t n, int m, const double* center, double delta,
                      std::span<const double> weights) {
    const double r2 = delta * delta;
    double mass = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (GridIndex::dist2(proj + i * static_cast<size_t>(m), center, m) <= r2) mass += weights[i];
    }
    return mass;
}

}  // namespace

double concentration_at(const FiniteMeasure& mu, const ProjectionSpec& spec, std::span<const double> w,
                        double delta) {
    if (!(delta > 0.0)) throw InvalidInput("concentration_at: delta must be positive");
    const std::vector<double> proj = project_all(mu, spec);
    const Vec pw = apply(spec, w);
    return mass_near_scan(proj.data(), mu.size(), image_dim(spec), pw.data(), delta, mu.weights);
}

Quantiles quantiles_of(std::vector<double> values) {
    Quantiles q;
    if (values.empty()) return q;
    std::sort(values.begin(), values.end());
    auto rank = [&](double p) {
        const size_t n = values.size();
        size_t idx = static_cast<size_t>(std::ceil(p * static_cast<double>(n)));
        if (idx > 0) --idx;
        return values[std::min(idx, n - 1)];
    };
    q.median = rank(0.5);
    q.p90 = rank(0.9);
    q.p99 = rank(0.99);
    q.max = values.back();
    return q;
}

std::vector<uint32_t> resolve_sample(size_t n, const SamplePolicy& policy) {
    if (policy.kind == SamplePolicy::Kind::All || policy.k >= n) {
        std::vector<uint32_t> all(n);
        for (size_t i = 0; i < n; ++i) all[i] = static_cast<uint32_t>(i);
        return all;
    }
    return sample_indices(n, policy.k, policy.seed);
}

namespace {

ConcentrationProfile profile_impl(const FiniteMeasure& mu, const ProjectionSpec& spec, double delta,
                                  const SamplePolicy& policy, bool accelerated) {
    if (!(delta > 0.0)) throw InvalidInput("concentration_profile: delta must be positive");
    ConcentrationProfile prof;
    prof.spec = spec;
    prof.delta = delta;
    prof.sample = resolve_sample(mu.size(), policy);
    if (prof.sample.empty()) throw InvalidInput("concentration_profile: empty sample");
    prof.values.assign(prof.sample.size(), 0.0);

    const int m = image_dim(spec);
    const std::vector<double> proj = project_all(mu, spec);

    if (accelerated) {
        const GridIndex grid(proj.data(), mu.size(), m, delta);
#pragma omp parallel
        {
            std::vector<uint32_t> scratch;
#pragma omp for schedule(guided)
            for (long s = 0; s < static_cast<long>(prof.sample.size()); ++s) {
                const size_t i = prof.sample[static_cast<size_t>(s)];
                prof.values[static_cast<size_t>(s)] =
                    grid.mass_within(proj.data() + i * static_cast<size_t>(m), delta, mu.weights, scratch);
            }
        }
    } else {
        for (size_t s = 0; s < prof.sample.size(); ++s) {
            const size_t i = prof.sample[s];
            prof.values[s] =
                mass_near_scan(proj.data(), mu.size(), m, proj.data() + i * static_cast<size_t>(m), delta, mu.weights);
        }
    }
    prof.quantiles = quantiles_of(prof.values);
    return prof;
}

}  // namespace

ConcentrationProfile concentration_profile(const FiniteMeasure& mu, const ProjectionSpec& spec, double delta,
                                           const SamplePolicy& policy) {
    return profile_impl(mu, spec, delta, policy, true);
}

ConcentrationProfile concentration_profile_oracle(const FiniteMeasure& mu, const ProjectionSpec& spec,
                                                  double delta, const SamplePolicy& policy) {
    return profile_impl(mu, spec, delta, policy, false);
}

double annulus_concentration(const FiniteMeasure& mu, const ProjectionSpec& spec, std::span<const double> w,
                             double delta, double b) {
    if (!(delta > 0.0) || !(b > 0.0)) throw InvalidInput("annulus_concentration: delta and b must be positive");
    const int d = ambient_dim(spec);
    if (static_cast<int>(w.size()) != d || d != mu.dim())
        throw InvalidInput("annulus_concentration: dimension mismatch");
    const std::vector<double> proj = project_all(mu, spec);
    const Vec pw = apply(spec, w);
    const int m = image_dim(spec);
    const double r2 = delta * delta;
    const double lo2 = b * b;
    const double hi2 = 4.0 * b * b;
    double mass = 0.0;
    for (size_t i = 0; i < mu.size(); ++i) {
        const double a2 = GridIndex::dist2(mu.coords.data() + i * static_cast<size_t>(d), w.data(), d);
        if (a2 < lo2 || a2 > hi2) continue;
        if (GridIndex::dist2(proj.data() + i * static_cast<size_t>(m), pw.data(), m) <= r2) mass += mu.weights[i];
    }
    return mass;
}

double slab_mass(const FiniteMeasure& sigma, double r, double b, std::span<const double> z) {
    if (!(b > 0.0)) throw InvalidInput("slab_mass: width b must be positive");
    if (sigma.dim() != 3 || z.size() != 3) throw InvalidInput("slab_mass: ambient dimension must be 3");
    const double fr[3] = {1.0, r, r * r / 2.0};
    double mass = 0.0;
    for (size_t i = 0; i < sigma.size(); ++i) {
        const double* p = sigma.coords.data() + i * 3;
        const double v = fr[0] * (z[0] - p[0]) + fr[1] * (z[1] - p[1]) + fr[2] * (z[2] - p[2]);
        if (std::abs(v) <= b) mass += sigma.weights[i];
    }
    return mass;
}

long tube_cover_count(const FiniteMeasure& mu, int n, int k, double r, double delta, double mass_floor) {
    if (k < 1 || k > n + 1) throw InvalidInput("tube_cover_count: order k out of range 1..n+1");
    if (!(delta > 0.0)) throw InvalidInput("tube_cover_count: delta must be positive");
    const ProjectionSpec spec = PK{n, k, r};
    if (ambient_dim(spec) != mu.dim()) throw InvalidInput("tube_cover_count: measure dimension mismatch");
    const std::vector<double> proj = project_all(mu, spec);
    std::map<std::vector<int64_t>, double> cells;
    std::vector<int64_t> key(static_cast<size_t>(k));
    for (size_t i = 0; i < mu.size(); ++i) {
        for (int j = 0; j < k; ++j)
            key[static_cast<size_t>(j)] =
                static_cast<int64_t>(std::floor(proj[i * static_cast<size_t>(k) + static_cast<size_t>(j)] / delta));
        cells[key] += mu.weights[i];
    }
    long count = 0;
    for (const auto& [cell, mass] : cells) {
        if (mass_floor <= 0.0 ? mass > 0.0 : mass >= mass_floor) ++count;
    }
    return count;
}

}  // namespace rplab
