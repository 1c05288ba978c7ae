#include "rplab/generators.hpp"

#include <cmath>
#include <cstdint>

#include "rplab/errors.hpp"
#include "rplab/frostman.hpp"
#include "rplab/io.hpp"
#include "rplab/rng.hpp"

namespace rplab {

namespace {

long lattice_steps(double delta0, const char* who) {
    if (!(delta0 > 0.0 && delta0 <= 1.0)) throw InvalidInput(std::string(who) + ": delta0 must lie in (0, 1]");
    const double m = 1.0 / delta0;
    const long steps = std::lround(m);
    if (steps < 1 || std::abs(m - static_cast<double>(steps)) > 1e-9 * m)
        throw InvalidInput(std::string(who) + ": 1/delta0 must be an integer");
    return steps;
}

FiniteMeasure rescaled(int n, std::vector<double> raw) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n) + 1.0);
    for (double& x : raw) x *= scale;
    return uniform_on_flat(n, std::move(raw));
}

void check_axis(const CantorAxis& axis, size_t index) {
    const std::string field = "axes[" + std::to_string(index) + "]";
    if (axis.base < 2) throw InvalidInput(field + ".base: must be >= 2");
    if (axis.digits.empty()) throw InvalidInput(field + ".digits: digit set must be nonempty");
    std::vector<bool> seen(static_cast<size_t>(axis.base), false);
    for (int d : axis.digits) {
        if (d < 0 || d >= axis.base)
            throw InvalidInput(field + ".digits: digit " + std::to_string(d) + " outside 0.." +
                               std::to_string(axis.base - 1));
        if (seen[static_cast<size_t>(d)]) throw InvalidInput(field + ".digits: duplicate digit " + std::to_string(d));
        seen[static_cast<size_t>(d)] = true;
    }
}

std::vector<double> axis_values(const CantorAxis& axis, int depth) {
    std::vector<double> values{0.0};
    double scale = 1.0;
    for (int level = 1; level <= depth; ++level) {
        scale /= axis.base;
        std::vector<double> next;
        next.reserve(values.size() * axis.digits.size());
        for (double v : values)
            for (int d : axis.digits) next.push_back(v + d * scale);
        values = std::move(next);
    }
    return values;
}

FiniteMeasure generate_line(int n, const Vec& direction, double delta0, const char* who) {
    if (static_cast<int>(direction.size()) != n + 1) throw InvalidInput(std::string(who) + ": direction dimension mismatch");
    const double len = norm2(direction);
    if (!(len > 0.0)) throw InvalidInput(std::string(who) + ": zero direction");
    const long steps = lattice_steps(delta0, who);
    std::vector<double> raw;
    raw.reserve(static_cast<size_t>(steps + 1) * (static_cast<size_t>(n) + 1));
    for (long i = 0; i <= steps; ++i) {
        const double s = static_cast<double>(i) * delta0 - 0.5;
        for (int j = 0; j <= n; ++j) raw.push_back(s * direction[static_cast<size_t>(j)] / len);
    }
    return rescaled(n, std::move(raw));
}

FiniteMeasure generate_random(const RandomGen& g) {
    if (g.n < 1) throw InvalidInput("random: n must be >= 1");
    if (g.count < 1) throw InvalidInput("random: count must be >= 1");
    const int d = g.n + 1;
    if (!(g.alpha_target > 0.0 && g.alpha_target <= static_cast<double>(d)))
        throw InvalidInput("random: alpha_target must lie in (0, n+1]");

    const int levels = std::clamp(static_cast<int>(std::lround(std::log2(static_cast<double>(g.count)) / g.alpha_target)), 1, 24);
    const double keep_p = std::min(1.0, std::exp2(g.alpha_target - d));
    const size_t cap = 4 * g.count;

    for (uint64_t attempt = 0; attempt < 10; ++attempt) {
        SplitMix64 rng(mix_seed(g.seed + attempt, 0xca4702ULL));
        std::vector<std::vector<int64_t>> cubes{std::vector<int64_t>(static_cast<size_t>(d), 0)};
        for (int level = 0; level < levels; ++level) {
            std::vector<std::vector<int64_t>> next;
            next.reserve(cubes.size() * 2);
            for (const auto& cube : cubes) {
                size_t kept = 0;
                for (uint64_t child = 0; child < (uint64_t{1} << d); ++child) {
                    const bool keep = rng.next_double() < keep_p;
                    if (!keep) continue;
                    std::vector<int64_t> corner(static_cast<size_t>(d));
                    for (int j = 0; j < d; ++j)
                        corner[static_cast<size_t>(j)] = 2 * cube[static_cast<size_t>(j)] + ((child >> j) & 1);
                    next.push_back(std::move(corner));
                    ++kept;
                }
                if (kept == 0) {
                    const uint64_t child = rng.next_below(uint64_t{1} << d);
                    std::vector<int64_t> corner(static_cast<size_t>(d));
                    for (int j = 0; j < d; ++j)
                        corner[static_cast<size_t>(j)] = 2 * cube[static_cast<size_t>(j)] + ((child >> j) & 1);
                    next.push_back(std::move(corner));
                }
            }
            if (next.size() > cap) {
                const std::vector<uint32_t> keep_ids = sample_indices(next.size(), cap, rng.next());
                std::vector<std::vector<int64_t>> trimmed;
                trimmed.reserve(cap);
                for (uint32_t id : keep_ids) trimmed.push_back(std::move(next[id]));
                next = std::move(trimmed);
            }
            cubes = std::move(next);
        }
        if (cubes.size() > g.count) {
            const std::vector<uint32_t> keep_ids = sample_indices(cubes.size(), g.count, rng.next());
            std::vector<std::vector<int64_t>> trimmed;
            trimmed.reserve(g.count);
            for (uint32_t id : keep_ids) trimmed.push_back(std::move(cubes[id]));
            cubes = std::move(trimmed);
        }

        const double side = std::exp2(-levels);
        std::vector<double> raw;
        raw.reserve(cubes.size() * static_cast<size_t>(d));
        for (const auto& cube : cubes)
            for (int j = 0; j < d; ++j)
                raw.push_back((static_cast<double>(cube[static_cast<size_t>(j)]) + 0.5) * side - 0.5);
        FiniteMeasure mu = rescaled(g.n, std::move(raw));

        CertifyOptions opts;
        opts.cap = std::exp2(2.0 * d);
        const FrostmanCertificate cert = frostman_certify(mu, g.alpha_target, side, opts);
        if (cert.passed) return mu;
    }
    throw InvalidInput("random: failed to certify alpha_target after 10 seeds");
}

}  // namespace

FiniteMeasure generate(const GeneratorSpec& spec) {
    if (const auto* g = std::get_if<GridGen>(&spec)) {
        if (g->n < 1) throw InvalidInput("grid: n must be >= 1");
        const long steps = lattice_steps(g->delta0, "grid");
        const int d = g->n + 1;
        double total = 1.0;
        for (int j = 0; j < d; ++j) total *= static_cast<double>(steps + 1);
        if (total > 6e7) throw InvalidInput("grid: lattice would exceed 6e7 points");
        const size_t n_pts = static_cast<size_t>(total);
        std::vector<double> raw(n_pts * static_cast<size_t>(d));
        std::vector<long> idx(static_cast<size_t>(d), 0);
        for (size_t i = 0; i < n_pts; ++i) {
            for (int j = 0; j < d; ++j)
                raw[i * static_cast<size_t>(d) + static_cast<size_t>(j)] =
                    static_cast<double>(idx[static_cast<size_t>(j)]) * g->delta0 - 0.5;
            int j = 0;
            while (j < d && idx[j] == steps) idx[j++] = 0;
            if (j < d) ++idx[static_cast<size_t>(j)];
        }
        return rescaled(g->n, std::move(raw));
    }
    if (const auto* g = std::get_if<CantorGen>(&spec)) {
        if (g->n < 1) throw InvalidInput("cantor: n must be >= 1");
        if (g->depth < 0) throw InvalidInput("cantor: depth must be >= 0");
        const int d = g->n + 1;
        if (static_cast<int>(g->axes.size()) != d)
            throw InvalidInput("cantor: expected " + std::to_string(d) + " axes, got " + std::to_string(g->axes.size()));
        double total = 1.0;
        for (size_t a = 0; a < g->axes.size(); ++a) {
            check_axis(g->axes[a], a);
            total *= std::pow(static_cast<double>(g->axes[a].digits.size()), g->depth);
        }
        if (total > 6e7) throw InvalidInput("cantor: product would exceed 6e7 points");
        std::vector<std::vector<double>> values;
        values.reserve(g->axes.size());
        for (const CantorAxis& axis : g->axes) values.push_back(axis_values(axis, g->depth));
        const size_t n_pts = static_cast<size_t>(total);
        std::vector<double> raw(n_pts * static_cast<size_t>(d));
        std::vector<size_t> idx(static_cast<size_t>(d), 0);
        for (size_t i = 0; i < n_pts; ++i) {
            for (int j = 0; j < d; ++j)
                raw[i * static_cast<size_t>(d) + static_cast<size_t>(j)] =
                    values[static_cast<size_t>(j)][idx[static_cast<size_t>(j)]] - 0.5;
            int j = 0;
            while (j < d && idx[static_cast<size_t>(j)] + 1 == values[static_cast<size_t>(j)].size())
                idx[j++] = 0;
            if (j < d) ++idx[static_cast<size_t>(j)];
        }
        return rescaled(g->n, std::move(raw));
    }
    if (const auto* g = std::get_if<SegmentGen>(&spec)) return generate_line(g->n, g->direction, g->delta0, "segment");
    if (const auto* g = std::get_if<KernelLineGen>(&spec)) {
        const Vec dir = kernel_direction(g->n, g->k, g->r_star);
        return generate_line(g->n, dir, g->delta0, "kernel_line");
    }
    return generate_random(std::get<RandomGen>(spec));
}

double designed_alpha(const GeneratorSpec& spec) {
    if (const auto* g = std::get_if<GridGen>(&spec)) return static_cast<double>(g->n) + 1.0;
    if (const auto* g = std::get_if<CantorGen>(&spec)) {
        double alpha = 0.0;
        for (const CantorAxis& axis : g->axes)
            alpha += std::log(static_cast<double>(axis.digits.size())) / std::log(static_cast<double>(axis.base));
        return alpha;
    }
    if (std::holds_alternative<SegmentGen>(spec) || std::holds_alternative<KernelLineGen>(spec)) return 1.0;
    return std::get<RandomGen>(spec).alpha_target;
}

double generator_delta0(const GeneratorSpec& spec) {
    if (const auto* g = std::get_if<GridGen>(&spec)) return g->delta0;
    if (const auto* g = std::get_if<CantorGen>(&spec)) {
        double pitch = 1.0;
        for (const CantorAxis& axis : g->axes)
            if (axis.digits.size() > 1) pitch = std::min(pitch, std::pow(axis.base, -g->depth));
        return pitch;
    }
    if (const auto* g = std::get_if<SegmentGen>(&spec)) return g->delta0;
    if (const auto* g = std::get_if<KernelLineGen>(&spec)) return g->delta0;
    const auto& r = std::get<RandomGen>(spec);
    const int levels = std::clamp(static_cast<int>(std::lround(std::log2(static_cast<double>(r.count)) / r.alpha_target)), 1, 24);
    return std::exp2(-levels);
}

FiniteMeasure ingest(const std::string& path, int expected_n, std::vector<std::string>* warnings) {
    return read_measure_csv(path, expected_n, warnings);
}

}  // namespace rplab
