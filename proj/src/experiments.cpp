#include "rplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rplab/errors.hpp"
#include "rplab/grid_index.hpp"
#include "rplab/rng.hpp"

namespace rplab {

ProjectionSpec family_spec(const SweepConfig& cfg, double r) {
    switch (cfg.family) {
        case Family::Thm1:
            return PiTR{cfg.t, r};
        case Family::Thm2:
            return RepPush{cfg.n, cfg.t, r};
        default:
            return PK{cfg.n, cfg.k, r};
    }
}

double family_gain(const SweepConfig& cfg) {
    switch (cfg.family) {
        case Family::Thm1:
            return std::exp(-cfg.t / 10.0);
        case Family::Thm2:
            return std::exp(-varpi(cfg.n, cfg.alpha) * cfg.t / 2.0);
        default:
            return 1.0;
    }
}

namespace {

void validate_structural(const FiniteMeasure& mu, const SweepConfig& cfg) {
    if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw InvalidInput("sweep: delta must lie in (0, 1]");
    if (!(cfg.delta0 > 0.0 && cfg.delta0 <= 1.0)) throw InvalidInput("sweep: delta0 must lie in (0, 1]");
    if (!(cfg.alpha > 0.0)) throw InvalidInput("sweep: alpha must be positive");
    if (!(cfg.epsilon > 0.0)) throw InvalidInput("sweep: epsilon must be positive");
    if (cfg.r_grid.count < 1) throw InvalidInput("sweep: r-grid needs at least one point");
    if (!(cfg.r_grid.min >= 0.0 && cfg.r_grid.max <= 1.0 && cfg.r_grid.min < cfg.r_grid.max))
        throw InvalidInput("sweep: r-grid range must be a subinterval of [0, 1]");
    if (cfg.family == Family::Thm1 && mu.dim() != 3) throw InvalidInput("sweep: Thm1 needs ambient dimension 3");
    if ((cfg.family == Family::Thm2 || cfg.family == Family::Thm3) && mu.dim() != cfg.n + 1)
        throw InvalidInput("sweep: measure dimension does not match n+1");
    if (cfg.family == Family::Thm3 && (cfg.k < 1 || cfg.k > cfg.n + 1))
        throw InvalidInput("sweep: k out of range 1..n+1");
    if (cfg.family != Family::Thm3 && cfg.t < 0.0) throw InvalidInput("sweep: t must be >= 0");
}

void hypothesis_warnings(const SweepConfig& cfg, SweepReport& rep) {
    auto warn = [&rep](const std::string& msg) {
        rep.warnings.push_back(msg);
        rep.hypothesis_ok = false;
    };
    const double ncfg = static_cast<double>(cfg.n);
    switch (cfg.family) {
        case Family::Thm1: {
            if (cfg.delta < std::exp(cfg.t) * cfg.delta0) warn("scale window violated: delta < e^t * delta0");
            if (!(cfg.epsilon < cfg.alpha / 100.0)) warn("epsilon outside (0, alpha/100)");
            if (cfg.alpha < 1.0 || cfg.alpha > 1.5) warn("alpha outside [1, 3/2]");
            break;
        }
        case Family::Thm2: {
            const double lo = std::exp(ncfg * cfg.t / 2.0) * cfg.delta0;
            const double hi = std::exp(-ncfg * cfg.t / 2.0);
            if (cfg.delta < lo) warn("scale window violated: delta < e^{nt/2} * delta0");
            if (cfg.delta > hi) warn("scale window violated: delta > e^{-nt/2}");
            if (cfg.delta > 0.01) warn("delta above 1/100");
            if (!(cfg.alpha < ncfg + 1.0)) warn("alpha outside (0, n+1)");
            const double eps_cap = std::min(cfg.alpha, ncfg + 1.0 - cfg.alpha) / (1e4 * ncfg);
            if (!(cfg.epsilon < eps_cap)) warn("epsilon outside (0, min{alpha, n+1-alpha}/(10^4 n))");
            break;
        }
        default: {
            if (cfg.delta < cfg.delta0) warn("scale window violated: delta < delta0");
            if (!(cfg.epsilon < 1e-4 * cfg.alpha)) warn("epsilon outside (0, 10^-4 alpha)");
            if (cfg.alpha > static_cast<double>(cfg.k)) warn("alpha exceeds image dimension k");
            break;
        }
    }
    const int img = image_dim(family_spec(cfg, 0.0));
    if (cfg.alpha > static_cast<double>(img))
        rep.warnings.push_back("alpha exceeds the image dimension " + std::to_string(img) +
                               "; the non-concentration level delta^alpha is unattainable and uniform failure is expected");
}

struct RestrictedStats {
    Quantiles q;
    long samples = 0;
    long within = 0;
};

RestrictedStats restricted_pass(const FiniteMeasure& mu, const std::vector<double>& proj, int img,
                                const std::vector<char>& bad, double delta, double pass_level,
                                const SamplePolicy& policy, uint64_t seed) {
    // Good-subset projection; masses stay in the original normalization.
    std::vector<uint32_t> good;
    good.reserve(mu.size());
    for (size_t i = 0; i < mu.size(); ++i)
        if (!bad[i]) good.push_back(static_cast<uint32_t>(i));
    RestrictedStats out;
    if (good.empty()) return out;

    std::vector<double> gproj(good.size() * static_cast<size_t>(img));
    std::vector<double> gweights(good.size());
    for (size_t a = 0; a < good.size(); ++a) {
        const size_t i = good[a];
        gweights[a] = mu.weights[i];
        for (int j = 0; j < img; ++j)
            gproj[a * static_cast<size_t>(img) + static_cast<size_t>(j)] =
                proj[i * static_cast<size_t>(img) + static_cast<size_t>(j)];
    }
    SamplePolicy local = policy;
    local.seed = seed;
    const std::vector<uint32_t> sample = resolve_sample(good.size(), local);

    const GridIndex grid(gproj.data(), good.size(), img, delta);
    std::vector<double> values(sample.size());
    std::vector<uint32_t> scratch;
    for (size_t s = 0; s < sample.size(); ++s) {
        values[s] = grid.mass_within(gproj.data() + static_cast<size_t>(sample[s]) * img, delta, gweights, scratch);
        if (values[s] <= pass_level) ++out.within;
    }
    out.samples = static_cast<long>(sample.size());
    out.q = quantiles_of(std::move(values));
    return out;
}

}  // namespace

SweepReport sweep(const FiniteMeasure& mu, const SweepConfig& cfg) {
    validate_structural(mu, cfg);
    if (mu.size() == 0) throw InvalidInput("sweep: empty measure");

    SweepReport rep;
    rep.config = cfg;
    rep.cert = frostman_certify(mu, cfg.alpha, cfg.delta0);
    if (cfg.c0 > 0.0) {
        rep.c0_used = cfg.c0;
        if (rep.cert.c0 > cfg.c0) {
            rep.warnings.push_back("hypothesis-violated: certified c0 " + std::to_string(rep.cert.c0) +
                                   " exceeds the claimed c0 " + std::to_string(cfg.c0));
            rep.hypothesis_ok = false;
        }
    } else {
        rep.c0_used = rep.cert.c0;
    }
    hypothesis_warnings(cfg, rep);

    const double eta = cfg.eta_effective();
    const double gain = family_gain(cfg);
    rep.threshold = rep.c0_used * gain * std::pow(cfg.delta, cfg.alpha - cfg.eta_mult * eta);
    rep.bound_value = rep.c0_used * gain * std::pow(cfg.delta, cfg.alpha - cfg.epsilon);
    rep.flag_level = std::pow(cfg.delta, eta / 2.0);
    const double pass_level = cfg.slack * rep.bound_value;

    const size_t nr = cfg.r_grid.count;
    const double h = nr > 1 ? (cfg.r_grid.max - cfg.r_grid.min) / static_cast<double>(nr - 1) : 0.0;
    rep.per_r.assign(nr, PerR{});

    const int img = image_dim(family_spec(cfg, cfg.r_grid.min));

#pragma omp parallel for schedule(dynamic)
    for (long ri = 0; ri < static_cast<long>(nr); ++ri) {
        const double r = cfg.r_grid.min + static_cast<double>(ri) * h;
        const ProjectionSpec spec = family_spec(cfg, r);
        const std::vector<double> proj = project_all(mu, spec);
        const GridIndex grid(proj.data(), mu.size(), img, cfg.delta);

        std::vector<double> values(mu.size());
        std::vector<char> bad(mu.size(), 0);
        double bad_mass = 0.0;
        std::vector<uint32_t> scratch;
        for (size_t i = 0; i < mu.size(); ++i) {
            values[i] = grid.mass_within(proj.data() + i * static_cast<size_t>(img), cfg.delta, mu.weights, scratch);
            if (values[i] >= rep.threshold) {
                bad[i] = 1;
                bad_mass += mu.weights[i];
            }
        }
        PerR& row = rep.per_r[static_cast<size_t>(ri)];
        row.r = r;
        row.bad_mass = bad_mass;
        row.deficiency = bad_mass;
        const Quantiles q = quantiles_of(values);
        row.max_conc = q.max;
        row.p99_conc = q.p99;
        row.flagged = bad_mass > rep.flag_level;

        const RestrictedStats rs = restricted_pass(mu, proj, img, bad, cfg.delta, pass_level, cfg.sample,
                                                   mix_seed(cfg.seed, static_cast<uint64_t>(ri)));
        row.restricted_median = rs.samples > 0 ? rs.q.median : std::numeric_limits<double>::quiet_NaN();
        row.restricted_p99 = rs.samples > 0 ? rs.q.p99 : std::numeric_limits<double>::quiet_NaN();
        row.restricted_max = rs.samples > 0 ? rs.q.max : std::numeric_limits<double>::quiet_NaN();
        row.iii_samples = rs.samples;
        row.iii_within = rs.within;
    }

    // Flagged grid points -> merged intervals of half-spacing padding.
    const double pad = h / 2.0;
    for (size_t i = 0; i < nr; ++i) {
        if (!rep.per_r[i].flagged) continue;
        const double lo = std::max(cfg.r_grid.min, rep.per_r[i].r - pad);
        const double hi = std::min(cfg.r_grid.max, rep.per_r[i].r + pad);
        if (!rep.exceptional.empty() && lo <= rep.exceptional.back().second + 1e-15) {
            rep.exceptional.back().second = hi;
        } else {
            rep.exceptional.push_back({lo, hi});
        }
    }
    for (const auto& [lo, hi] : rep.exceptional) rep.exceptional_measure += hi - lo;
    const double range = cfg.r_grid.max - cfg.r_grid.min;
    if (nr == 1) {
        rep.exceptional_fraction = rep.per_r[0].flagged ? 1.0 : 0.0;
    } else {
        rep.exceptional_fraction = rep.exceptional_measure / range;
    }

    if (cfg.fit_exponents) {
        if (cfg.fit_deltas.size() < 4) throw InvalidInput("sweep: exponent fits need at least 4 scales");
        rep.fitted_exponents.resize(nr);
        for (size_t ri = 0; ri < nr; ++ri) {
            const double r = cfg.r_grid.min + static_cast<double>(ri) * h;
            SamplePolicy pol = cfg.sample;
            pol.seed = mix_seed(cfg.seed, 0x0f17ULL + ri);
            rep.fitted_exponents[ri] = {r, exponent_fit(mu, family_spec(cfg, r), cfg.fit_deltas, pol)};
        }
    }
    return rep;
}

SweepReport verify(const FiniteMeasure& mu, const SweepConfig& cfg) {
    SweepReport rep = sweep(mu, cfg);
    Verdict& v = rep.verdict;
    v.evaluated = true;
    v.hypothesis_ok = rep.hypothesis_ok;
    v.exceptional_fraction = rep.exceptional_fraction;
    v.part_i = rep.exceptional_fraction <= cfg.e_cap;

    v.worst_deficiency = 0.0;
    long pooled_samples = 0, pooled_within = 0;
    for (const PerR& row : rep.per_r) {
        if (row.flagged) continue;
        v.worst_deficiency = std::max(v.worst_deficiency, row.deficiency);
        pooled_samples += row.iii_samples;
        pooled_within += row.iii_within;
    }
    v.part_ii = v.worst_deficiency <= cfg.g_cap;
    v.pooled_iii_fraction = pooled_samples > 0
                                ? static_cast<double>(pooled_within) / static_cast<double>(pooled_samples)
                                : 0.0;
    v.part_iii = pooled_samples > 0 && v.pooled_iii_fraction >= cfg.iii_quota;
    v.pass = v.part_i && v.part_ii && v.part_iii && v.hypothesis_ok;
    return rep;
}

double exponent_fit(const FiniteMeasure& mu, const ProjectionSpec& spec, const std::vector<double>& deltas,
                    const SamplePolicy& policy) {
    if (deltas.size() < 4) throw InvalidInput("exponent_fit: need at least 4 dyadic scales");
    std::vector<double> xs, ys;
    xs.reserve(deltas.size());
    for (double delta : deltas) {
        if (!(delta > 0.0)) throw InvalidInput("exponent_fit: scales must be positive");
        const ConcentrationProfile prof = concentration_profile(mu, spec, delta, policy);
        if (!(prof.quantiles.median > 0.0))
            throw FitUndefined("exponent_fit: zero median concentration at delta " + std::to_string(delta));
        xs.push_back(std::log2(delta));
        ys.push_back(std::log2(prof.quantiles.median));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw FitUndefined("exponent_fit: degenerate scale list");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace rplab
