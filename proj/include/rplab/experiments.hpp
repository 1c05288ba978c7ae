#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rplab/concentration.hpp"
#include "rplab/frostman.hpp"
#include "rplab/measure.hpp"

namespace rplab {

enum class Family { Thm1 = 1, Thm2 = 2, Thm3 = 3 };

struct RGrid {
    size_t count = 512;
    double min = 0.0;
    double max = 1.0;
};

struct SweepConfig {
    Family family = Family::Thm1;
    int n = 2;
    int k = 2;           // projection order, Thm3 only
    double t = 0.0;      // expansion time, Thm1/Thm2
    double delta = 0.0;  // required
    double alpha = 0.0;  // required; auto-filled from a generator source
    double c0 = 0.0;     // claimed Frostman constant; 0 takes the certified one
    double delta0 = 0.0; // certification floor (required)
    double epsilon = 0.009;
    double eta = 0.0;    // bad-threshold knob; 0 defaults to epsilon/20
    double eta_mult = 18.0;
    RGrid r_grid;
    SamplePolicy sample; // for the restricted pass and part (iii)
    uint64_t seed = 1;

    // verdict caps
    double e_cap = 0.1;      // flagged fraction of the r-range
    double g_cap = 0.1;      // good-set deficiency at non-exceptional r
    double slack = 8.0;      // multiplier on the bound for part (iii)
    double iii_quota = 0.99; // fraction of sampled good atoms under slack*bound

    bool fit_exponents = false;
    std::vector<double> fit_deltas;

    double eta_effective() const { return eta > 0.0 ? eta : epsilon / 20.0; }
};

/// Projection family member at parameter r.
ProjectionSpec family_spec(const SweepConfig& cfg, double r);

/// Expansion gain of the family: e^{-t/10}, e^{-varpi(alpha) t/2}, or 1.
double family_gain(const SweepConfig& cfg);

struct PerR {
    double r = 0.0;
    double bad_mass = 0.0;  // mu(F_bad(r))
    double max_conc = 0.0;  // unrestricted m^delta over all atoms
    double p99_conc = 0.0;
    bool flagged = false;
    double deficiency = 0.0;  // mu(F \ F_{t,delta,r})
    // restricted to F_{t,delta,r}, over the sampled good atoms
    double restricted_median = 0.0;
    double restricted_p99 = 0.0;
    double restricted_max = 0.0;
    long iii_samples = 0;  // sampled good atoms
    long iii_within = 0;   // of those, restricted m^delta <= slack * bound
};

struct Verdict {
    bool evaluated = false;
    bool part_i = false;
    bool part_ii = false;
    bool part_iii = false;
    bool hypothesis_ok = false;
    bool pass = false;
    double exceptional_fraction = 0.0;
    double worst_deficiency = 0.0;
    double pooled_iii_fraction = 0.0;
};

struct SweepReport {
    SweepConfig config;
    FrostmanCertificate cert;
    double c0_used = 1.0;
    bool hypothesis_ok = true;
    std::vector<std::string> warnings;

    double threshold = 0.0;    // c0 * gain * delta^(alpha - eta_mult*eta)
    double bound_value = 0.0;  // c0 * gain * delta^(alpha - epsilon)
    double flag_level = 0.0;   // delta^(eta/2)

    std::vector<PerR> per_r;
    std::vector<std::pair<double, double>> exceptional;  // merged r-intervals
    double exceptional_measure = 0.0;
    double exceptional_fraction = 0.0;
    std::vector<std::pair<double, double>> fitted_exponents;  // (r, slope)

    Verdict verdict;
};

/// Runs the r-sweep: per-r concentration profile, bad-set mass, exceptional
/// flags, restricted statistics. Hypothesis violations (certification failure,
/// scale-window breaches) are recorded as warnings, not errors.
SweepReport sweep(const FiniteMeasure& mu, const SweepConfig& cfg);

/// sweep() plus the three-part verdict.
SweepReport verify(const FiniteMeasure& mu, const SweepConfig& cfg);

/// Least-squares slope of log2(median m^delta) against log2(delta).
double exponent_fit(const FiniteMeasure& mu, const ProjectionSpec& spec, const std::vector<double>& deltas,
                    const SamplePolicy& policy = SamplePolicy::all());

}  // namespace rplab
