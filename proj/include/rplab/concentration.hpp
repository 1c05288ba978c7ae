#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rplab/measure.hpp"
#include "rplab/rep_core.hpp"

namespace rplab {

/// Image coordinates of every atom under the family, flat row-major
/// (size() * image_dim). Both the oracle and the accelerated counters work on
/// these shared values, so their distance arithmetic is identical.
std::vector<double> project_all(const FiniteMeasure& mu, const ProjectionSpec& spec);

/// m^delta at one point: mu-mass of {w': ||P w - P w'|| <= delta}. Exhaustive scan.
double concentration_at(const FiniteMeasure& mu, const ProjectionSpec& spec, std::span<const double> w,
                        double delta);

struct SamplePolicy {
    enum class Kind { All, RandomK } kind = Kind::All;
    size_t k = 0;
    uint64_t seed = 0;

    static SamplePolicy all() { return {}; }
    static SamplePolicy random_k(size_t k, uint64_t seed) { return {Kind::RandomK, k, seed}; }
};

struct Quantiles {
    double median = 0.0;
    double p90 = 0.0;
    double p99 = 0.0;
    double max = 0.0;
};

struct ConcentrationProfile {
    ProjectionSpec spec;
    double delta = 0.0;
    std::vector<uint32_t> sample;  // atom indices, ascending
    std::vector<double> values;    // m^delta per sampled atom
    Quantiles quantiles;
};

Quantiles quantiles_of(std::vector<double> values);

std::vector<uint32_t> resolve_sample(size_t n, const SamplePolicy& policy);

/// Grid-accelerated m^delta over the sampled atoms (OpenMP across samples).
ConcentrationProfile concentration_profile(const FiniteMeasure& mu, const ProjectionSpec& spec, double delta,
                                           const SamplePolicy& policy = SamplePolicy::all());

/// Serial O(N^2) reference with identical output, kept for equivalence tests.
ConcentrationProfile concentration_profile_oracle(const FiniteMeasure& mu, const ProjectionSpec& spec,
                                                  double delta, const SamplePolicy& policy = SamplePolicy::all());

/// m^delta restricted to the annulus D_b(w) = {w': b <= ||w - w'|| <= 2b} in the ambient space.
double annulus_concentration(const FiniteMeasure& mu, const ProjectionSpec& spec, std::span<const double> w,
                             double delta, double b);

/// sigma-mass of the slab {z': |(1, r, r^2/2) . (z - z')| <= b}; ambient dimension 3.
double slab_mass(const FiniteMeasure& sigma, double r, double b, std::span<const double> z);

/// Number of delta-grid cells in the image of p_r^(k) whose preimage mass is
/// >= mass_floor (mass_floor = 0 counts all occupied cells).
long tube_cover_count(const FiniteMeasure& mu, int n, int k, double r, double delta, double mass_floor = 0.0);

}  // namespace rplab
