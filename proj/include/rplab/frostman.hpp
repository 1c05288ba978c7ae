#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rplab/measure.hpp"

namespace rplab {

enum class CenterPolicy { Atoms, AtomsPlusGrid };

struct ScaleRecord {
    double delta = 0.0;
    double max_mass = 0.0;   // exact max over centers, or a certified upper bound
    bool exact = true;       // false when max_mass is the bounded-regime upper bound
    double witnessed = 0.0;  // largest exactly counted ball mass at this scale
};

struct FrostmanCertificate {
    double alpha = 0.0;
    double c0 = 1.0;  // least C0 >= 1 with max_mass <= C0 delta^alpha at every scale
    double delta0 = 1.0;
    std::vector<ScaleRecord> scales;  // dyadic delta in [delta0, 1], coarse to fine
    bool passed = false;              // c0 <= cap
    CenterPolicy center_policy = CenterPolicy::Atoms;
    double cap = std::numeric_limits<double>::infinity();
    std::string note;
};

struct CertifyOptions {
    CenterPolicy policy = CenterPolicy::Atoms;
    double cap = std::numeric_limits<double>::infinity();
    // Largest candidate-pair count per scale for the exact per-center path;
    // scales above it fall back to the certified upper bound.
    double pair_budget = 2e9;
    int bound_cells_per_delta = 8;
    size_t witness_samples = 128;
    uint64_t seed = 0x5eedULL;
};

/// Certifies mu(B(w, delta)) <= C0 delta^alpha over dyadic delta in [delta0, 1].
/// Centers are the atoms (plus an optional delta/2-grid near the support).
/// Exact counts where the per-scale work fits the budget; otherwise max_mass is
/// an upper bound valid for every center in the support cells, marked exact=false.
FrostmanCertificate frostman_certify(const FiniteMeasure& mu, double alpha, double delta0,
                                     const CertifyOptions& opts = {});

}  // namespace rplab
