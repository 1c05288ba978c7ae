#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rplab/measure.hpp"

namespace rplab {

// Every generator builds its raw point set in [-1/2, 1/2]^{n+1} (Cantor sets in
// [0,1) are centered first) and then rescales by 1/sqrt(n+1) into the unit ball.

struct GridGen {
    int n = 2;
    double delta0 = 1.0 / 16;
};

struct CantorAxis {
    int base = 3;
    std::vector<int> digits = {0, 2};
};

struct CantorGen {
    int n = 2;
    std::vector<CantorAxis> axes;  // exactly n+1 entries
    int depth = 4;
};

struct SegmentGen {
    int n = 2;
    Vec direction = {0.0, 0.0, 1.0};
    double delta0 = 1.0 / 16;
};

struct KernelLineGen {
    int n = 2;
    int k = 2;
    double r_star = 0.5;
    double delta0 = 1.0 / 16;
};

struct RandomGen {
    int n = 2;
    size_t count = 1024;
    double alpha_target = 1.0;
    uint64_t seed = 1;
};

using GeneratorSpec = std::variant<GridGen, CantorGen, SegmentGen, KernelLineGen, RandomGen>;

FiniteMeasure generate(const GeneratorSpec& spec);

/// Designed Frostman exponent: sum over axes of log|D_i| / log b_i for Cantor
/// products, 1 for lines, n+1 for grids, alpha_target for seeded sets.
double designed_alpha(const GeneratorSpec& spec);

/// Natural certification floor (pre-rescale lattice pitch).
double generator_delta0(const GeneratorSpec& spec);

/// Reads the point-cloud CSV (header x1,...,x{n+1}[,weight]); renormalizes
/// weights when present, appending a note to `warnings`.
FiniteMeasure ingest(const std::string& path, int expected_n, std::vector<std::string>* warnings = nullptr);

}  // namespace rplab
