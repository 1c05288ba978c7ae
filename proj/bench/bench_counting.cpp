// Timing comparison for the fixed-radius counting core: exhaustive serial
// oracle vs grid-accelerated queries, single-threaded and parallel.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "rplab/concentration.hpp"
#include "rplab/measure.hpp"
#include "rplab/rng.hpp"

using namespace rplab;

namespace {

FiniteMeasure random_ball_measure(int n, size_t count, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> coords;
    coords.reserve(count * static_cast<size_t>(n + 1));
    while (coords.size() < count * static_cast<size_t>(n + 1)) {
        std::vector<double> p(static_cast<size_t>(n + 1));
        double s = 0.0;
        for (double& x : p) {
            x = 2.0 * rng.next_double() - 1.0;
            s += x * x;
        }
        if (s <= 1.0) coords.insert(coords.end(), p.begin(), p.end());
    }
    return uniform_on_flat(n, std::move(coords));
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    size_t n_points = 20000;
    double delta = 1.0 / 64;
    if (argc > 1) n_points = std::strtoull(argv[1], nullptr, 10);
    if (argc > 2) delta = std::strtod(argv[2], nullptr);

    const FiniteMeasure mu = random_ball_measure(2, n_points, 99);
    const ProjectionSpec spec = RepPush{2, 1.0, 0.6};
    const int max_threads = omp_get_max_threads();

    std::printf("fixed-radius counting, N=%zu, delta=%g, image dim %d\n", n_points, delta,
                image_dim(spec));

    double oracle_s = 0.0;
    if (n_points <= 50000) {
        const auto start = std::chrono::steady_clock::now();
        const ConcentrationProfile slow = concentration_profile_oracle(mu, spec, delta);
        oracle_s = seconds_since(start);
        std::printf("  serial oracle      %8.3f s   (median m = %g)\n", oracle_s, slow.quantiles.median);
    } else {
        std::printf("  serial oracle      skipped (quadratic; N too large)\n");
    }

    omp_set_num_threads(1);
    auto start = std::chrono::steady_clock::now();
    const ConcentrationProfile serial = concentration_profile(mu, spec, delta);
    const double grid1_s = seconds_since(start);
    std::printf("  grid, 1 thread     %8.3f s   (median m = %g)\n", grid1_s, serial.quantiles.median);

    omp_set_num_threads(max_threads);
    start = std::chrono::steady_clock::now();
    const ConcentrationProfile parallel = concentration_profile(mu, spec, delta);
    const double gridp_s = seconds_since(start);
    std::printf("  grid, %d threads    %8.3f s   (median m = %g)\n", max_threads, gridp_s,
                parallel.quantiles.median);

    bool same = parallel.values == serial.values;
    if (oracle_s > 0.0) {
        std::printf("  oracle/grid speedup: %.1fx serial, %.1fx parallel\n", oracle_s / grid1_s,
                    oracle_s / gridp_s);
    }
    std::printf("  parallel == serial values: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}
