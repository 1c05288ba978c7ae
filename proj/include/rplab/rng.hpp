#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

namespace rplab {

/// splitmix64; used both as a generator and to derive independent substream seeds.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, bound) without modulo bias.
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) return 0;
        const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % bound + 1) % bound;
        uint64_t x;
        do {
            x = next();
        } while (x > limit);
        return x % bound;
    }
};

inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    g.next();
    return g.next();
}

/// Deterministic k-subset of {0..n-1}, ascending (Floyd's sampling).
inline std::vector<uint32_t> sample_indices(size_t n, size_t k, uint64_t seed) {
    if (k >= n) {
        std::vector<uint32_t> all(n);
        for (size_t i = 0; i < n; ++i) all[i] = static_cast<uint32_t>(i);
        return all;
    }
    SplitMix64 g(mix_seed(seed, 0xf10fdULL));
    std::unordered_set<uint32_t> chosen;
    chosen.reserve(k * 2);
    for (size_t j = n - k; j < n; ++j) {
        const uint32_t t = static_cast<uint32_t>(g.next_below(j + 1));
        if (!chosen.insert(t).second) chosen.insert(static_cast<uint32_t>(j));
    }
    std::vector<uint32_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace rplab
