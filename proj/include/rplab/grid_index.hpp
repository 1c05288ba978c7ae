#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <unordered_map>
#include <vector>

namespace rplab {

/// Fixed-radius counting accelerator: buckets points of a d-dimensional cloud
/// by cell floor(x/cell_size); queries with radius <= cell_size only need the
/// 3^d neighboring cells. Shares its distance predicate with the exhaustive
/// oracle so counts and tie handling match it exactly.
class GridIndex {
  public:
    static constexpr int kMaxDim = 8;

    GridIndex(const double* coords, size_t n_points, int dim, double cell_size)
        : coords_(coords), dim_(dim), cell_(cell_size) {
        buckets_.reserve(n_points);
        Key key{};
        for (size_t i = 0; i < n_points; ++i) {
            cell_of(coords + i * static_cast<size_t>(dim), key);
            buckets_[key].push_back(static_cast<uint32_t>(i));
        }
    }

    double cell_size() const { return cell_; }

    /// Indices of points within `radius` (closed) of `center`, ascending.
    /// Requires radius <= cell_size.
    void gather(const double* center, double radius, std::vector<uint32_t>& out) const {
        out.clear();
        const double r2 = radius * radius;
        Key base{};
        cell_of(center, base);
        Key probe = base;
        std::array<int, kMaxDim> off{};
        off.fill(-1);
        for (;;) {
            for (int j = 0; j < dim_; ++j) probe.c[static_cast<size_t>(j)] = base.c[static_cast<size_t>(j)] + off[static_cast<size_t>(j)];
            if (auto it = buckets_.find(probe); it != buckets_.end()) {
                for (uint32_t idx : it->second) {
                    if (dist2(coords_ + static_cast<size_t>(idx) * dim_, center, dim_) <= r2) out.push_back(idx);
                }
            }
            int j = 0;
            while (j < dim_ && off[j] == 1) off[j++] = -1;
            if (j == dim_) break;
            ++off[j];
        }
        std::sort(out.begin(), out.end());
    }

    /// Weight sum over gather(), accumulated in ascending index order.
    double mass_within(const double* center, double radius, std::span<const double> weights,
                       std::vector<uint32_t>& scratch) const {
        gather(center, radius, scratch);
        double mass = 0.0;
        for (uint32_t idx : scratch) mass += weights[idx];
        return mass;
    }

    static double dist2(const double* a, const double* b, int dim) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double diff = a[j] - b[j];
            s += diff * diff;
        }
        return s;
    }

  private:
    struct Key {
        std::array<int64_t, kMaxDim> c{};
        bool operator==(const Key& o) const { return c == o.c; }
    };
    struct KeyHash {
        size_t operator()(const Key& k) const {
            uint64_t h = 0xcbf29ce484222325ULL;
            for (int64_t v : k.c) {
                h ^= static_cast<uint64_t>(v);
                h *= 0x100000001b3ULL;
            }
            return static_cast<size_t>(h);
        }
    };

    void cell_of(const double* p, Key& key) const {
        for (int j = 0; j < dim_; ++j) key.c[static_cast<size_t>(j)] = static_cast<int64_t>(std::floor(p[j] / cell_));
        for (int j = dim_; j < kMaxDim; ++j) key.c[static_cast<size_t>(j)] = 0;
    }

    const double* coords_;
    int dim_;
    double cell_;
    std::unordered_map<Key, std::vector<uint32_t>, KeyHash> buckets_;
};

}  // namespace rplab
