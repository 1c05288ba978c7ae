#include "rplab/rep_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "rplab/errors.hpp"

namespace rplab {

Vec Mat::apply(std::span<const double> w) const {
    Vec out(static_cast<size_t>(dim), 0.0);
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += at(i, j) * w[static_cast<size_t>(j)];
        out[static_cast<size_t>(i)] = s;
    }
    return out;
}

Mat Mat::mul(const Mat& other) const {
    Mat out{dim, std::vector<double>(static_cast<size_t>(dim) * dim, 0.0)};
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            const double aik = at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < dim; ++j) out.at(i, j) += aik * other.at(k, j);
        }
    return out;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

Vec xi(int n, double r) {
    if (n < 1) throw InvalidInput("xi: dimension n must be >= 1");
    Vec out(static_cast<size_t>(n) + 1, 0.0);
    double term = 1.0;
    for (int j = 1; j <= n + 1; ++j) {
        term *= r / j;  // r^j / j!
        out[static_cast<size_t>(j) - 1] = term;
    }
    return out;
}

Vec xi_derivative(int n, int k, double r) {
    if (n < 1) throw InvalidInput("xi_derivative: dimension n must be >= 1");
    if (k < 1 || k > n + 1) throw InvalidInput("xi_derivative: order k out of range 1..n+1");
    Vec out(static_cast<size_t>(n) + 1, 0.0);
    double term = 1.0;  // r^{j-k}/(j-k)! starting at j = k
    for (int j = k; j <= n + 1; ++j) {
        out[static_cast<size_t>(j) - 1] = term;
        term *= r / (j - k + 1);
    }
    return out;
}

Mat u_matrix(int n, double r) {
    if (n < 1) throw InvalidInput("u_matrix: dimension n must be >= 1");
    const int d = n + 1;
    Mat out{d, std::vector<double>(static_cast<size_t>(d) * d, 0.0)};
    for (int i = 1; i <= d; ++i) {
        const Vec row = xi_derivative(n, i, r);
        for (int j = 0; j < d; ++j) out.at(i - 1, j) = row[static_cast<size_t>(j)];
    }
    return out;
}

Mat a_matrix(int n, double t) {
    if (n < 1) throw InvalidInput("a_matrix: dimension n must be >= 1");
    const int d = n + 1;
    Mat out{d, std::vector<double>(static_cast<size_t>(d) * d, 0.0)};
    for (int i = 0; i < d; ++i) out.at(i, i) = std::exp((n - 2.0 * i) * t / 2.0);
    return out;
}

int ambient_dim(const ProjectionSpec& spec) {
    if (std::holds_alternative<PiTR>(spec)) return 3;
    if (const auto* pk = std::get_if<PK>(&spec)) return pk->n + 1;
    return std::get<RepPush>(spec).n + 1;
}

int image_dim(const ProjectionSpec& spec) {
    if (std::holds_alternative<PiTR>(spec)) return 2;
    if (const auto* pk = std::get_if<PK>(&spec)) return pk->k;
    return std::get<RepPush>(spec).n + 1;
}

std::vector<double> projection_rows(const ProjectionSpec& spec) {
    const int d = ambient_dim(spec);
    const int m = image_dim(spec);
    std::vector<double> rows(static_cast<size_t>(m) * d, 0.0);
    if (const auto* p = std::get_if<PiTR>(&spec)) {
        const double et = std::exp(p->t);
        // e^t (x + r y + r^2/2 z) and y + r z
        rows[0] = et;
        rows[1] = et * p->r;
        rows[2] = et * p->r * p->r / 2.0;
        rows[3 + 1] = 1.0;
        rows[3 + 2] = p->r;
        return rows;
    }
    if (const auto* pk = std::get_if<PK>(&spec)) {
        for (int i = 1; i <= pk->k; ++i) {
            const Vec deriv = xi_derivative(pk->n, i, pk->r);
            std::copy(deriv.begin(), deriv.end(), rows.begin() + static_cast<size_t>(i - 1) * d);
        }
        return rows;
    }
    const auto& rp = std::get<RepPush>(spec);
    for (int i = 1; i <= rp.n + 1; ++i) {
        const Vec deriv = xi_derivative(rp.n, i, rp.r);
        const double scale = std::exp((rp.n - 2.0 * (i - 1)) * rp.t / 2.0);
        for (int j = 0; j < d; ++j)
            rows[static_cast<size_t>(i - 1) * d + j] = scale * deriv[static_cast<size_t>(j)];
    }
    return rows;
}

Vec proj_k(const PK& spec, std::span<const double> w) {
    if (spec.n < 1) throw InvalidInput("proj_k: dimension n must be >= 1");
    if (spec.k < 0 || spec.k > spec.n + 1) throw InvalidInput("proj_k: order k out of range 0..n+1");
    if (static_cast<int>(w.size()) != spec.n + 1)
        throw InvalidInput("proj_k: point dimension does not match n+1");
    Vec out(static_cast<size_t>(spec.k), 0.0);
    for (int i = 1; i <= spec.k; ++i) {
        const Vec deriv = xi_derivative(spec.n, i, spec.r);
        double s = 0.0;
        for (size_t j = 0; j < w.size(); ++j) s += w[j] * deriv[j];
        out[static_cast<size_t>(i) - 1] = s;
    }
    return out;
}

Vec apply(const ProjectionSpec& spec, std::span<const double> w) {
    const int d = ambient_dim(spec);
    if (static_cast<int>(w.size()) != d)
        throw InvalidInput("apply: point dimension does not match the projection family");
    if (const auto* pk = std::get_if<PK>(&spec)) return proj_k(*pk, w);
    const int m = image_dim(spec);
    const std::vector<double> rows = projection_rows(spec);
    Vec out(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += rows[static_cast<size_t>(i) * d + j] * w[static_cast<size_t>(j)];
        out[static_cast<size_t>(i)] = s;
    }
    return out;
}

double varpi(int n, double alpha) {
    if (n < 1) throw InvalidInput("varpi: dimension n must be >= 1");
    if (!(alpha > 0.0 && alpha < n + 1.0)) throw InvalidInput("varpi: alpha out of range (0, n+1)");
    const double k = std::floor(alpha);
    return std::max(n * alpha - k * (k + 1.0), k * (2.0 * n - k + 1.0) - n * alpha);
}

Vec kernel_direction(int n, int k, double r) {
    if (n < 1) throw InvalidInput("kernel_direction: dimension n must be >= 1");
    if (k == n + 1) throw InvalidInput("kernel_direction: empty kernel for k = n+1");
    if (k < 1 || k > n) throw InvalidInput("kernel_direction: order k out of range 1..n");

    const int d = n + 1;
    // Gaussian elimination with partial pivoting on the k x d system.
    std::vector<double> m(static_cast<size_t>(k) * d, 0.0);
    for (int i = 1; i <= k; ++i) {
        const Vec deriv = xi_derivative(n, i, r);
        std::copy(deriv.begin(), deriv.end(), m.begin() + static_cast<size_t>(i - 1) * d);
    }
    auto elem = [&](int i, int j) -> double& { return m[static_cast<size_t>(i) * d + j]; };

    std::vector<int> pivot_col(static_cast<size_t>(k), -1);
    int row = 0;
    for (int col = 0; col < d && row < k; ++col) {
        int best = row;
        for (int i = row + 1; i < k; ++i)
            if (std::abs(elem(i, col)) > std::abs(elem(best, col))) best = i;
        if (std::abs(elem(best, col)) < 1e-14) continue;
        if (best != row)
            for (int j = 0; j < d; ++j) std::swap(elem(best, j), elem(row, j));
        for (int i = 0; i < k; ++i) {
            if (i == row) continue;
            const double f = elem(i, col) / elem(row, col);
            if (f == 0.0) continue;
            for (int j = col; j < d; ++j) elem(i, j) -= f * elem(row, j);
        }
        pivot_col[static_cast<size_t>(row)] = col;
        ++row;
    }

    std::vector<bool> is_pivot(static_cast<size_t>(d), false);
    for (int i = 0; i < row; ++i)
        if (pivot_col[static_cast<size_t>(i)] >= 0) is_pivot[static_cast<size_t>(pivot_col[static_cast<size_t>(i)])] = true;
    int free_col = -1;
    for (int j = 0; j < d; ++j)
        if (!is_pivot[static_cast<size_t>(j)]) {
            free_col = j;
            break;
        }
    if (free_col < 0) throw InvalidInput("kernel_direction: no null-space direction found");

    Vec v(static_cast<size_t>(d), 0.0);
    v[static_cast<size_t>(free_col)] = 1.0;
    for (int i = row - 1; i >= 0; --i) {
        const int pc = pivot_col[static_cast<size_t>(i)];
        double s = 0.0;
        for (int j = pc + 1; j < d; ++j) s += elem(i, j) * v[static_cast<size_t>(j)];
        v[static_cast<size_t>(pc)] = -s / elem(i, pc);
    }

    const double nv = norm2(v);
    double sign = 1.0;
    for (double x : v)
        if (x != 0.0) {
            sign = x > 0.0 ? 1.0 : -1.0;
            break;
        }
    for (double& x : v) x *= sign / nv;
    return v;
}

}  // namespace rplab
