#pragma once

#include <span>
#include <variant>
#include <vector>

namespace rplab {

using Vec = std::vector<double>;

/// Dense square matrix, row-major.
struct Mat {
    int dim = 0;
    std::vector<double> a;  // dim*dim entries

    double& at(int i, int j) { return a[static_cast<size_t>(i) * dim + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * dim + j]; }

    Vec apply(std::span<const double> w) const;
    Mat mul(const Mat& other) const;
};

/// Moment curve xi(r) in R^{n+1}: component j (1-based) is r^j / j!.
Vec xi(int n, double r);

/// k-th derivative of xi: component j is r^{j-k}/(j-k)! for j >= k, else 0.
Vec xi_derivative(int n, int k, double r);

/// Unipotent action u_r: row i equals xi_derivative(n, i, r). Upper unitriangular.
Mat u_matrix(int n, double r);

/// Diagonal action a_t: entry i equals exp((n - 2(i-1)) t / 2).
Mat a_matrix(int n, double t);

// Projection family selector.
struct PiTR {
    double t = 0.0;
    double r = 0.0;
};
struct PK {
    int n = 1;
    int k = 0;
    double r = 0.0;
};
struct RepPush {
    int n = 1;
    double t = 0.0;
    double r = 0.0;
};
using ProjectionSpec = std::variant<PiTR, PK, RepPush>;

/// Ambient dimension the spec expects (n+1; always 3 for PiTR).
int ambient_dim(const ProjectionSpec& spec);

/// Dimension of the image space (2 for PiTR, k for PK, n+1 for RepPush).
int image_dim(const ProjectionSpec& spec);

/// The projection as a (image_dim x ambient_dim) row matrix; apply() is this
/// matrix applied to w, for every family.
std::vector<double> projection_rows(const ProjectionSpec& spec);

/// proj_k: i-th component is dot(w, xi_derivative(n, i, r)); k = 0 gives ().
Vec proj_k(const PK& spec, std::span<const double> w);

Vec apply(const ProjectionSpec& spec, std::span<const double> w);

/// Exponent function: max{n a - k(k+1), k(2n - k + 1) - n a} with k = floor(a).
double varpi(int n, double alpha);

/// Unit vector annihilated by xi_derivative(n, i, r) for i = 1..k, with a
/// deterministic choice of null-space vector (smallest free coordinate set
/// to 1, then normalized with the first nonzero component positive).
Vec kernel_direction(int n, int k, double r);

double norm2(std::span<const double> v);

}  // namespace rplab
