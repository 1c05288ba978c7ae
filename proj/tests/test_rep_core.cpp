#include "rplab/rep_core.hpp"

#include <cmath>

#include "doctest.h"
#include "rplab/errors.hpp"
#include "rplab/rng.hpp"

using namespace rplab;

namespace {

double max_abs_diff(const Mat& a, const Mat& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.a.size(); ++i) worst = std::max(worst, std::abs(a.a[i] - b.a[i]));
    return worst;
}

}  // namespace

TEST_CASE("moment curve values") {
    CHECK(xi(2, 0.0) == Vec{0.0, 0.0, 0.0});
    const Vec v1 = xi(2, 1.0);
    CHECK(v1[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v1[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v1[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    const Vec v2 = xi(3, 2.0);
    CHECK(v2[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(v2[1] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(v2[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(v2[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(xi(0, 1.0), InvalidInput);
}

TEST_CASE("moment curve derivatives") {
    // Third derivative of the cubic curve is constant.
    for (double r : {0.0, 0.3, 1.0}) {
        const Vec d3 = xi_derivative(2, 3, r);
        CHECK(d3 == Vec{0.0, 0.0, 1.0});
    }
    const Vec d1 = xi_derivative(2, 1, 0.5);
    CHECK(d1[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d1[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d1[2] == doctest::Approx(0.125).epsilon(1e-15));
    const Vec d2 = xi_derivative(2, 2, 0.5);
    CHECK(d2[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d2[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d2[2] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(xi_derivative(2, 0, 0.5), InvalidInput);
    CHECK_THROWS_AS(xi_derivative(2, 4, 0.5), InvalidInput);
}

TEST_CASE("projection onto derivative frames") {
    const Vec w{1.0, 1.0, 1.0};
    CHECK(proj_k(PK{2, 0, 0.7}, w).empty());

    const Vec at0 = proj_k(PK{2, 2, 0.0}, Vec{0.25, -0.5, 0.75});
    CHECK(at0[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(at0[1] == doctest::Approx(-0.5).epsilon(1e-15));

    const Vec full = proj_k(PK{2, 3, 1.0}, w);
    CHECK(full[0] == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(full[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(full[2] == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(proj_k(PK{2, 2, 0.5}, Vec{1.0, 2.0}), InvalidInput);
}

TEST_CASE("u_r is unitriangular and matches proj_k at k=n+1") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(6));
        const double r = 2.0 * rng.next_double() - 1.0;
        const Mat u = u_matrix(n, r);
        for (int i = 0; i < u.dim; ++i) {
            CHECK(u.at(i, i) == 1.0);
            for (int j = 0; j < i; ++j) CHECK(u.at(i, j) == 0.0);
        }
        Vec w(static_cast<size_t>(n) + 1);
        for (double& x : w) x = 2.0 * rng.next_double() - 1.0;
        const Vec via_rows = u.apply(w);
        const Vec via_proj = proj_k(PK{n, n + 1, r}, w);
        for (size_t j = 0; j < w.size(); ++j) CHECK(via_rows[j] == via_proj[j]);
    }
}

TEST_CASE("u_matrix explicit action in dimension 3") {
    const double r = 0.37;
    const Vec w{0.2, -0.4, 0.9};
    const Vec out = u_matrix(2, r).apply(w);
    CHECK(out[0] == doctest::Approx(w[0] + r * w[1] + r * r / 2.0 * w[2]).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(w[1] + r * w[2]).epsilon(1e-15));
    CHECK(out[2] == doctest::Approx(w[2]).epsilon(1e-15));
}

TEST_CASE("one-parameter group law") {
    SplitMix64 rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(6));
        const double r = 2.0 * rng.next_double() - 1.0;
        const double s = 2.0 * rng.next_double() - 1.0;
        worst = std::max(worst, max_abs_diff(u_matrix(n, r).mul(u_matrix(n, s)), u_matrix(n, r + s)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("diagonal action and conjugation") {
    const Mat a0 = a_matrix(2, 0.0);
    for (int i = 0; i < 3; ++i) CHECK(a0.at(i, i) == 1.0);

    const Mat a1 = a_matrix(2, 1.0);
    CHECK(a1.at(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(a1.at(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a1.at(2, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

    const Mat a32 = a_matrix(3, 2.0);
    CHECK(a32.at(0, 0) == doctest::Approx(std::exp(3.0)).epsilon(1e-14));
    CHECK(a32.at(1, 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(a32.at(2, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(a32.at(3, 3) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));

    // det a_t = 1: the diagonal weights sum to zero.
    SplitMix64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(6));
        const double t = 3.0 * rng.next_double();
        const Mat a = a_matrix(n, t);
        double logdet = 0.0;
        for (int i = 0; i < a.dim; ++i) logdet += std::log(a.at(i, i));
        CHECK(std::abs(logdet) <= 1e-9);

        // a_t u_r = u_{e^t r} a_t
        const double r = rng.next_double();
        const double lhs_rhs =
            max_abs_diff(a.mul(u_matrix(n, r)), u_matrix(n, std::exp(t) * r).mul(a));
        CHECK(lhs_rhs <= 1e-9);
    }
}

TEST_CASE("pi_tr formula and RepPush compatibility") {
    const Vec w{1.0, 1.0, 1.0};
    const Vec p00 = rplab::apply(PiTR{0.0, 0.0}, w);
    CHECK(p00[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p00[1] == doctest::Approx(1.0).epsilon(1e-15));

    const Vec p = rplab::apply(PiTR{1.0, 0.5}, w);
    CHECK(p[0] == doctest::Approx(std::exp(1.0) * 1.625).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(1.5).epsilon(1e-15));

    SplitMix64 rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        const double t = 3.0 * rng.next_double();
        const double r = rng.next_double();
        Vec v{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
        const Vec pi = rplab::apply(PiTR{t, r}, v);
        const Vec rep = rplab::apply(RepPush{2, t, r}, v);
        CHECK(std::abs(pi[0] - rep[0]) <= 1e-12 * std::max(1.0, std::abs(rep[0])));
        CHECK(std::abs(pi[1] - rep[1]) <= 1e-12);
        CHECK(std::abs(rep[2] - std::exp(-t) * v[2]) <= 1e-12);
    }

    CHECK_THROWS_AS(rplab::apply(PiTR{0.0, 0.0}, Vec{1.0, 2.0}), InvalidInput);
}

TEST_CASE("varpi piecewise table for n = 2") {
    for (int i = 1; i <= 29; ++i) {
        const double alpha = 0.1 * i;
        double expected;
        if (alpha <= 1.0) {
            expected = alpha;
        } else if (alpha <= 2.0) {
            expected = std::max(2.0 - alpha, alpha - 1.0);
        } else {
            expected = 3.0 - alpha;
        }
        CHECK(std::abs(varpi(2, alpha) / 2.0 - expected) <= 1e-12);
    }
    CHECK(varpi(2, 0.5) / 2.0 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(varpi(2, 1.5) / 2.0 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(varpi(2, 2.5) / 2.0 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(varpi(2, 0.0), InvalidInput);
    CHECK_THROWS_AS(varpi(2, 3.0), InvalidInput);
}

TEST_CASE("varpi continuity and positivity") {
    for (int n = 1; n <= 6; ++n) {
        for (int b = 1; b <= n; ++b) {
            const double lo = varpi(n, b - 1e-11);
            const double hi = varpi(n, b + 1e-11);
            CHECK(std::abs(lo - hi) <= 1e-9);
        }
        double min_val = 1e18;
        for (double a = 0.1; a <= n + 0.9 + 1e-12; a += 0.01) min_val = std::min(min_val, varpi(n, a));
        CHECK(min_val > 0.0);
    }
}

TEST_CASE("kernel directions") {
    CHECK(kernel_direction(2, 2, 0.0) == Vec{0.0, 0.0, 1.0});

    for (double r : {0.5, 0.3}) {
        const Vec v = kernel_direction(2, 2, r);
        CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-14));
        for (int i = 1; i <= 2; ++i) {
            const Vec d = xi_derivative(2, i, r);
            double dot = 0.0;
            for (size_t j = 0; j < v.size(); ++j) dot += v[j] * d[j];
            CHECK(std::abs(dot) <= 1e-12);
        }
    }

    const Vec v1 = kernel_direction(2, 1, 0.0);
    CHECK(norm2(v1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(v1[0]) <= 1e-14);

    CHECK_THROWS_AS(kernel_direction(2, 3, 0.5), InvalidInput);
}
