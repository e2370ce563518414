// Tests for the Ferrers-function / special-function layer.
//
// Reference values for P^m_lambda(x) were generated with an independent
// arbitrary-precision implementation (validated against scipy.special.lpmv)
// and are frozen here to 13 significant digits.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "slowcap/specfun.hpp"

using namespace slowcap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
struct LpRef {
    int m;
    double lambda, x, value;
};
} // namespace

TEST_CASE("ferrers_p matches frozen reference values", "[specfun]") {
    // Mix of orders, non-integer degrees, and arguments including points close
    // to the cap edge (x near s) and close to mode roots.
    const LpRef refs[] = {
        {5, 16.504141061133357, 0.9, -3.682775390857e+05},
        {5, 16.504141061133357, 0.999, -7.948156170447e+01},
        {5, 16.818336107147086, 0.87086, +2.223165494580e+02},
        {5, 17.504141061133357, 0.88, +9.821631472980e+03},
        {0, 4.171351833, 0.871, +6.191063999900e-04},
        {0, 28.557685688, 0.95, -1.439874779733e-01},
        {10, 54.978292628, 0.8701, +1.703088656939e+16},
        {10, 27.76266457, 0.932, +6.060843503850e+13},
        {10, 41.3, 0.99, +8.471359389532e+13},
        {0, 0.5, 0.3, +7.009385309697e-01},
        {3, 7.25, -0.2, +3.392176929418e+01},
        {6, 19.0, 0.866, -1.251898281462e+06},
    };
    for (const auto& r : refs) {
        CAPTURE(r.m, r.lambda, r.x);
        const double v = ferrers_p(r.m, r.lambda, r.x);
        // 13-digit frozen constants: allow 1e-9 relative slack.
        REQUIRE_THAT(v, WithinRel(r.value, 1e-9));
    }
}

TEST_CASE("ferrers_p low-order closed forms", "[specfun]") {
    // P_1(x) = x, P_2(x) = (3x^2 - 1)/2, P^1_1(x) = -sqrt(1 - x^2).
    for (double x : {-0.7, -0.1, 0.35, 0.9}) {
        REQUIRE_THAT(ferrers_p(0, 1.0, x), WithinRel(x, 1e-13));
        REQUIRE_THAT(ferrers_p(0, 2.0, x), WithinRel(0.5 * (3 * x * x - 1), 1e-13));
        REQUIRE_THAT(ferrers_p(1, 1.0, x), WithinRel(-std::sqrt(1 - x * x), 1e-13));
    }
    // Value at the pole: P_lambda(1) = 1 for any degree; P^m_lambda(1) = 0 for m > 0.
    REQUIRE_THAT(ferrers_p(0, 7.3, 1.0), WithinAbs(1.0, 1e-12));
    REQUIRE(ferrers_p(4, 9.2, 1.0) == 0.0);
}

TEST_CASE("ferrers_dx agrees with finite differences", "[specfun]") {
    const double h = 1e-6;
    struct Pt {
        int m;
        double lambda, x;
    };
    for (const Pt& p : {Pt{5, 16.504141061133357, 0.91},
                        Pt{0, 10.239450999, 0.93},
                        Pt{10, 35.188268571, 0.9},
                        Pt{2, 6.5, -0.3}}) {
        CAPTURE(p.m, p.lambda, p.x);
        const double fd =
            (ferrers_p(p.m, p.lambda, p.x + h) - ferrers_p(p.m, p.lambda, p.x - h)) /
            (2.0 * h);
        const double an = ferrers_dx(p.m, p.lambda, p.x);
        REQUIRE_THAT(an, WithinRel(fd, 1e-6));
    }
}

TEST_CASE("ferrers_dlambda is stable under step halving", "[specfun]") {
    const double d1 = ferrers_dlambda(5, 16.504141061133357, 0.92, 1e-4);
    const double d2 = ferrers_dlambda(5, 16.504141061133357, 0.92, 1e-5);
    REQUIRE_THAT(d1, WithinRel(d2, 1e-5));
}

TEST_CASE("boundary_degree reproduces frozen root tables", "[specfun]") {
    // (m, n) = (5, 1) degrees across the curvature range exercised elsewhere.
    REQUIRE_THAT(boundary_degree(5, 1, 0.5), WithinAbs(16.504141061133357, 1e-10));
    REQUIRE_THAT(boundary_degree(5, 1, 0.51), WithinAbs(16.147311068368282, 1e-10));
    REQUIRE_THAT(boundary_degree(5, 1, 0.4915), WithinAbs(16.818336107147086, 1e-10));
    REQUIRE_THAT(boundary_degree(5, 1, 0.4515), WithinAbs(18.448950076979745, 1e-10));
    REQUIRE_THAT(boundary_degree(5, 1, 0.4315), WithinAbs(19.373441722291862, 1e-10));

    const double l0[] = {4.171351833, 10.239450999, 16.339711512, 22.447304814,
                         28.557685688};
    for (int n = 1; n <= 5; ++n) {
        CAPTURE(n);
        REQUIRE_THAT(boundary_degree(0, n, 0.4915), WithinAbs(l0[n - 1], 1e-8));
    }
    const double l10[] = {27.76266457, 35.188268571, 42.009960618, 48.567800669,
                          54.978292628};
    for (int n = 1; n <= 5; ++n) {
        CAPTURE(n);
        REQUIRE_THAT(boundary_degree(10, n, 0.5), WithinAbs(l10[n - 1], 1e-8));
    }
}

TEST_CASE("hemisphere boundary degrees are exact integers", "[specfun]") {
    // At gamma = 1 the boundary sits at the equator and the roots are integer
    // degrees; the root scan must not stall when a scan point lands exactly
    // on a zero.
    REQUIRE_THAT(boundary_degree(0, 1, 1.0), WithinAbs(1.0, 1e-10));
    REQUIRE_THAT(boundary_degree(1, 1, 1.0), WithinAbs(2.0, 1e-10));
    REQUIRE_THAT(boundary_degree(0, 2, 1.0), WithinAbs(3.0, 1e-10));
    REQUIRE_THAT(boundary_degree(2, 1, 1.0), WithinAbs(3.0, 1e-10));
}

TEST_CASE("boundary_degree roots actually vanish and interlace", "[specfun]") {
    const double gamma = 0.47;
    const double s = std::sqrt(1.0 - gamma * gamma);
    double prev = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const double lam = boundary_degree(3, n, gamma);
        REQUIRE(lam > prev);
        // Residual at the root, relative to the profile scale.
        const double scale = max_abs_ferrers(3, lam, s, 1.0);
        REQUIRE(std::abs(ferrers_p(3, lam, s)) < 1e-10 * scale);
        prev = lam;
    }
}

TEST_CASE("cap_eigenvalue formula", "[specfun]") {
    REQUIRE_THAT(cap_eigenvalue(16.504141061133357, 0.5, 1.0),
                 WithinRel(16.504141061133357 * 17.504141061133357 * 0.25, 1e-14));
    // Radius scaling: mu ~ 1/R^2.
    REQUIRE_THAT(cap_eigenvalue(10.0, 0.5, 2.0),
                 WithinRel(cap_eigenvalue(10.0, 0.5, 1.0) / 4.0, 1e-14));
}

TEST_CASE("hyp2f1_series on a known closed form", "[specfun]") {
    // 2F1(1, 1; 2; z) = -log(1 - z)/z.
    for (double z : {0.05, 0.2, 0.4}) {
        REQUIRE_THAT(hyp2f1_series(1.0, 1.0, 2.0, z),
                     WithinRel(-std::log1p(-z) / z, 1e-13));
    }
}

TEST_CASE("composite_gauss8 integrates polynomials and oscillations", "[specfun]") {
    const auto rule = composite_gauss8(0.0, 1.0, 8);
    REQUIRE_THAT(rule.integrate([](double x) { return x * x * x; }),
                 WithinAbs(0.25, 1e-14));
    const auto rule2 = composite_gauss8(0.0, M_PI, 32);
    REQUIRE_THAT(rule2.integrate([](double x) { return std::sin(10.0 * x); }),
                 WithinAbs((1.0 - std::cos(10.0 * M_PI)) / 10.0, 1e-12));
    // Nodes ascend strictly and weights are positive.
    for (std::size_t i = 0; i + 1 < rule.size(); ++i) REQUIRE(rule.x[i] < rule.x[i + 1]);
    for (double w : rule.w) REQUIRE(w > 0.0);
}

TEST_CASE("mode profiles are orthogonal under the cap measure", "[specfun]") {
    // For fixed order m, profiles with different radial index are orthogonal
    // in zeta over [s, 1] (Sturm-Liouville structure of the degree problem).
    const double gamma = 0.5, s = std::sqrt(1.0 - gamma * gamma);
    const double l1 = boundary_degree(5, 1, gamma);
    const double l2 = boundary_degree(5, 2, gamma);
    const auto rule = composite_gauss8(s, 1.0, 96);
    const double i12 = rule.integrate(
        [&](double z) { return ferrers_p(5, l1, z) * ferrers_p(5, l2, z); });
    const double i11 = rule.integrate([&](double z) {
        const double p = ferrers_p(5, l1, z);
        return p * p;
    });
    const double i22 = rule.integrate([&](double z) {
        const double p = ferrers_p(5, l2, z);
        return p * p;
    });
    REQUIRE(std::abs(i12) / std::sqrt(i11 * i22) < 1e-8);
}

TEST_CASE("boundary_degree input validation", "[specfun]") {
    REQUIRE_THROWS_AS(boundary_degree(0, 0, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(boundary_degree(-1, 1, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(boundary_degree(0, 1, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(boundary_degree(0, 1, 1.5), std::invalid_argument);
}
