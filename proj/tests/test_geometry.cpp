// Tests for the spherical-cap geometry and the conformal disk chart.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "slowcap/geometry.hpp"

using namespace slowcap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("disk chart round-trips", "[geometry]") {
    for (double gamma : {0.3, 0.5, 0.75, 1.0}) {
        CapGeometry g(gamma);
        // (w below ~1e-4 cannot round-trip through zeta in doubles: zeta(w)
        // = 1 - O(w^2) rounds to 1 and the cancellation destroys w.)
        REQUIRE(g.w_of_zeta(g.zeta_of_w(0.0)) == 0.0);
        for (double w : {0.01, 0.1, 0.37, 0.5, 0.81, 0.999, 1.0}) {
            CAPTURE(gamma, w);
            REQUIRE_THAT(g.w_of_zeta(g.zeta_of_w(w)), WithinAbs(w, 1e-12));
        }
        for (double frac : {0.0, 0.25, 0.6, 1.0}) {
            const double zeta = g.s() + frac * (1.0 - g.s());
            CAPTURE(gamma, zeta);
            REQUIRE_THAT(g.zeta_of_w(g.w_of_zeta(zeta)), WithinAbs(zeta, 1e-12));
        }
        // Endpoints: pole and edge.
        REQUIRE(g.zeta_of_w(0.0) == 1.0);
        REQUIRE_THAT(g.zeta_of_w(1.0), WithinAbs(g.s(), 1e-15));
    }
}

TEST_CASE("cap area from the chart measure", "[geometry]") {
    for (double gamma : {0.4, 0.5, 0.9}) {
        CapGeometry g(gamma, 1.3);
        const auto rule = composite_gauss8(0.0, 1.0, 32);
        const double area =
            2.0 * M_PI * rule.integrate([&](double w) { return g.area_weight(w); });
        CAPTURE(gamma);
        REQUIRE_THAT(area, WithinRel(g.area(), 1e-13));
        // Closed form 2 pi R^2 / (1 + s), which tends to the flat disk area
        // pi R^2 as gamma -> 0 and to the hemisphere 2 pi R^2 at gamma = 1.
        REQUIRE_THAT(area, WithinRel(2.0 * M_PI * 1.3 * 1.3 / (1.0 + g.s()), 1e-13));
    }
}

TEST_CASE("conformal factor edge value and radius scaling", "[geometry]") {
    CapGeometry g1(0.5, 1.0), g2(0.5, 2.0);
    // The rim circle is pinned at radius R, so the metric there never moves:
    // c(1) = 1/R^2 independent of gamma.
    REQUIRE_THAT(g1.conformal_factor(1.0), WithinRel(1.0, 1e-14));
    REQUIRE_THAT(CapGeometry(0.82, 1.0).conformal_factor(1.0), WithinRel(1.0, 1e-14));
    REQUIRE_THAT(g2.conformal_factor(0.3),
                 WithinRel(g1.conformal_factor(0.3) / 4.0, 1e-14));
    for (double w : {0.0, 0.2, 0.7, 1.0}) REQUIRE(g1.conformal_factor(w) > 0.0);
}

TEST_CASE("chart Laplacian reproduces the mode eigenvalue", "[geometry]") {
    // Delta_cap Phi = -mu Phi checked through the chart: apply the flat disk
    // Laplacian to Phi(zeta(w)) cos(m phi) by second-order finite differences
    // and multiply by c(w).
    const CapGeometry g(0.5);
    const CapMode mode(5, 1, g);
    const double h = 1e-4;
    auto radial = [&](double w) { return mode.profile(g.zeta_of_w(w)); };
    for (double w : {0.35, 0.55, 0.8}) {
        const double f0 = radial(w);
        const double lap_disk =
            (radial(w + h) - 2.0 * f0 + radial(w - h)) / (h * h) +
            (radial(w + h) - radial(w - h)) / (2.0 * h * w) -
            (mode.m * mode.m) / (w * w) * f0;
        const double lhs = g.conformal_factor(w) * lap_disk;
        const double rhs = -mode.mu * f0;
        CAPTURE(w, lhs, rhs);
        REQUIRE_THAT(lhs, WithinRel(rhs, 1e-5));
    }
}

TEST_CASE("dilution profile", "[geometry]") {
    const CapGeometry g(0.5);
    // Vanishes identically on the rim, maximal at the pole.
    REQUIRE(g.dilution_Q_zeta(g.s()) == 0.0);
    REQUIRE_THAT(g.dilution_Q_w(1.0), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(g.dilution_Q_zeta(1.0),
                 WithinRel((2.0 / 0.5) * (1.0 / g.s() - 1.0), 1e-14));
    REQUIRE_THAT(g.dilution_Q_zeta(1.0), WithinAbs(0.61880215, 1e-7));
    // Monotone decreasing from pole to rim.
    double prev = g.dilution_Q_w(0.0);
    for (double w : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double q = g.dilution_Q_w(w);
        REQUIRE(q <= prev);
        prev = q;
    }
}

TEST_CASE("comoving drift of zeta matches finite differences", "[geometry]") {
    const double gamma = 0.5, h = 1e-6, rate = -1.0;
    for (double w : {0.2, 0.6, 0.95}) {
        const double zp = CapGeometry(gamma + h).zeta_of_w(w);
        const double zm = CapGeometry(gamma - h).zeta_of_w(w);
        const double fd = rate * (zp - zm) / (2.0 * h);
        const CapGeometry g(gamma);
        CAPTURE(w);
        REQUIRE_THAT(g.zeta_drift(g.zeta_of_w(w), rate), WithinRel(fd, 1e-7));
    }
}

TEST_CASE("degree drift is step-size stable", "[geometry]") {
    const double d1 = degree_drift(5, 1, 0.5, -1.0, 1e-4);
    const double d2 = degree_drift(5, 1, 0.5, -1.0, 1e-6);
    REQUIRE_THAT(d1, WithinRel(d2, 1e-5));
    // Degrees grow as the cap flattens (gamma decreases), so with
    // gamma_rate < 0 the drift is positive.
    REQUIRE(d2 > 0.0);
}

TEST_CASE("profile drift vanishes at the moving edge", "[geometry]") {
    // The mode family keeps its boundary zero pinned to the rim, so the total
    // slow-time derivative of the profile at zeta = s must vanish.
    const CapGeometry g(0.5);
    const CapMode mode(5, 1, g);
    const double rate = -1.0;
    const double ldot = degree_drift(5, 1, g.gamma, rate);
    const double scale = max_abs_ferrers(5, mode.lambda, g.s(), 1.0);
    const double edge = profile_drift(g, mode, g.s(), rate, ldot);
    REQUIRE(std::abs(edge) < 1e-6 * scale);
    // ... and does not vanish in the interior.
    const double mid = profile_drift(g, mode, 0.93, rate, ldot);
    REQUIRE(std::abs(mid) > 1e-4 * scale);
}

TEST_CASE("frozen mode eigenvalues", "[geometry]") {
    const CapGeometry g(0.5);
    const CapMode mode(5, 1, g);
    REQUIRE_THAT(mode.lambda, WithinAbs(16.504141061133357, 1e-10));
    REQUIRE_THAT(mode.mu, WithinRel(16.504141061133357 * 17.504141061133357 * 0.25,
                                    1e-12));
    // Mode value separates into cos(m phi) times the meridional profile.
    REQUIRE_THAT(mode.value(0.92, 0.3),
                 WithinRel(std::cos(5 * 0.3) * mode.profile(0.92), 1e-14));
}

TEST_CASE("geometry input validation", "[geometry]") {
    REQUIRE_THROWS_AS(CapGeometry(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(CapGeometry(1.2), std::invalid_argument);
    REQUIRE_THROWS_AS(CapGeometry(0.5, -1.0), std::invalid_argument);
}
