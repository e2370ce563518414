#pragma once

// ============================================================================
// slowcap -- spherical-cap geometry and the fixed disk chart
//
// The domain is a spherical cap whose boundary rim is a circle of FIXED
// radius R; the cap's opening half-angle theta_max parameterizes how domed
// it is, via the curvature index gamma = sin(theta_max) (gamma = 1 is a
// hemisphere; gamma -> 0 the flat disk of radius R).  The supporting sphere
// therefore has radius R/gamma, and flattening the cap (gamma decreasing)
// inflates the sphere while the rim stays pinned.  We write
// s = cos(theta_max) = sqrt(1 - gamma^2) and zeta = cos(theta) in [s, 1].
//
// Disk chart.  Stereographic projection from the antipode maps the cap
// conformally onto the unit disk {w <= 1}:
//
//   rho = tan(theta/2),  rho_max = tan(theta_max/2),  w = rho/rho_max,
//
//   zeta(w) = [(1+s) - w^2 (1-s)] / [(1+s) + w^2 (1-s)],
//
// with surface metric  ds^2 = Lambda(w)^2 (dw^2 + w^2 dphi^2)  and
//
//   Lambda(w)^2 = 1 / c(w),
//   c(w) = [(1+s) + w^2 (1-s)]^2 / (4 R^2),
//
// so the Laplace-Beltrami operator factorizes as
//
//   Delta_cap = c(w) * Delta_disk,
//   Delta_disk = d^2/dw^2 + (1/w) d/dw + (1/w^2) d^2/dphi^2,
//
// and the physical area measure is  dA = [w / c(w)] dw dphi.
// At the rim c(1) = 1/R^2 for every gamma (the rim metric never moves).
// As gamma changes the chart stays the unit disk; only the scalar field
// c(w) (and the dilution field Q) move.  Material points of the evolving
// cap sit at FIXED w (constant-eta motion), which is what makes the chart
// the natural comoving frame.
//
// Eigenmodes.  The Dirichlet modes of the cap are
//   Phi_{m,n}(theta, phi) = cos(m phi) P^m_{lambda_{m,n}}(cos theta),
// with lambda_{m,n} the n-th degree root of P^m_lambda(s) = 0 and
// Laplace-Beltrami eigenvalue mu = lambda(lambda+1) gamma^2 / R^2
// (the familiar lambda(lambda+1) over the squared sphere radius R/gamma).
//
// Dilution.  The local relative area expansion rate of the evolving cap is
// gamma'(tau) Q with
//   Q(zeta) = (2/gamma) (zeta/s - 1),
// which vanishes on the boundary ring and peaks at the pole.
// ============================================================================

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "specfun.hpp"

namespace slowcap {

// ----------------------------------------------------------------------------
// CapGeometry: all chart/measure quantities for one value of gamma.
// ----------------------------------------------------------------------------
struct CapGeometry {
    double gamma;  ///< curvature index, sin(theta_max)
    double radius; ///< rim radius R (fixed as the cap flattens)

    CapGeometry(double gamma_, double radius_ = 1.0) : gamma(gamma_), radius(radius_) {
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw std::invalid_argument("CapGeometry: gamma must lie in (0, 1]");
        if (!(radius > 0.0)) throw std::invalid_argument("CapGeometry: radius must be > 0");
    }

    /// cos(theta_max) = sqrt(1 - gamma^2).
    double s() const { return std::sqrt(std::max(0.0, 1.0 - gamma * gamma)); }

    double theta_max() const { return std::asin(gamma); }

    /// Radius of the supporting sphere, R/gamma.
    double sphere_radius() const { return radius / gamma; }

    /// Solid angle the cap subtends on its sphere: 2 pi (1 - s).
    double solid_angle() const { return 2.0 * M_PI * (1.0 - s()); }

    /// Physical cap area (R/gamma)^2 * solid angle = 2 pi R^2 / (1 + s).
    double area() const {
        const double rs = sphere_radius();
        return rs * rs * solid_angle();
    }

    // --- chart maps -----------------------------------------------------------

    /// zeta = cos(theta) at disk radius w in [0, 1].
    double zeta_of_w(double w) const {
        const double sv = s();
        const double w2 = w * w;
        return ((1.0 + sv) - w2 * (1.0 - sv)) / ((1.0 + sv) + w2 * (1.0 - sv));
    }

    /// Inverse chart: disk radius w for zeta = cos(theta) in [s, 1].
    double w_of_zeta(double zeta) const {
        const double sv = s();
        assert(zeta >= sv - 1e-12 && zeta <= 1.0 + 1e-12 && "zeta outside cap range");
        const double num = (1.0 + sv) * (1.0 - zeta);
        const double den = (1.0 - sv) * (1.0 + zeta);
        return std::sqrt(std::max(0.0, num / den));
    }

    double theta_of_w(double w) const { return std::acos(zeta_of_w(w)); }
    double w_of_theta(double theta) const { return w_of_zeta(std::cos(theta)); }

    /// Conformal factor c(w) multiplying the flat disk Laplacian:
    /// Delta_cap = c(w) Delta_disk.  Strictly positive on [0, 1].
    double conformal_factor(double w) const {
        const double sv = s();
        const double b  = (1.0 + sv) + w * w * (1.0 - sv);
        return b * b / (4.0 * radius * radius);
    }

    /// Physical area density: dA = area_weight(w) dw dphi.
    double area_weight(double w) const { return w / conformal_factor(w); }

    // --- dilution ---------------------------------------------------------------

    /// Relative area-expansion profile Q(zeta) = (2/gamma) (zeta/s - 1);
    /// the local dilution rate of the evolving cap is gamma'(tau) * Q.
    double dilution_Q_zeta(double zeta) const {
        return (2.0 / gamma) * (zeta / s() - 1.0);
    }

    double dilution_Q_w(double w) const { return dilution_Q_zeta(zeta_of_w(w)); }

    // --- comoving drift ---------------------------------------------------------

    /// d(zeta)/d(tau) at fixed material point (fixed w) for curvature rate
    /// gamma_rate = d(gamma)/d(tau):
    ///   zeta_dot = -gamma_rate (1 - zeta^2) / (gamma s).
    double zeta_drift(double zeta, double gamma_rate) const {
        return -gamma_rate * (1.0 - zeta * zeta) / (gamma * s());
    }
};

// ----------------------------------------------------------------------------
// CapMode: one Dirichlet eigenmode (m, n) of the cap at fixed gamma.
// ----------------------------------------------------------------------------
struct CapMode {
    int m;         ///< azimuthal wavenumber (>= 0)
    int n;         ///< radial index (>= 1)
    double lambda; ///< boundary degree lambda_{m,n}(gamma)
    double mu;     ///< Laplace-Beltrami eigenvalue

    CapMode(int m_, int n_, const CapGeometry& geom)
        : m(m_), n(n_), lambda(boundary_degree(m_, n_, geom.gamma)),
          mu(cap_eigenvalue(lambda, geom.gamma, geom.radius)) {}

    /// Meridional profile P^m_lambda(zeta).
    double profile(double zeta) const { return ferrers_p(m, lambda, zeta); }

    /// Full mode value cos(m phi) P^m_lambda(zeta).
    double value(double zeta, double phi) const {
        return std::cos(m * phi) * profile(zeta);
    }
};

/// d(lambda_{m,n})/d(tau) for curvature rate gamma_rate, by symmetric
/// finite difference in gamma (h stability-checked in the tests).
inline double degree_drift(int m, int n, double gamma, double gamma_rate,
                           double h = 1e-6) {
    const double lp = boundary_degree(m, n, gamma + h);
    const double lm = boundary_degree(m, n, gamma - h);
    return gamma_rate * (lp - lm) / (2.0 * h);
}

/// Slow-time derivative of the meridional profile at a fixed material point:
///   Phi'(zeta) = dP/dlambda * lambda_dot + dP/dzeta * zeta_dot,
/// where zeta rides the comoving chart (zeta_drift).  Vanishes identically at
/// the boundary zeta = s (the mode family keeps its zero pinned to the
/// moving edge), which the tests verify.
inline double profile_drift(const CapGeometry& geom, const CapMode& mode,
                            double zeta, double gamma_rate,
                            double lambda_dot) {
    const double dPdl = ferrers_dlambda(mode.m, mode.lambda, zeta);
    const double dPdz = ferrers_dx(mode.m, mode.lambda, zeta);
    return dPdl * lambda_dot + dPdz * geom.zeta_drift(zeta, gamma_rate);
}

// ----------------------------------------------------------------------------
// Quadrature helpers on the cap.
// ----------------------------------------------------------------------------

/// Composite Gauss-Legendre rule in zeta over [s, 1] (meridional integrals
/// against the measure sin(theta) dtheta = -dzeta, orientation absorbed so
/// that weights are positive).
inline Quadrature zeta_rule(const CapGeometry& geom, int panels = 64) {
    return composite_gauss8(geom.s(), 1.0, panels);
}

/// Solid-angle integral of an axisymmetric sampled profile f(zeta):
///   integral f dOmega = 2 pi * sum_i w_i f(zeta_i).
inline double axisymmetric_integral(const Quadrature& rule, std::span<const double> f) {
    return 2.0 * M_PI * rule.sum(f);
}

} // namespace slowcap
