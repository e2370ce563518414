#pragma once

// ============================================================================
// slowcap -- activator/inhibitor reaction kinetics and linear theory
//
// Reaction terms for concentrations (X, Y):
//
//   f(X, Y) = a A - d X - b B X + c X^2 Y
//   g(X, Y) =           b B X - c X^2 Y
//
// with spatially uniform steady state
//
//   X00 = a A / d,   Y00 = b B d / (a A c).
//
// Writing the deviation U = (X - X00, Y - Y00), the reaction Jacobian at the
// steady state is
//
//   K0 = [ k1  k2 ]      k1 = bB - d,     k2 = a^2 A^2 c / d^2,
//        [ k3  k4 ],     k3 = -bB,        k4 = -k2,
//
// and the quadratic / cubic Taylor terms have rank-one structure along
// e = (1, -1)^T:
//
//   B0(U, V)    = e * [ bq U1 V1 + cq (U1 V2 + U2 V1) ],
//   C0t(U,U,U)  = e * c * U1^2 U2,
//
// with bq = bB d / (aA) (= c Y00 X00 / X00 ... the mixed second derivative
// 1/2 f_XX) and cq = aAc/d (= c X00, the mixed derivative f_XY).
//
// Linear modes.  On the cap, each eigenmode with Laplace-Beltrami eigenvalue
// mu evolves under  A0(mu) = -mu D + K0,  D = diag(DX, DY).  Its growth
// rates solve
//
//   sigma^2 - tr(A0) sigma + det(A0) = 0,
//
// and the onset locus (marginal curve) where the leading rate crosses zero
// admits the closed form used by the `curves` subcommand: given mu, the
// stationary-onset value of the feed parameter A satisfies
//
//   kappa(mu) = DY mu (bB - d - DX mu) / (DX mu + d),
//   A(mu)     = (d/a) sqrt(kappa / c),
//
// valid when kappa > 0 (otherwise the mode admits no stationary onset at
// real A and the curve is reported as absent).
// ============================================================================

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>

#include "params.hpp"

namespace slowcap {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

inline Vec2 matvec(const Mat2& M, const Vec2& v) {
    return {M[0][0] * v[0] + M[0][1] * v[1], M[1][0] * v[0] + M[1][1] * v[1]};
}

inline double det2(const Mat2& M) { return M[0][0] * M[1][1] - M[0][1] * M[1][0]; }
inline double tr2(const Mat2& M) { return M[0][0] + M[1][1]; }

/// Solve M x = r for a 2x2 system (throws on singular M).
inline Vec2 solve2(const Mat2& M, const Vec2& r) {
    const double dt = det2(M);
    if (dt == 0.0) throw std::runtime_error("solve2: singular 2x2 system");
    return {(M[1][1] * r[0] - M[0][1] * r[1]) / dt,
            (M[0][0] * r[1] - M[1][0] * r[0]) / dt};
}

// ----------------------------------------------------------------------------
// Kinetics: reaction terms and their Taylor structure at the uniform state.
// ----------------------------------------------------------------------------
struct Kinetics {
    ModelParams p;

    explicit Kinetics(const ModelParams& p_ = {}) : p(p_) { p.validate(); }

    // --- full reaction terms (for the simulator) -------------------------------
    double f(double X, double Y) const {
        return p.a * p.A - p.d * X - p.bB * X + p.c * X * X * Y;
    }
    double g(double X, double Y) const { return p.bB * X - p.c * X * X * Y; }

    // --- linearization ----------------------------------------------------------
    Mat2 jacobian() const {
        return {{{p.k1(), p.k2()}, {p.k3(), p.k4()}}};
    }

    /// A0(mu) = -mu D + K0, the per-mode linear operator.
    Mat2 mode_matrix(double mu) const {
        Mat2 K = jacobian();
        K[0][0] -= mu * p.DX;
        K[1][1] -= mu * p.DY;
        return K;
    }

    /// Both growth rates (real or complex-conjugate pair) for eigenvalue mu.
    std::array<std::complex<double>, 2> sigma_pair(double mu) const {
        const Mat2 M  = mode_matrix(mu);
        const double t = tr2(M), dt = det2(M);
        const std::complex<double> disc =
            std::sqrt(std::complex<double>(t * t - 4.0 * dt, 0.0));
        return {0.5 * (t + disc), 0.5 * (t - disc)};
    }

    /// Leading (largest real part) growth rate for eigenvalue mu.
    double sigma_max(double mu) const {
        const auto s = sigma_pair(mu);
        return std::max(s[0].real(), s[1].real());
    }

    /// Right null-ish vector of A0(mu) - sigma I used throughout the reduction:
    /// u0 = (k2, DX mu - k1 + sigma)^T.
    Vec2 right_vector(double mu, double sigma) const {
        return {p.k2(), p.DX * mu - p.k1() + sigma};
    }

    /// Left counterpart u0* = (k3, DX mu - k1 + sigma)^T (adjoint null vector
    /// of A0(mu)^T - sigma I up to scale).
    Vec2 left_vector(double mu, double sigma) const {
        return {p.k3(), p.DX * mu - p.k1() + sigma};
    }

    // --- quadratic / cubic reaction structure ----------------------------------

    /// Scalar part of the quadratic form: B0(U, V) = e * b0_scalar(U, V),
    /// e = (1, -1)^T.
    double b0_scalar(const Vec2& U, const Vec2& V) const {
        return p.bq() * U[0] * V[0] + p.cq() * (U[0] * V[1] + U[1] * V[0]);
    }

    Vec2 B0(const Vec2& U, const Vec2& V) const {
        const double s = b0_scalar(U, V);
        return {s, -s};
    }

    /// Scalar part of the symmetric cubic form applied to (U, U, U):
    /// C0t(U,U,U) = e * c * U1^2 U2.
    double c0_scalar(const Vec2& U) const { return p.c * U[0] * U[0] * U[1]; }

    Vec2 C0t(const Vec2& U) const {
        const double s = c0_scalar(U);
        return {s, -s};
    }

    // --- marginal curve ----------------------------------------------------------

    /// Stationary-onset feed value A for a mode with eigenvalue mu, or
    /// nullopt when the mode admits no real onset (kappa <= 0).
    std::optional<double> marginal_A(double mu) const {
        const double num = p.DY * mu * (p.bB - p.d - p.DX * mu);
        const double den = p.DX * mu + p.d;
        const double kappa = num / den;
        if (!(kappa > 0.0)) return std::nullopt;
        return (p.d / p.a) * std::sqrt(kappa / p.c);
    }
};

} // namespace slowcap
