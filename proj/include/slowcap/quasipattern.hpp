#pragma once

// ============================================================================
// slowcap -- the quasi-patternless background state
//
// On the slowly evolving cap the spatially uniform equilibrium (X00, Y00) is
// no longer an exact solution: the dilution source -gamma'(tau) Q(zeta)
// (X00, Y00) continuously injects an axisymmetric perturbation.  To leading
// order in epsilon the actual background ("quasi-patternless" state) is
//
//   (X, Y) = (X00, Y00) + epsilon (X01, Y01)(zeta; tau) + O(epsilon^2),
//
// where the correction solves the stationary linear problem
//
//   D Delta X01 + K0 X01 = gamma' Q (X00, Y00)^T,   X01 = 0 on the rim.
//
// Expanding Q in the axisymmetric Dirichlet modes P_{0,n}(zeta) with
// coefficients
//
//   q_n = <P_0n, Q> / <P_0n, P_0n>          (flat dzeta inner product),
//
// each mode amplitude follows from a 2x2 solve:
//
//   (alpha_n, beta_n)^T = gamma' q_n A0(mu_0n)^{-1} (X00, Y00)^T,
//
// so X01(zeta) = sum_n alpha_n P_0n(zeta), Y01 = sum_n beta_n P_0n(zeta).
// Both coefficients are exactly linear in gamma' (tested).
//
// The background correction feeds back into the deviation dynamics through
// the shifted Jacobian K(tau, epsilon) = K0 + epsilon K1 with
//
//   K1 = 2 B0((X01, Y01), . )
//      = [  2 bq X01 + 2 cq Y01    2 cq X01 ]
//        [ -(2 bq X01 + 2 cq Y01) -2 cq X01 ],
//
// and through the epsilon-corrected quadratic form
//   B(tau, epsilon)(U, V) = e [ (bq + eps c Y01) U1 V1
//                             + (cq + eps c X01)(U1 V2 + U2 V1) ].
// ============================================================================

#include <vector>

#include "geometry.hpp"
#include "kinetics.hpp"

namespace slowcap {

// ----------------------------------------------------------------------------
// QuasiPatternless: modal solve of the background correction at one gamma.
// ----------------------------------------------------------------------------
struct QuasiPatternless {
    CapGeometry geom;
    Kinetics kin;
    double gamma_rate; ///< d(gamma)/d(tau) driving the dilution source
    int n_modes;       ///< axisymmetric modes retained in the series

    std::vector<double> lambda; ///< degrees of the (0, n) modes
    std::vector<double> mu;     ///< their Laplace-Beltrami eigenvalues
    std::vector<double> q;      ///< dilution projection coefficients q_n
    std::vector<double> alpha;  ///< activator amplitudes
    std::vector<double> beta;   ///< inhibitor amplitudes

    QuasiPatternless(const CapGeometry& geom_, const Kinetics& kin_,
                     double gamma_rate_, int n_modes_ = 5, int quad_panels = 64)
        : geom(geom_), kin(kin_), gamma_rate(gamma_rate_), n_modes(n_modes_) {
        if (n_modes < 1) throw std::invalid_argument("QuasiPatternless: n_modes >= 1");
        const auto rule = zeta_rule(geom, quad_panels);
        const Vec2 base{kin.p.X00(), kin.p.Y00()};
        for (int n = 1; n <= n_modes; ++n) {
            const double lam = boundary_degree(0, n, geom.gamma);
            const double m   = cap_eigenvalue(lam, geom.gamma, geom.radius);
            double pq = 0.0, pp = 0.0;
            for (std::size_t i = 0; i < rule.size(); ++i) {
                const double p = ferrers_p(0, lam, rule.x[i]);
                pq += rule.w[i] * p * geom.dilution_Q_zeta(rule.x[i]);
                pp += rule.w[i] * p * p;
            }
            const double qn = pq / pp;
            const Vec2 ab = solve2(kin.mode_matrix(m), gamma_rate * qn * base);
            lambda.push_back(lam);
            mu.push_back(m);
            q.push_back(qn);
            alpha.push_back(ab[0]);
            beta.push_back(ab[1]);
        }
    }

    /// Background correction (X01, Y01) at zeta = cos(theta).
    Vec2 correction(double zeta) const {
        Vec2 out{0.0, 0.0};
        for (int n = 0; n < n_modes; ++n) {
            const double p = ferrers_p(0, lambda[n], zeta);
            out[0] += alpha[n] * p;
            out[1] += beta[n] * p;
        }
        return out;
    }

    /// Jacobian shift K1(zeta) = 2 B0(correction, . ).
    Mat2 jacobian_shift(double zeta) const {
        const Vec2 c01 = correction(zeta);
        const double t11 = 2.0 * kin.p.bq() * c01[0] + 2.0 * kin.p.cq() * c01[1];
        const double t12 = 2.0 * kin.p.cq() * c01[0];
        return {{{t11, t12}, {-t11, -t12}}};
    }

    /// Scalar part of the epsilon-corrected quadratic form at this zeta:
    /// b(U, V) = (bq + eps c Y01) U1 V1 + (cq + eps c X01)(U1 V2 + U2 V1).
    double b_scalar_corrected(double zeta, double epsilon, const Vec2& U,
                              const Vec2& V) const {
        const Vec2 c01 = correction(zeta);
        const double bq = kin.p.bq() + epsilon * kin.p.c * c01[1];
        const double cq = kin.p.cq() + epsilon * kin.p.c * c01[0];
        return bq * U[0] * V[0] + cq * (U[0] * V[1] + U[1] * V[0]);
    }
};

} // namespace slowcap
