#pragma once

// ============================================================================
// slowcap -- centre-manifold reduction at the critical mode
//
// Near onset the dynamics collapse onto the centre manifold of the critical
// mode (m, n) (default (5, 1)): with Phi = P^m_lambda(zeta) cos(m phi) and
// u0 the right near-null vector of A0(mu),
//
//   U = x u0 Phi + x^2 sum_{k,j} h_kj P_kj(zeta) cos(k phi) + O(x^3),
//   dx/dt = sigma0 x + C x^3 + ...,
//
// where the quadratic self-interaction of the critical mode excites only the
// azimuthal families k = 0 and k = 2m (from cos^2(m phi)).  Each slaved
// amplitude solves
//
//   [2 sigma0 I - A0(mu_kj)] h_kj = b0(u0, u0) T_kj / (2 n_j) e,
//
// with T_kj = int P^2_{m,1} P_kj dzeta and n_j = int P_kj^2 dzeta, and the
// cubic coefficient assembles from the direct cubic term plus the
// quadratic-times-slaved feedback:
//
//   C_raw = N* [ (u0*.e) c u0x^2 u0y (3 pi / 4) T3
//              + sum_kj 2 (u0*.e) b0(u0, h_kj) ang_k T_kj ],
//   N*    = 1 / ((u0*. u0) pi I_PP),   ang_0 = pi,  ang_2m = pi/2,
//   T3    = int P^4_{m,1} dzeta,       I_PP  = int P^2_{m,1} dzeta.
//
// Gauge.  C_raw depends on the (arbitrary) normalization of u0 and Phi; all
// observable predictions are gauge-invariant combinations.  We fix the gauge
// by calibrating the cubic coefficient at gamma_ref = 0.5 to the reference
// value reference_cubic_coefficient below: the amplitude rescaling
// x -> x / s with s = sqrt(C_raw(gamma_ref) / C_ref) maps
// C -> C_raw / s^2 and the mode peak M -> M_raw / s, leaving sigma
// untouched.  In the calibrated gauge the physical activator deviation is
// U_X = x k2 (Phi / s), so a field with peak amplitude p corresponds to
// x = p / (k2 M_hat).
//
// Slow drift.  On the evolving cap the critical eigenpair itself drifts; to
// first order in epsilon the scalar reduction picks up a correction
// sigma0 -> sigma0 + epsilon sigma1 with
//
//   sigma1 = u0* . [ A1 u0 - u0' - d_n u0 ] / (u0* . u0),
//
//   A1  = <K1> - gamma' <Q> I         (mode-weighted averages),
//   u0' = gamma' (0, DX dmu/dgamma + dsigma0/dgamma)^T,
//   d_n = int P Phi' dzeta / I_PP     (Phi' the comoving profile drift).
// ============================================================================

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "kinetics.hpp"
#include "quasipattern.hpp"

namespace slowcap {

/// Reference value of the calibrated cubic coefficient at gamma = 0.5;
/// the supercritical pitchfork normal form is dx/dt = sigma x + C x^3.
inline constexpr double reference_cubic_coefficient = -2.99378;

// ----------------------------------------------------------------------------
// ModeReduction: raw (uncalibrated) reduction data at one gamma.
// ----------------------------------------------------------------------------
struct ModeReduction {
    int m, n;       ///< critical mode indices
    int trunc;      ///< radial truncation N of the slaved families
    CapGeometry geom;
    Kinetics kin;

    double lambda, mu, sigma0;
    Vec2 u0;  ///< right near-null vector (k2, DX mu - k1 + sigma0)
    Vec2 u0s; ///< left  near-null vector (k3, DX mu - k1 + sigma0)
    double I_PP;  ///< int P^2 dzeta
    double M_raw; ///< max |P| over [s, 1]

    struct SlavedMode {
        int k, j;
        double lambda, mu;
        double T;   ///< int P^2_{m,1} P_kj dzeta
        double nrm; ///< int P_kj^2 dzeta
        Vec2 h;     ///< slaved amplitude vector
    };
    std::vector<SlavedMode> slaved;

    double C_raw; ///< uncalibrated cubic coefficient

    ModeReduction(const CapGeometry& geom_, const Kinetics& kin_, int m_ = 5,
                  int n_ = 1, int trunc_ = 5, int quad_panels = 96)
        : m(m_), n(n_), trunc(trunc_), geom(geom_), kin(kin_) {
        if (trunc < 1) throw std::invalid_argument("ModeReduction: trunc >= 1");
        lambda = boundary_degree(m, n, geom.gamma);
        mu     = cap_eigenvalue(lambda, geom.gamma, geom.radius);
        sigma0 = kin.sigma_max(mu);
        u0     = kin.right_vector(mu, sigma0);
        u0s    = kin.left_vector(mu, sigma0);
        M_raw  = max_abs_ferrers(m, lambda, geom.s(), 1.0);

        const auto rule = zeta_rule(geom, quad_panels);
        std::vector<double> P2(rule.size());
        I_PP = 0.0;
        double T3 = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const double p = ferrers_p(m, lambda, rule.x[i]);
            P2[i] = p * p;
            I_PP += rule.w[i] * P2[i];
            T3 += rule.w[i] * P2[i] * P2[i];
        }

        // Slaved families k = 0 and k = 2m, radial index j = 1..trunc.
        const double bself = kin.b0_scalar(u0, u0);
        for (int k : {0, 2 * m}) {
            for (int j = 1; j <= trunc; ++j) {
                SlavedMode sm;
                sm.k      = k;
                sm.j      = j;
                sm.lambda = boundary_degree(k, j, geom.gamma);
                sm.mu     = cap_eigenvalue(sm.lambda, geom.gamma, geom.radius);
                sm.T = sm.nrm = 0.0;
                for (std::size_t i = 0; i < rule.size(); ++i) {
                    const double pk = ferrers_p(k, sm.lambda, rule.x[i]);
                    sm.T += rule.w[i] * P2[i] * pk;
                    sm.nrm += rule.w[i] * pk * pk;
                }
                // [2 sigma0 I - A0(mu_kj)] h = b0(u0,u0) T/(2 nrm) e.
                Mat2 Mkj = kin.mode_matrix(sm.mu);
                Mkj[0][0] = 2.0 * sigma0 - Mkj[0][0];
                Mkj[0][1] = -Mkj[0][1];
                Mkj[1][0] = -Mkj[1][0];
                Mkj[1][1] = 2.0 * sigma0 - Mkj[1][1];
                const double cp = bself * sm.T / (2.0 * sm.nrm);
                sm.h = solve2(Mkj, Vec2{cp, -cp});
                slaved.push_back(sm);
            }
        }

        // Cubic coefficient assembly.
        const double u0se   = u0s[0] - u0s[1]; // u0* . e, e = (1, -1)
        const double nstar  = 1.0 / (dot(u0s, u0) * M_PI * I_PP);
        double acc = u0se * kin.p.c * u0[0] * u0[0] * u0[1] * (3.0 * M_PI / 4.0) * T3;
        for (const auto& sm : slaved) {
            const double ang = (sm.k == 0) ? M_PI : M_PI / 2.0;
            acc += 2.0 * u0se * kin.b0_scalar(u0, sm.h) * ang * sm.T;
        }
        C_raw = nstar * acc;
    }

    /// Verify (for tests): the critical mode dominates every other tracked
    /// mode; returns the smallest |sigma_other| over m' <= m_max, n' <= n_max.
    double spectral_gap(int m_max = 10, int n_max = 5) const {
        double gap = std::numeric_limits<double>::infinity();
        for (int mm = 0; mm <= m_max; ++mm) {
            for (int nn = 1; nn <= n_max; ++nn) {
                if (mm == m && nn == n) continue;
                const double lam = boundary_degree(mm, nn, geom.gamma);
                const double s =
                    kin.sigma_max(cap_eigenvalue(lam, geom.gamma, geom.radius));
                if (s > sigma0)
                    throw std::runtime_error(
                        "ModeReduction: another mode outgrows the critical one");
                gap = std::min(gap, std::abs(s));
            }
        }
        return gap;
    }
};

// ----------------------------------------------------------------------------
// sigma1: first-order drift correction to the reduced growth rate.
// ----------------------------------------------------------------------------
inline double sigma1_drift(const CapGeometry& geom, const Kinetics& kin,
                           double gamma_rate, int m = 5, int n = 1,
                           int qp_modes = 5, int quad_panels = 96,
                           double h_fd = 1e-6) {
    const double lambda = boundary_degree(m, n, geom.gamma);
    const double mu     = cap_eigenvalue(lambda, geom.gamma, geom.radius);
    const double sigma0 = kin.sigma_max(mu);
    const Vec2 u0       = kin.right_vector(mu, sigma0);
    const Vec2 u0s      = kin.left_vector(mu, sigma0);

    // Mode-weighted averages of the background Jacobian shift and dilution.
    const QuasiPatternless qp(geom, kin, gamma_rate, qp_modes, quad_panels);
    const auto rule = zeta_rule(geom, quad_panels);
    double I_PP = 0.0, Qavg = 0.0;
    Mat2 K1avg{{{0.0, 0.0}, {0.0, 0.0}}};
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double p  = ferrers_p(m, lambda, rule.x[i]);
        const double wp = rule.w[i] * p * p;
        I_PP += wp;
        Qavg += wp * geom.dilution_Q_zeta(rule.x[i]);
        const Mat2 K1 = qp.jacobian_shift(rule.x[i]);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) K1avg[r][c] += wp * K1[r][c];
    }
    Qavg /= I_PP;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) K1avg[r][c] /= I_PP;

    Mat2 A1 = K1avg;
    A1[0][0] -= gamma_rate * Qavg;
    A1[1][1] -= gamma_rate * Qavg;

    // Finite-difference derivatives of the eigenpair in gamma.
    const double lp = boundary_degree(m, n, geom.gamma + h_fd);
    const double lm = boundary_degree(m, n, geom.gamma - h_fd);
    const double mup = cap_eigenvalue(lp, geom.gamma + h_fd, geom.radius);
    const double mum = cap_eigenvalue(lm, geom.gamma - h_fd, geom.radius);
    const double dmu = (mup - mum) / (2.0 * h_fd);
    const double dsig = (kin.sigma_max(mup) - kin.sigma_max(mum)) / (2.0 * h_fd);
    const Vec2 u0p{0.0, gamma_rate * (kin.p.DX * dmu + dsig)};

    // Comoving profile drift projected back on the mode.
    const double ldot = gamma_rate * (lp - lm) / (2.0 * h_fd);
    const CapMode mode(m, n, geom);
    double dnum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double p = ferrers_p(m, lambda, rule.x[i]);
        dnum += rule.w[i] * p *
                profile_drift(geom, mode, rule.x[i], gamma_rate, ldot);
    }
    const double dn = dnum / I_PP;

    const Vec2 num = matvec(A1, u0) - u0p - dn * u0;
    return dot(u0s, num) / dot(u0s, u0);
}

// ----------------------------------------------------------------------------
// Calibration: gauge fixing via the reference cubic coefficient.
// ----------------------------------------------------------------------------
struct Calibration {
    double scale; ///< amplitude rescaling s (dimensionless, > 0)

    double calibrate_C(double C_raw) const { return C_raw / (scale * scale); }
    double calibrate_peak(double M_raw) const { return M_raw / scale; }
};

/// Fix the amplitude gauge so the cubic coefficient at gamma_ref matches the
/// reference value.
inline Calibration make_calibration(const Kinetics& kin, double gamma_ref = 0.5,
                                    int m = 5, int n = 1, int trunc = 5,
                                    double radius = 1.0) {
    const ModeReduction red(CapGeometry(gamma_ref, radius), kin, m, n, trunc);
    const double r = red.C_raw / reference_cubic_coefficient;
    if (!(r > 0.0))
        throw std::runtime_error("make_calibration: cubic coefficient sign mismatch");
    return Calibration{std::sqrt(r)};
}

// ----------------------------------------------------------------------------
// ReducedCoeffs: everything the normal form needs at one gamma.
// ----------------------------------------------------------------------------
struct ReducedCoeffs {
    double gamma;
    double sigma0; ///< leading growth rate of the critical mode
    double sigma1; ///< drift correction (enters as sigma0 + epsilon sigma1)
    double C;      ///< calibrated cubic coefficient
    double M_hat;  ///< calibrated mode peak (field peak = x k2 M_hat)
};

inline ReducedCoeffs reduce_at(double gamma, const Kinetics& kin,
                               const Calibration& cal, double gamma_rate,
                               int m = 5, int n = 1, int trunc = 5,
                               double radius = 1.0) {
    const CapGeometry geom(gamma, radius);
    const ModeReduction red(geom, kin, m, n, trunc);
    return ReducedCoeffs{gamma, red.sigma0,
                         sigma1_drift(geom, kin, gamma_rate, m, n),
                         cal.calibrate_C(red.C_raw), cal.calibrate_peak(red.M_raw)};
}

/// Calibrated-gauge amplitude corresponding to a field whose activator
/// deviation peaks at `peak`: x = peak / (k2 M_hat).
inline double amplitude_from_peak(double peak, const Kinetics& kin, double M_hat) {
    return peak / (kin.p.k2() * M_hat);
}

} // namespace slowcap
