#pragma once

// ============================================================================
// slowcap -- the reduced normal form and its slow passage through onset
//
// The centre-manifold reduction collapses the dynamics near the critical
// mode to a single pitchfork normal form with slowly drifting coefficients:
//
//   dx/dt = [ sigma0(gamma) + epsilon sigma1(gamma) ] x + C(gamma) x^3,
//   gamma(t) = gamma0 + gamma_rate * epsilon * t.
//
// sigma0, sigma1, C (calibrated gauge) are precomputed on a uniform gamma
// grid and interpolated with natural cubic splines.  The attracting branch
// of the frozen-gamma pitchfork is x*(gamma) = sqrt(-sigma0 / C) where
// sigma0 > 0 (C < 0 throughout: supercritical).
//
// Slow passage through sigma0 = 0 produces a delayed jump: the trajectory
// hugs x ~ 0 well past the static onset before snapping to the branch.  A
// robust scalar diagnostic is the LAST upward crossing of x through half the
// branch value (the literal first crossing is degenerate at onset, where the
// branch emerges from zero while x is still finite).
// ============================================================================

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "reduction.hpp"
#include "spline.hpp"

namespace slowcap {

// ----------------------------------------------------------------------------
// NfTable: sampled reduction coefficients with spline interpolation.
// ----------------------------------------------------------------------------
struct NfTable {
    std::vector<double> gamma, sigma0, sigma1, C, M_hat;
    CubicSpline s_sigma0, s_sigma1, s_C, s_M;

    static NfTable build(const Kinetics& kin, const Calibration& cal,
                         double gamma_min = 0.4415, double gamma_max = 0.52,
                         int samples = 36, double gamma_rate = -1.0,
                         int m = 5, int n = 1, int trunc = 5) {
        if (samples < 4) throw std::invalid_argument("NfTable: samples >= 4");
        if (!(gamma_min < gamma_max))
            throw std::invalid_argument("NfTable: gamma_min < gamma_max required");
        NfTable tab;
        for (int i = 0; i < samples; ++i) {
            const double g =
                gamma_min + (gamma_max - gamma_min) * double(i) / (samples - 1);
            const ReducedCoeffs rc = reduce_at(g, kin, cal, gamma_rate, m, n, trunc);
            tab.gamma.push_back(g);
            tab.sigma0.push_back(rc.sigma0);
            tab.sigma1.push_back(rc.sigma1);
            tab.C.push_back(rc.C);
            tab.M_hat.push_back(rc.M_hat);
        }
        tab.s_sigma0 = CubicSpline(tab.gamma, tab.sigma0);
        tab.s_sigma1 = CubicSpline(tab.gamma, tab.sigma1);
        tab.s_C      = CubicSpline(tab.gamma, tab.C);
        tab.s_M      = CubicSpline(tab.gamma, tab.M_hat);
        return tab;
    }

    double eval_sigma0(double g) const { return s_sigma0(g); }
    double eval_sigma1(double g) const { return s_sigma1(g); }
    double eval_C(double g) const { return s_C(g); }
    double eval_M_hat(double g) const { return s_M(g); }

    /// Static onset: gamma where sigma0 crosses zero (bisection on the spline).
    double onset_gamma() const {
        double lo = gamma.front(), hi = gamma.back();
        if (!(s_sigma0(lo) > 0.0 && s_sigma0(hi) < 0.0))
            throw std::runtime_error("NfTable: sigma0 does not change sign in range");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (s_sigma0(mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

/// Attracting pitchfork branch amplitude: sqrt(-sigma0/C) past onset, else 0.
inline double pitchfork_branch(double sigma0, double C) {
    if (!(C < 0.0)) throw std::invalid_argument("pitchfork_branch: C must be < 0");
    return sigma0 > 0.0 ? std::sqrt(-sigma0 / C) : 0.0;
}

// ----------------------------------------------------------------------------
// Slow-passage integration.
// ----------------------------------------------------------------------------
struct NfSolveConfig {
    double epsilon    = 1e-6;     ///< sweep rate (> 0)
    double x0         = 2.305e-3; ///< initial amplitude
    double gamma0     = 0.51;     ///< start of the sweep
    double gamma_end  = 0.4515;   ///< end of the sweep
    double gamma_rate = -1.0;     ///< d(gamma)/d(tau), tau = epsilon t
    double rel_tol    = 1e-9;
    double abs_tol    = 1e-12;
    int n_out         = 4001;     ///< uniformly spaced output samples
    double blowup     = 1e3;      ///< |x| beyond which integration aborts

    void validate() const {
        if (!(epsilon > 0.0))
            throw std::invalid_argument("NfSolveConfig: epsilon must be > 0");
        if (!(rel_tol > 0.0 && abs_tol > 0.0))
            throw std::invalid_argument("NfSolveConfig: tolerances must be > 0");
        if (n_out < 2) throw std::invalid_argument("NfSolveConfig: n_out >= 2");
        if (gamma_rate == 0.0)
            throw std::invalid_argument("NfSolveConfig: gamma_rate must be nonzero");
        if ((gamma_end - gamma0) * gamma_rate <= 0.0)
            throw std::invalid_argument(
                "NfSolveConfig: gamma_end must lie downstream of gamma0");
    }

    double t_final() const { return (gamma_end - gamma0) / (gamma_rate * epsilon); }
};

struct Trajectory {
    std::vector<double> t, tau, gamma, x, x_branch;
    std::size_t size() const { return t.size(); }
};

/// Integrate the normal form through the sweep with a dense-output
/// Dormand-Prince 5(4) stepper, sampling n_out uniform time points.
inline Trajectory integrate_nf(const NfTable& tab, const NfSolveConfig& cfg) {
    cfg.validate();
    using state = std::array<double, 1>;
    namespace od = boost::numeric::odeint;

    auto rhs = [&](const state& x, state& dxdt, double t) {
        const double g = cfg.gamma0 + cfg.gamma_rate * cfg.epsilon * t;
        dxdt[0] = (tab.eval_sigma0(g) + cfg.epsilon * tab.eval_sigma1(g)) * x[0] +
                  tab.eval_C(g) * x[0] * x[0] * x[0];
    };

    const double tf = cfg.t_final();
    auto stepper = od::make_dense_output(cfg.abs_tol, cfg.rel_tol,
                                         od::runge_kutta_dopri5<state>());
    state x{cfg.x0};
    stepper.initialize(x, 0.0, tf / 1e4);

    Trajectory out;
    out.t.reserve(cfg.n_out);
    std::size_t next = 0;
    auto emit = [&](double t, double xv) {
        const double g = cfg.gamma0 + cfg.gamma_rate * cfg.epsilon * t;
        out.t.push_back(t);
        out.tau.push_back(cfg.epsilon * t);
        out.gamma.push_back(g);
        out.x.push_back(xv);
        out.x_branch.push_back(pitchfork_branch(tab.eval_sigma0(g), tab.eval_C(g)));
    };

    while (stepper.current_time() < tf) {
        stepper.do_step(rhs);
        if (!std::isfinite(stepper.current_state()[0]) ||
            std::abs(stepper.current_state()[0]) > cfg.blowup)
            throw std::runtime_error("integrate_nf: amplitude blow-up");
        while (next < std::size_t(cfg.n_out)) {
            const double ts = tf * double(next) / (cfg.n_out - 1);
            if (ts > stepper.current_time()) break;
            state xs;
            stepper.calc_state(ts, xs);
            emit(ts, xs[0]);
            ++next;
        }
    }
    // Emit any trailing samples pinned to the final state.
    while (next < std::size_t(cfg.n_out)) {
        const double ts = tf * double(next) / (cfg.n_out - 1);
        state xs;
        stepper.calc_state(std::min(ts, stepper.current_time()), xs);
        emit(ts, xs[0]);
        ++next;
    }
    return out;
}

/// Delayed-jump diagnostic: gamma at the LAST upward crossing of |x| through
/// half the frozen-gamma branch amplitude.  Falls back to the static onset if
/// the trajectory never dips below the half-branch line.
inline double gamma_at_half_branch(const Trajectory& traj) {
    std::ptrdiff_t last_below = -1;
    for (std::size_t i = 0; i < traj.size(); ++i)
        if (traj.x_branch[i] > 0.0 && std::abs(traj.x[i]) < 0.5 * traj.x_branch[i])
            last_below = std::ptrdiff_t(i);
    if (last_below < 0) {
        // Never below: the jump is effectively at onset (first branch point).
        for (std::size_t i = 0; i < traj.size(); ++i)
            if (traj.x_branch[i] > 0.0) return traj.gamma[i];
        throw std::runtime_error("gamma_at_half_branch: branch never opens");
    }
    const std::size_t i = std::min(std::size_t(last_below) + 1, traj.size() - 1);
    return traj.gamma[i];
}

} // namespace slowcap
