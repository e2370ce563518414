#pragma once

// ============================================================================
// slowcap -- model parameters and slow-evolution schedule
//
// Central definition of the Brusselator kinetics constants, the diffusion
// coefficients, and the slow linear schedule gamma(tau) for the curvature
// index of the spherical-cap domain.  Everything downstream (marginal
// curves, eigenproblems, amplitude equations, simulations) reads these
// values from here.
// ============================================================================

#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace slowcap {

// ----------------------------------------------------------------------------
// ModelParams: reaction-diffusion constants.
//
// Kinetics (for concentrations X, Y):
//   f(X, Y) = a*A - d*X - b*B*X + c*X^2*Y
//   g(X, Y) = b*B*X - c*X^2*Y
// b and B only appear as the product b*B, carried here as `bB`.
// The spatially uniform steady state is
//   X00 = a*A/d,   Y00 = b*B*d/(a*A*c).
// ----------------------------------------------------------------------------
struct ModelParams {
    double radius = 1.0;   ///< sphere radius R
    double DX     = 0.005; ///< diffusion coefficient of X
    double DY     = 0.1;   ///< diffusion coefficient of Y
    double a      = 0.01;
    double bB     = 1.5;   ///< product b*B
    double c      = 1.8;
    double d      = 0.375;
    double A      = 76.51981; ///< control parameter (feed)

    // --- uniform steady state -------------------------------------------------
    double X00() const { return a * A / d; }
    double Y00() const { return bB * d / (a * A * c); }

    // --- linearization coefficients at (X00, Y00) ----------------------------
    // J = [ k1 k2 ; k3 k4 ] with
    double k1() const { return bB - d; }
    double k2() const { return a * a * A * A * c / (d * d); }
    double k3() const { return -bB; }
    double k4() const { return -k2(); }

    // --- quadratic-form coefficients at (X00, Y00) ----------------------------
    // B0(U1,U2) = (1,-1)^T [ bq*U1*U2 + cq*(U1*V2 + U2*V1) ]
    double bq() const { return bB * d / (a * A); }
    double cq() const { return a * A * c / d; }

    /// Throws std::invalid_argument when a physically required constraint
    /// fails (all rate/diffusion constants must be positive).
    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
        };
        require(radius > 0.0, "radius must be > 0");
        require(DX > 0.0 && DY > 0.0, "diffusion coefficients must be > 0");
        require(a > 0.0 && bB > 0.0 && c > 0.0 && d > 0.0, "kinetic constants must be > 0");
        require(A > 0.0, "feed parameter A must be > 0");
    }
};

// ----------------------------------------------------------------------------
// Schedule: slow evolution of the curvature index.
//
//   gamma(tau) = gamma0 + gamma_rate * tau,     tau = epsilon * t.
//
// The flattening direction used throughout is gamma_rate = -1 (curvature
// decreasing at unit rate in slow time).  epsilon > 0 selects how slow the
// evolution is in fast time t.
// ----------------------------------------------------------------------------
struct Schedule {
    double gamma0     = 0.5;  ///< curvature index at tau = 0
    double gamma_end  = 0.45; ///< curvature index at the end of the run
    double gamma_rate = -1.0; ///< d(gamma)/d(tau), constant
    double epsilon    = 1e-6; ///< slow-time scale, tau = epsilon * t

    double gamma_of_tau(double tau) const { return gamma0 + gamma_rate * tau; }
    double gamma_of_t(double t) const { return gamma_of_tau(epsilon * t); }

    /// Slow-time value at which gamma(tau) = g.
    double tau_of_gamma(double g) const { return (g - gamma0) / gamma_rate; }

    /// Fast-time length of the run covering [gamma0, gamma_end].
    double t_final() const { return tau_of_gamma(gamma_end) / epsilon; }

    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) throw std::invalid_argument(std::string("Schedule: ") + what);
        };
        require(epsilon > 0.0, "epsilon must be > 0");
        require(gamma_rate != 0.0, "gamma_rate must be nonzero");
        require(gamma0 > 0.0 && gamma0 <= 1.0, "gamma0 must lie in (0, 1]");
        require(gamma_end > 0.0 && gamma_end <= 1.0, "gamma_end must lie in (0, 1]");
        require((gamma_end - gamma0) / gamma_rate >= 0.0,
                "gamma_end must be reachable with the given gamma_rate");
    }
};

// ----------------------------------------------------------------------------
// JSON (de)serialization.  Unknown keys are rejected to catch typos in
// config files early.
// ----------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const ModelParams& p) {
    j = nlohmann::json{{"radius", p.radius}, {"DX", p.DX}, {"DY", p.DY},
                       {"a", p.a},           {"bB", p.bB}, {"c", p.c},
                       {"d", p.d},           {"A", p.A}};
}

inline void from_json(const nlohmann::json& j, ModelParams& p) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "radius" && k != "DX" && k != "DY" && k != "a" && k != "bB" &&
            k != "c" && k != "d" && k != "A")
            throw std::invalid_argument("ModelParams: unknown key '" + k + "'");
    }
    p.radius = j.value("radius", p.radius);
    p.DX     = j.value("DX", p.DX);
    p.DY     = j.value("DY", p.DY);
    p.a      = j.value("a", p.a);
    p.bB     = j.value("bB", p.bB);
    p.c      = j.value("c", p.c);
    p.d      = j.value("d", p.d);
    p.A      = j.value("A", p.A);
    p.validate();
}

inline void to_json(nlohmann::json& j, const Schedule& s) {
    j = nlohmann::json{{"gamma0", s.gamma0},
                       {"gamma_end", s.gamma_end},
                       {"gamma_rate", s.gamma_rate},
                       {"epsilon", s.epsilon}};
}

inline void from_json(const nlohmann::json& j, Schedule& s) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "gamma0" && k != "gamma_end" && k != "gamma_rate" && k != "epsilon")
            throw std::invalid_argument("Schedule: unknown key '" + k + "'");
    }
    s.gamma0     = j.value("gamma0", s.gamma0);
    s.gamma_end  = j.value("gamma_end", s.gamma_end);
    s.gamma_rate = j.value("gamma_rate", s.gamma_rate);
    s.epsilon    = j.value("epsilon", s.epsilon);
    s.validate();
}

} // namespace slowcap
