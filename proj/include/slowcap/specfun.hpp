#pragma once

// ============================================================================
// slowcap -- special functions
//
// Ferrers (associated Legendre) functions P^m_lambda(x) of integer order
// m >= 0 and real degree lambda >= 0 on the cut -1 < x <= 1, their
// derivatives, the boundary-degree eigenvalue search, and composite
// Gauss-Legendre quadrature.
//
// Evaluation strategy
// -------------------
// The Gauss hypergeometric representation
//
//   P^m_nu(x) = (-1)^m (nu-m+1)_{2m} / (2^m m!) (1-x^2)^{m/2}
//               * 2F1(m-nu, nu+m+1; m+1; (1-x)/2)
//
// (Condon-Shortley phase included) is numerically reliable only for small
// degrees: for large nu the alternating series cancels catastrophically,
// with term magnitudes up to ~exp(2*nu*sqrt(z)) above the result.  We
// therefore evaluate the series only at the two fractional seed degrees
//
//   nu0 = m + frac(lambda - m)   and   nu0 + 1,
//
// where the amplification is bounded and harmless, and then advance to the
// requested degree with the three-term degree recurrence
//
//   (nu - m + 1) P^m_{nu+1}(x) = (2 nu + 1) x P^m_nu(x) - (nu + m) P^m_{nu-1}(x),
//
// which is neutrally stable on the cut.  Agreement with independent
// references is at the 1e-12 relative level over the degrees and arguments
// this project uses (validated in the test suite).
// ============================================================================

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

namespace slowcap {

// ----------------------------------------------------------------------------
// Quadrature: composite Gauss-Legendre rule.
// ----------------------------------------------------------------------------

/// Nodes and weights of a quadrature rule on some interval.
struct Quadrature {
    std::vector<double> x; ///< nodes
    std::vector<double> w; ///< weights

    std::size_t size() const { return x.size(); }

    /// Integrate a callable f(double)->double against the rule.
    template <typename F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(x[i]);
        return acc;
    }

    /// Weighted dot product of sampled values: sum_i w_i * v_i.
    double sum(std::span<const double> v) const {
        assert(v.size() == w.size() && "sample count must match rule size");
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * v[i];
        return acc;
    }
};

/// Composite Gauss-Legendre rule: `panels` equal subintervals of [a, b],
/// 8 Gauss points per panel (exact for local polynomial degree <= 15).
inline Quadrature composite_gauss8(double a, double b, int panels = 64) {
    if (!(panels >= 1)) throw std::invalid_argument("composite_gauss8: panels must be >= 1");
    if (!(b > a)) throw std::invalid_argument("composite_gauss8: requires b > a");
    using rule = boost::math::quadrature::gauss<double, 8>;
    // Boost stores the nonnegative half of the symmetric rule.
    const auto& xs = rule::abscissa(); // size 4, ascending, in [0, 1)
    const auto& ws = rule::weights();

    Quadrature q;
    q.x.reserve(static_cast<std::size_t>(panels) * 8);
    q.w.reserve(static_cast<std::size_t>(panels) * 8);
    const double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * hp;
        const double half = 0.5 * hp;
        // negative then positive abscissae, ascending within the panel
        for (int i = 3; i >= 0; --i) {
            q.x.push_back(mid - half * xs[static_cast<std::size_t>(i)]);
            q.w.push_back(half * ws[static_cast<std::size_t>(i)]);
        }
        for (int i = 0; i < 4; ++i) {
            q.x.push_back(mid + half * xs[static_cast<std::size_t>(i)]);
            q.w.push_back(half * ws[static_cast<std::size_t>(i)]);
        }
    }
    return q;
}

// ----------------------------------------------------------------------------
// Gauss hypergeometric series (restricted use: convergent |z| < 1 cases
// arising from the Legendre seeds, where a <= 0 keeps terms tame).
// ----------------------------------------------------------------------------
inline double hyp2f1_series(double a, double b, double c, double z) {
    assert(std::abs(z) < 1.0 && "hyp2f1_series requires |z| < 1");
    double term = 1.0;
    double sum  = 1.0;
    for (int k = 0; k < 500; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
    }
    throw std::runtime_error("hyp2f1_series: no convergence in 500 terms");
}

namespace detail {

/// Direct seed evaluation of P^m_nu(x) by prefactor * series.  Intended for
/// nu - m in [0, 2) (plus the nu = lambda - 1 < m special case needed by the
/// derivative identity), where cancellation is bounded.
inline double ferrers_seed(int m, double nu, double x) {
    const double z = 0.5 * (1.0 - x);
    // (nu-m+1)_{2m} = Gamma(nu+m+1)/Gamma(nu-m+1); positive whenever nu > m-1.
    assert(nu > m - 1.0 && "seed Pochhammer requires nu > m - 1");
    const double lpoch = std::lgamma(nu + m + 1.0) - std::lgamma(nu - m + 1.0);
    const double lfac  = std::lgamma(m + 1.0);
    const double sign  = (m % 2 == 0) ? 1.0 : -1.0;
    const double pref =
        sign * std::exp(lpoch - m * std::log(2.0) - lfac) * std::pow(1.0 - x * x, 0.5 * m);
    if (pref == 0.0) return 0.0; // x = +-1 with m > 0
    return pref * hyp2f1_series(m - nu, nu + m + 1.0, m + 1.0, z);
}

} // namespace detail

/// Ferrers function of the first kind P^m_lambda(x) together with its
/// degree-neighbor P^m_{lambda-1}(x) (the pair the derivative identity
/// needs).  Requirements: m >= 0, lambda >= 0, -1 < x <= 1.
inline std::pair<double, double> ferrers_p_pair(int m, double lambda, double x) {
    if (m < 0) throw std::invalid_argument("ferrers_p_pair: order m must be >= 0");
    if (!(x > -1.0 && x <= 1.0))
        throw std::invalid_argument("ferrers_p_pair: argument x must lie in (-1, 1]");
    if (!(lambda >= 0.0)) throw std::invalid_argument("ferrers_p_pair: degree must be >= 0");

    const int steps = static_cast<int>(std::floor(lambda - m));
    if (steps < 0) {
        // lambda < m: P^m_lambda still defined; evaluate directly (and the
        // degree-neighbor below it, which may hit the Pochhammer boundary).
        const double p  = detail::ferrers_seed(m, lambda, x);
        const double pm = (lambda - 1.0 > m - 1.0)
                              ? detail::ferrers_seed(m, lambda - 1.0, x)
                              : 0.0; // vanishing Pochhammer factor
        return {p, pm};
    }
    const double frac = lambda - m - steps;
    const double nu0  = m + frac;

    double p0 = detail::ferrers_seed(m, nu0, x);
    double p1 = detail::ferrers_seed(m, nu0 + 1.0, x);
    if (steps == 0) {
        // lambda = nu0; neighbor lambda-1 = nu0 - 1 sits below the order.
        const double pm = (nu0 - 1.0 > m - 1.0)
                              ? detail::ferrers_seed(m, nu0 - 1.0, x)
                              : 0.0;
        return {p0, pm};
    }
    double nu = nu0 + 1.0;
    for (int k = 0; k < steps - 1; ++k) {
        const double p2 = ((2.0 * nu + 1.0) * x * p1 - (nu + m) * p0) / (nu - m + 1.0);
        p0 = p1;
        p1 = p2;
        nu += 1.0;
    }
    return {p1, p0};
}

/// Ferrers function value P^m_lambda(x).
inline double ferrers_p(int m, double lambda, double x) {
    return ferrers_p_pair(m, lambda, x).first;
}

/// d/dx P^m_lambda(x) from the exact contiguous relation
///   (x^2 - 1) dP/dx = lambda x P^m_lambda - (lambda + m) P^m_{lambda-1}.
/// Requires |x| < 1.
inline double ferrers_dx(int m, double lambda, double x) {
    if (!(std::abs(x) < 1.0))
        throw std::invalid_argument("ferrers_dx: requires |x| < 1");
    const auto [p, pm] = ferrers_p_pair(m, lambda, x);
    return (lambda * x * p - (lambda + m) * pm) / (x * x - 1.0);
}

/// d/dlambda P^m_lambda(x) by symmetric finite difference (the function is
/// analytic in the degree; h = 1e-5 balances truncation and round-off and is
/// stability-checked in the tests).
inline double ferrers_dlambda(int m, double lambda, double x, double h = 1e-5) {
    return (ferrers_p(m, lambda + h, x) - ferrers_p(m, lambda - h, x)) / (2.0 * h);
}

/// Evaluate P^m_lambda at many arguments.
inline std::vector<double> ferrers_p_many(int m, double lambda, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = ferrers_p(m, lambda, xs[i]);
    return out;
}

// ----------------------------------------------------------------------------
// Boundary degree: the n-th positive root lambda of P^m_lambda(s) = 0 in the
// degree variable, with s = sqrt(1 - gamma^2) the cosine of the cap opening
// angle.  These are the Dirichlet eigen-degrees of the cap.
// ----------------------------------------------------------------------------

/// Find lambda_{m,n}(gamma): the n-th root (n >= 1) of P^m_lambda(s) = 0.
///
/// Bracket scan with a fixed step, then TOMS-748 refinement.  A grid point
/// landing exactly on a root (this genuinely happens: at gamma = 1 the roots
/// are integers) is accepted as the root directly, and the scan resumes just
/// past it.
inline double boundary_degree(int m, int n, double gamma) {
    if (n < 1) throw std::invalid_argument("boundary_degree: root index n must be >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("boundary_degree: gamma must lie in (0, 1]");
    const double s = std::sqrt(std::max(0.0, 1.0 - gamma * gamma));
    auto f = [&](double lam) { return ferrers_p(m, lam, s); };

    const double step = 0.25;
    double lam  = m + 0.01; // first root always exceeds m + 1 for gamma <= 1
    double flam = f(lam);
    int found = 0;
    const double lam_max = m + 4000.0;
    while (lam < lam_max) {
        double lam2 = lam + step;
        double f2   = f(lam2);
        if (f2 == 0.0) {
            ++found;
            if (found == n) return lam2;
            lam2 += 1e-9; // nudge off the root so the scan continues cleanly
            f2 = f(lam2);
        } else if (flam * f2 < 0.0) {
            ++found;
            if (found == n) {
                boost::math::tools::eps_tolerance<double> tol(50);
                std::uintmax_t it = 200;
                auto r = boost::math::tools::toms748_solve(f, lam, lam2, flam, f2, tol, it);
                return 0.5 * (r.first + r.second);
            }
        }
        lam  = lam2;
        flam = f2;
    }
    throw std::runtime_error("boundary_degree: root scan exceeded degree budget");
}

/// Laplace-Beltrami eigenvalue of the (m,n) cap mode:
///   mu = lambda (lambda + 1) gamma^2 / R^2
/// (degree lambda = boundary_degree(m, n, gamma); R the sphere radius).
inline double cap_eigenvalue(double lambda, double gamma, double radius) {
    return lambda * (lambda + 1.0) * gamma * gamma / (radius * radius);
}

/// Maximum of |P^m_lambda| over [lo, hi], sampled densely (`nsamp` points).
/// Used as the amplitude gauge of an eigenfunction profile.
inline double max_abs_ferrers(int m, double lambda, double lo, double hi,
                              int nsamp = 20001) {
    if (!(hi > lo)) throw std::invalid_argument("max_abs_ferrers: requires hi > lo");
    double best = 0.0;
    for (int i = 0; i < nsamp; ++i) {
        const double x = lo + (hi - lo) * i / (nsamp - 1.0);
        best = std::max(best, std::abs(ferrers_p(m, lambda, x)));
    }
    return best;
}

} // namespace slowcap
