#pragma once

// ============================================================================
// slowcap -- natural cubic spline interpolation
//
// Small self-contained natural cubic spline (second derivative zero at both
// ends) over an arbitrary strictly increasing knot grid.  Used to interpolate
// slowly varying reduction coefficients (growth rate, drift correction,
// cubic coefficient) between precomputed samples.
// ============================================================================

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace slowcap {

class CubicSpline {
  public:
    CubicSpline() = default;

    /// Build a natural cubic spline through (x[i], y[i]); x strictly increasing.
    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 3) throw std::invalid_argument("CubicSpline: need at least 3 knots");
        if (y_.size() != n) throw std::invalid_argument("CubicSpline: size mismatch");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw std::invalid_argument("CubicSpline: knots must increase strictly");

        // Solve the tridiagonal system for second derivatives m_i with
        // natural end conditions m_0 = m_{n-1} = 0.
        m_.assign(n, 0.0);
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), sup(n, 0.0);
        diag[0] = 1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double hr = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (hl + hr);
            sup[i]  = hr;
            rhs[i]  = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
        }
        diag[n - 1] = 1.0;
        // Thomas elimination (sub-diagonal of row i is h_{i-1} = x_i - x_{i-1}).
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double hl = x_[i] - x_[i - 1];
            const double f  = hl / diag[i - 1];
            diag[i] -= f * sup[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
            if (i == 1) break;
        }
    }

    /// Evaluate at t (clamped extrapolation uses the end cubic).
    double operator()(double t) const {
        const std::size_t i = segment(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

    /// First derivative.
    double deriv(double t) const {
        const std::size_t i = segment(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

    /// Natural-end second derivatives (zero by construction; exposed for tests).
    double second_deriv_front() const { return m_.front(); }
    double second_deriv_back() const { return m_.back(); }

  private:
    std::size_t segment(double t) const {
        // Binary search for the containing interval; clamp outside the range.
        if (t <= x_.front()) return 0;
        if (t >= x_.back()) return x_.size() - 2;
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= t ? lo : hi) = mid;
        }
        return lo;
    }

    std::vector<double> x_, y_, m_;
};

} // namespace slowcap
