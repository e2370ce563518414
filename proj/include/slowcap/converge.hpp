#pragma once

// Grid-refinement study for the sweep solver: run the same configuration on
// a ladder of radial resolutions plus a finer reference grid, measure the
// endpoint-field error of each ladder run against the radially interpolated
// reference, and fit the convergence order in both the area-weighted L2 and
// the max norms.  The azimuthal resolution is held fixed across the ladder
// (the phi direction is handled spectrally and is exact for the smooth
// fields of interest), so the fitted slope isolates the radial stencil.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "kinetics.hpp"
#include "reduction.hpp"
#include "simulator.hpp"
#include "spline.hpp"

namespace slowcap {

struct ConvergenceResult {
    std::vector<int> nw;       ///< ladder resolutions
    std::vector<double> h;     ///< grid spacings 1/nw
    std::vector<double> l2;    ///< endpoint-field L2 errors vs reference
    std::vector<double> linf;  ///< endpoint-field max errors vs reference
    std::vector<double> x_end; ///< extracted amplitude at the endpoint
    int ref_nw = 0;
    double ref_x_end = 0.0;
    double slope_l2 = 0.0, slope_linf = 0.0; ///< least-squares orders
};

namespace detail {

inline double fit_slope(const std::vector<double>& h,
                        const std::vector<double>& e) {
    // least-squares slope of ln e against ln h
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(e[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace detail

/// Run `base` on every ladder resolution and on `ref_nw`, comparing final
/// activator fields.  base.nw is ignored; base.nphi is shared by all runs.
inline ConvergenceResult run_convergence(SimConfig base,
                                         const std::vector<int>& ladder,
                                         int ref_nw, const Kinetics& kin,
                                         const Calibration& cal) {
    if (ladder.size() < 2)
        throw std::invalid_argument("run_convergence: need >= 2 resolutions");
    for (int nw : ladder)
        if (nw >= ref_nw)
            throw std::invalid_argument(
                "run_convergence: reference must be finer than the ladder");

    auto final_state = [&](int nw) {
        SimConfig cfg = base;
        cfg.nw        = nw;
        cfg.snapshot_gammas.clear();
        Simulator sim(cfg, kin, cal);
        auto res = sim.run();
        struct Out {
            SurfaceField f;
            double x;
        };
        return Out{res.snapshots.back(), res.series.x.back()};
    };

    const auto ref = final_state(ref_nw);

    // Radial interpolants of the reference activator, one per phi column.
    std::vector<double> wref(ref_nw);
    for (int i = 0; i < ref_nw; ++i) wref[i] = (i + 0.5) / ref_nw;
    std::vector<CubicSpline> cols;
    cols.reserve(base.nphi);
    for (int j = 0; j < base.nphi; ++j) {
        std::vector<double> col(ref_nw);
        for (int i = 0; i < ref_nw; ++i)
            col[i] = ref.f.U[std::size_t(i) * base.nphi + j];
        cols.emplace_back(wref, col);
    }

    ConvergenceResult out;
    out.ref_nw    = ref_nw;
    out.ref_x_end = ref.x;
    const CapGeometry geom(base.gamma_end, 1.0);
    for (int nw : ladder) {
        const auto run = final_state(nw);
        double linf = 0.0, l2 = 0.0, area = 0.0;
        for (int i = 0; i < nw; ++i) {
            const double w  = (i + 0.5) / nw;
            const double aw = geom.area_weight(w);
            for (int j = 0; j < base.nphi; ++j) {
                const double d =
                    run.f.U[std::size_t(i) * base.nphi + j] - cols[j](w);
                linf = std::max(linf, std::abs(d));
                l2 += d * d * aw;
                area += aw;
            }
        }
        out.nw.push_back(nw);
        out.h.push_back(1.0 / nw);
        out.linf.push_back(linf);
        out.l2.push_back(std::sqrt(l2 / area));
        out.x_end.push_back(run.x);
    }
    out.slope_l2   = detail::fit_slope(out.h, out.l2);
    out.slope_linf = detail::fit_slope(out.h, out.linf);
    return out;
}

} // namespace slowcap
