#pragma once

// ============================================================================
// slowcap -- time integration of the deviation system on the evolving cap
//
// The solver advances the deviation U = (X - X00, Y - Y00) on the fixed disk
// chart (w, phi), where the evolving-cap operators reduce to scalar
// coefficient fields:
//
//   dU/dt = D c(w) Delta_disk U + [K0 + eps K1(zeta)] U - eps gamma' Q U
//         + B(tau, eps)(U, U) + C0(U, U, U)                      (full mode)
//
//   dU/dt = D c(w) Delta_disk U + [K0 + eps K1] U
//         - eps gamma' Q [U + (X00, Y00)]                        (affine mode)
//
// with homogeneous Dirichlet data on the rim w = 1.  The affine mode drops
// the nonlinear terms but keeps the dilution source acting on the base
// state, so its response tracks the quasi-patternless correction
// eps X01 directly.
//
// Discretization.
//  * Cell-centred radial grid w_i = (i + 1/2)/Nw, i = 0..Nw-1; uniform
//    azimuthal grid phi_j = 2 pi j / Nphi.  The rim value lives on a ghost
//    ring at w = 1 that is identically zero, so the Dirichlet condition is
//    exact by construction.  The pole is a zero-area face (w_{-1/2} = 0):
//    no flux crosses it and no pole unknown exists.
//  * Finite-volume disk Laplacian per azimuthal Fourier mode k:
//      (1/(w_i dw)) [ w_{i+1/2} (U_{i+1}-U_i)/dw - w_{i-1/2} (U_i-U_{i-1})/dw ]
//      - (k^2/w_i^2) U_i,
//    with the rim face one half-spacing from the last centre.
//  * IMEX stepping: reaction, dilution, and the order-eps Jacobian shift are
//    explicit (forward Euler); diffusion is implicit (backward Euler),
//    solved exactly per Fourier mode by a tridiagonal (Thomas) sweep after
//    an FFT in phi.  First order in time, second order in space.
//  * The slowly moving geometry (c, Q, K1, critical-mode profile) is
//    refreshed every `cadence` steps and frozen in between; with eps = 0 the
//    refresh reproduces the identical coefficient arrays bit for bit.
//
// Amplitude extraction.  The activator deviation is projected onto the
// critical mode Phi = P^m_lambda(zeta) cos(m phi) by discrete quadrature;
// in the calibrated gauge U_X = x k2 Phi / s, so
//   x(t) = coeff(U_X on Phi) * s / k2,
// with s the calibration scale.  Projections are reported as (cos, sin)
// magnitude pairs so phase-shifted patterns measure identically.
// ============================================================================

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csvio.hpp"
#include "geometry.hpp"
#include "kinetics.hpp"
#include "quasipattern.hpp"
#include "reduction.hpp"

namespace slowcap {

// ----------------------------------------------------------------------------
// Configuration
// ----------------------------------------------------------------------------
struct SimConfig {
    // Production resolution.  The quasi-static pattern-free response is
    // dominated by a slaved mode whose relaxation rate nearly vanishes, so
    // its profile amplifies the O(h^2) eigenvalue error of the radial
    // stencil ~40x; 128 radial cells keep that term below one percent.
    int nw   = 128; ///< radial cells
    int nphi = 128; ///< azimuthal cells (divisible by 4)

    double dt         = 0.1;
    double epsilon    = 1e-6;
    double gamma0     = 0.4915;
    double gamma_end  = 0.4515;
    double gamma_rate = -1.0; ///< d(gamma)/d(tau)
    int cadence       = 50;   ///< geometry refresh period (steps)

    std::string ic     = "eigenmode"; ///< eigenmode | noise | zero
    double ic_peak     = 0.021;       ///< activator peak for eigenmode IC
    double noise_amp_U = 0.05;
    double noise_amp_V = 0.005;
    std::uint64_t seed = 12345;

    bool affine      = false; ///< affine (quasi-patternless probe) mode
    int series_every = 10;    ///< record extracted amplitude every N steps

    int critical_m = 5, critical_n = 1;
    int qp_modes   = 5; ///< background-correction truncation

    std::vector<double> snapshot_gammas;

    void validate() const {
        if (nw < 4) throw std::invalid_argument("SimConfig: nw >= 4");
        if (nphi < 8 || nphi % 4 != 0)
            throw std::invalid_argument("SimConfig: nphi must be >= 8, divisible by 4");
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt > 0");
        if (epsilon < 0.0) throw std::invalid_argument("SimConfig: epsilon >= 0");
        if (cadence < 1) throw std::invalid_argument("SimConfig: cadence >= 1");
        if (series_every < 1) throw std::invalid_argument("SimConfig: series_every >= 1");
        if (ic != "eigenmode" && ic != "noise" && ic != "zero")
            throw std::invalid_argument("SimConfig: ic must be eigenmode|noise|zero");
        if (epsilon > 0.0 && (gamma_end - gamma0) * gamma_rate < 0.0)
            throw std::invalid_argument("SimConfig: gamma_end upstream of gamma0");
        if (!(gamma0 > 0.0 && gamma0 <= 1.0 && gamma_end > 0.0 && gamma_end <= 1.0))
            throw std::invalid_argument("SimConfig: gamma range must lie in (0, 1]");
    }

    double t_final() const {
        if (epsilon == 0.0) return 0.0;
        return (gamma_end - gamma0) / (gamma_rate * epsilon);
    }
};

inline void to_json(nlohmann::json& j, const SimConfig& c) {
    j = nlohmann::json{{"nw", c.nw},
                       {"nphi", c.nphi},
                       {"dt", c.dt},
                       {"epsilon", c.epsilon},
                       {"gamma0", c.gamma0},
                       {"gamma_end", c.gamma_end},
                       {"gamma_rate", c.gamma_rate},
                       {"cadence", c.cadence},
                       {"ic", c.ic},
                       {"ic_peak", c.ic_peak},
                       {"noise_amp_U", c.noise_amp_U},
                       {"noise_amp_V", c.noise_amp_V},
                       {"seed", c.seed},
                       {"affine", c.affine},
                       {"series_every", c.series_every},
                       {"critical_m", c.critical_m},
                       {"critical_n", c.critical_n},
                       {"qp_modes", c.qp_modes},
                       {"snapshot_gammas", c.snapshot_gammas}};
}

inline void from_json(const nlohmann::json& j, SimConfig& c) {
    SimConfig d;
    c.nw           = j.value("nw", d.nw);
    c.nphi         = j.value("nphi", d.nphi);
    c.dt           = j.value("dt", d.dt);
    c.epsilon      = j.value("epsilon", d.epsilon);
    c.gamma0       = j.value("gamma0", d.gamma0);
    c.gamma_end    = j.value("gamma_end", d.gamma_end);
    c.gamma_rate   = j.value("gamma_rate", d.gamma_rate);
    c.cadence      = j.value("cadence", d.cadence);
    c.ic           = j.value("ic", d.ic);
    c.ic_peak      = j.value("ic_peak", d.ic_peak);
    c.noise_amp_U  = j.value("noise_amp_U", d.noise_amp_U);
    c.noise_amp_V  = j.value("noise_amp_V", d.noise_amp_V);
    c.seed         = j.value("seed", d.seed);
    c.affine       = j.value("affine", d.affine);
    c.series_every = j.value("series_every", d.series_every);
    c.critical_m   = j.value("critical_m", d.critical_m);
    c.critical_n   = j.value("critical_n", d.critical_n);
    c.qp_modes     = j.value("qp_modes", d.qp_modes);
    c.snapshot_gammas =
        j.value("snapshot_gammas", d.snapshot_gammas);
    c.validate();
}

// ----------------------------------------------------------------------------
// SurfaceField: one snapshot of the deviation on the chart grid.
// ----------------------------------------------------------------------------
struct SurfaceField {
    int nw = 0, nphi = 0;
    double gamma = 0.0, tau = 0.0, epsilon = 0.0;
    std::vector<double> U, V; ///< row-major (i * nphi + j)

    std::size_t cells() const { return std::size_t(nw) * nphi; }
};

/// Text snapshot: one JSON header line, then one "U V" pair per cell.
inline void write_snapshot(const std::string& path, const SurfaceField& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
    nlohmann::json h{{"nw", f.nw},
                     {"nphi", f.nphi},
                     {"gamma", f.gamma},
                     {"tau", f.tau},
                     {"epsilon", f.epsilon}};
    out << h.dump() << "\n";
    for (std::size_t c = 0; c < f.cells(); ++c)
        out << format_g17(f.U[c]) << " " << format_g17(f.V[c]) << "\n";
    if (!out) throw std::runtime_error("write_snapshot: write failed " + path);
}

inline SurfaceField read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
    std::string header;
    std::getline(in, header);
    const auto h = nlohmann::json::parse(header);
    SurfaceField f;
    f.nw      = h.at("nw").get<int>();
    f.nphi    = h.at("nphi").get<int>();
    f.gamma   = h.at("gamma").get<double>();
    f.tau     = h.at("tau").get<double>();
    f.epsilon = h.at("epsilon").get<double>();
    f.U.resize(f.cells());
    f.V.resize(f.cells());
    for (std::size_t c = 0; c < f.cells(); ++c) {
        if (!(in >> f.U[c] >> f.V[c]))
            throw std::runtime_error("read_snapshot: truncated data in " + path);
    }
    return f;
}

// ----------------------------------------------------------------------------
// Simulator
// ----------------------------------------------------------------------------
class Simulator {
  public:
    Simulator(const SimConfig& cfg, const Kinetics& kin, const Calibration& cal)
        : cfg_(cfg), kin_(kin), cal_(cal) {
        cfg_.validate();
        nw_   = cfg_.nw;
        nphi_ = cfg_.nphi;
        nk_   = nphi_ / 2 + 1;
        dw_   = 1.0 / nw_;
        U_.assign(cells(), 0.0);
        V_.assign(cells(), 0.0);

        real_ = fftw_alloc_real(cells());
        spec_ = fftw_alloc_complex(std::size_t(nw_) * nk_);
        {
            int n = nphi_;
            fwd_ = fftw_plan_many_dft_r2c(1, &n, nw_, real_, nullptr, 1, nphi_,
                                          spec_, nullptr, 1, nk_, FFTW_ESTIMATE);
            bwd_ = fftw_plan_many_dft_c2r(1, &n, nw_, spec_, nullptr, 1, nk_,
                                          real_, nullptr, 1, nphi_, FFTW_ESTIMATE);
        }
        if (!fwd_ || !bwd_) throw std::runtime_error("Simulator: FFT plan failed");

        base_sub_.resize(nw_);
        base_sup_.resize(nw_);
        base_diag_.resize(nw_);
        kfac_.resize(nw_);
        cw_.resize(nw_);
        Qw_.resize(nw_);
        k1a_.resize(nw_);
        k1b_.resize(nw_);
        X01_.resize(nw_);
        Y01_.resize(nw_);
        phiC_.resize(nw_);
        scratch_a_.resize(nw_);
        scratch_b_.resize(nw_);

        refresh_geometry(cfg_.gamma0);
        apply_ic();
    }

    ~Simulator() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    Simulator(const Simulator&)            = delete;
    Simulator& operator=(const Simulator&) = delete;

    // --- basic accessors -------------------------------------------------------
    std::size_t cells() const { return std::size_t(nw_) * nphi_; }
    double w_center(int i) const { return (i + 0.5) * dw_; }
    double phi_of(int j) const { return 2.0 * M_PI * j / nphi_; }
    double time() const { return t_; }
    double gamma_now() const { return gamma_cur_; }
    double mode_peak_hat() const { return M_hat_cur_; }
    const std::vector<double>& U() const { return U_; }
    const std::vector<double>& V() const { return V_; }
    const std::vector<double>& conformal() const { return cw_; }
    const std::vector<double>& dilution() const { return Qw_; }

    void set_state(std::span<const double> u, std::span<const double> v) {
        if (u.size() != cells() || v.size() != cells())
            throw std::invalid_argument("set_state: size mismatch");
        std::copy(u.begin(), u.end(), U_.begin());
        std::copy(v.begin(), v.end(), V_.begin());
    }

    SurfaceField field() const {
        SurfaceField f;
        f.nw      = nw_;
        f.nphi    = nphi_;
        f.gamma   = gamma_of_t(); // instantaneous sweep position
        f.tau     = cfg_.epsilon * t_;
        f.epsilon = cfg_.epsilon;
        f.U       = U_;
        f.V       = V_;
        return f;
    }

    // --- initial conditions ------------------------------------------------------

    /// Critical-mode IC: U proportional to Phi with exact grid peak `peak`,
    /// V locked to the mode eigenvector ratio u0_y / u0_x.
    void eigenmode_ic(double peak) {
        const double lambda = boundary_degree(cfg_.critical_m, cfg_.critical_n,
                                              gamma_cur_);
        const double mu  = cap_eigenvalue(lambda, gamma_cur_, 1.0);
        const double sig = kin_.sigma_max(mu);
        const Vec2 u0    = kin_.right_vector(mu, sig);
        const double vr  = u0[1] / u0[0];

        double best = 0.0;
        for (int i = 0; i < nw_; ++i) {
            const double p = phiC_[i];
            for (int j = 0; j < nphi_; ++j) {
                const double v = p * std::cos(cfg_.critical_m * phi_of(j));
                if (v > best) best = v;
            }
        }
        if (best == 0.0) throw std::runtime_error("eigenmode_ic: degenerate profile");
        const double scale = peak / best;
        for (int i = 0; i < nw_; ++i) {
            for (int j = 0; j < nphi_; ++j) {
                const double v = scale * phiC_[i] * std::cos(cfg_.critical_m * phi_of(j));
                U_[idx(i, j)] = v;
                V_[idx(i, j)] = vr * v;
            }
        }
    }

    /// Independent uniform noise per cell and component.
    void noise_ic(double amp_U, double amp_V, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dU(-amp_U, amp_U), dV(-amp_V, amp_V);
        for (std::size_t c = 0; c < cells(); ++c) U_[c] = dU(rng);
        for (std::size_t c = 0; c < cells(); ++c) V_[c] = dV(rng);
    }

    // --- geometry refresh ---------------------------------------------------------

    /// Recompute every gamma-dependent coefficient array.  With epsilon = 0
    /// this is called with the identical gamma and reproduces identical
    /// arrays bit for bit.
    void refresh_geometry(double gamma) {
        gamma_cur_ = gamma;
        const CapGeometry geom(gamma, 1.0);
        const QuasiPatternless qp(geom, kin_, cfg_.gamma_rate, cfg_.qp_modes);
        const double lambda = boundary_degree(cfg_.critical_m, cfg_.critical_n, gamma);
        M_hat_cur_ = cal_.calibrate_peak(
            max_abs_ferrers(cfg_.critical_m, lambda, geom.s(), 1.0, 2001));

        for (int i = 0; i < nw_; ++i) {
            const double w    = w_center(i);
            const double zeta = geom.zeta_of_w(w);
            cw_[i]            = geom.conformal_factor(w);
            Qw_[i]            = geom.dilution_Q_w(w);
            const Mat2 K1     = qp.jacobian_shift(zeta);
            k1a_[i]           = K1[0][0];
            k1b_[i]           = K1[0][1];
            const Vec2 c01    = qp.correction(zeta);
            X01_[i]           = c01[0];
            Y01_[i]           = c01[1];
            phiC_[i]          = ferrers_p(cfg_.critical_m, lambda, zeta);

            const double wf_w = i * dw_;       // west face
            const double wf_e = (i + 1) * dw_; // east face
            base_sub_[i]      = cw_[i] * wf_w / (w * dw_ * dw_);
            if (i + 1 < nw_) {
                base_sup_[i]  = cw_[i] * wf_e / (w * dw_ * dw_);
                base_diag_[i] = base_sub_[i] + base_sup_[i];
            } else {
                base_sup_[i]  = 0.0;
                // Rim ghost sits half a spacing away: doubled face gradient.
                base_diag_[i] = base_sub_[i] + 2.0 * cw_[i] * wf_e / (w * dw_ * dw_);
            }
            kfac_[i] = cw_[i] / (w * w);
        }
        area_w_.resize(nw_);
        for (int i = 0; i < nw_; ++i)
            area_w_[i] = geom.area_weight(w_center(i)) * dw_ * (2.0 * M_PI / nphi_);
    }

    // --- operator application (for tests and diagnostics) ---------------------------

    /// Apply the full linear operator A(tau, eps) to (u, v): diffusion plus
    /// frozen-coefficient reaction, Jacobian shift, and dilution.
    void apply_operator(std::span<const double> u, std::span<const double> v,
                        std::span<double> out_u, std::span<double> out_v) {
        laplacian(u, out_u);
        laplacian(v, out_v);
        const double k1 = kin_.p.k1(), k2 = kin_.p.k2();
        const double k3 = kin_.p.k3(), k4 = kin_.p.k4();
        const double eps = cfg_.epsilon, gr = cfg_.gamma_rate;
        for (int i = 0; i < nw_; ++i) {
            const double dil = eps * gr * Qw_[i];
            for (int j = 0; j < nphi_; ++j) {
                const std::size_t c = idx(i, j);
                const double shift  = eps * (k1a_[i] * u[c] + k1b_[i] * v[c]);
                const double du = kin_.p.DX * out_u[c] + k1 * u[c] + k2 * v[c] +
                                  shift - dil * u[c];
                const double dv = kin_.p.DY * out_v[c] + k3 * u[c] + k4 * v[c] -
                                  shift - dil * v[c];
                out_u[c] = du;
                out_v[c] = dv;
            }
        }
    }

    /// Discrete c(w) Delta_disk applied through the FFT/stencil path.
    void laplacian(std::span<const double> f, std::span<double> out) {
        if (f.size() != cells() || out.size() != cells())
            throw std::invalid_argument("laplacian: size mismatch");
        std::copy(f.begin(), f.end(), real_);
        fftw_execute(fwd_);
        for (int k = 0; k < nk_; ++k) {
            const double kk = double(k) * k;
            // rows: spec_[i * nk_ + k]
            for (int part = 0; part < 2; ++part) {
                double prev = 0.0;
                for (int i = 0; i < nw_; ++i) {
                    scratch_a_[i] = spec_[std::size_t(i) * nk_ + k][part];
                }
                for (int i = 0; i < nw_; ++i) {
                    const double here = scratch_a_[i];
                    const double next = (i + 1 < nw_) ? scratch_a_[i + 1] : 0.0;
                    scratch_b_[i] = base_sub_[i] * prev + base_sup_[i] * next -
                                    (base_diag_[i] + kk * kfac_[i]) * here;
                    prev = here;
                }
                for (int i = 0; i < nw_; ++i)
                    spec_[std::size_t(i) * nk_ + k][part] = scratch_b_[i];
            }
        }
        fftw_execute(bwd_);
        const double inv = 1.0 / nphi_;
        for (std::size_t c = 0; c < cells(); ++c) out[c] = real_[c] * inv;
    }

    // --- stepping ---------------------------------------------------------------

    /// One IMEX step (explicit reaction/dilution, implicit diffusion).
    void step() {
        if (step_count_ % cfg_.cadence == 0 && step_count_ > 0)
            refresh_geometry(cfg_.gamma0 +
                             cfg_.gamma_rate * cfg_.epsilon * t_);
        explicit_stage();
        implicit_diffusion(U_, kin_.p.DX);
        implicit_diffusion(V_, kin_.p.DY);
        t_ += cfg_.dt;
        ++step_count_;
    }

    // --- projection and extraction -------------------------------------------------

    /// Discrete projection coefficients of the activator deviation onto the
    /// Dirichlet mode (m, n) at the current geometry: returns (cos, sin)
    /// coefficients of the raw profile P^m_lambda.
    std::array<double, 2> project_mode(int m, int n) const {
        const double lambda = boundary_degree(m, n, gamma_cur_);
        const CapGeometry geom(gamma_cur_, 1.0);
        std::vector<double> prof(nw_);
        double nrm_r = 0.0;
        for (int i = 0; i < nw_; ++i) {
            prof[i] = ferrers_p(m, lambda, geom.zeta_of_w(w_center(i)));
            nrm_r += prof[i] * prof[i] * area_w_[i];
        }
        double num_c = 0.0, num_s = 0.0, nrm_c = 0.0, nrm_s = 0.0;
        for (int j = 0; j < nphi_; ++j) {
            const double cj = std::cos(m * phi_of(j));
            const double sj = std::sin(m * phi_of(j));
            nrm_c += cj * cj;
            nrm_s += sj * sj;
            for (int i = 0; i < nw_; ++i) {
                const double ua = U_[idx(i, j)] * prof[i] * area_w_[i];
                num_c += ua * cj;
                num_s += ua * sj;
            }
        }
        const double ac = num_c / (nrm_r * nrm_c);
        const double as = (m == 0) ? 0.0 : num_s / (nrm_r * nrm_s);
        return {ac, as};
    }

    /// Projection magnitude sqrt(cos^2 + sin^2) (phase-invariant).
    double project_magnitude(int m, int n) const {
        const auto a = project_mode(m, n);
        return std::hypot(a[0], a[1]);
    }

    /// Calibrated normal-form amplitude carried by the critical mode.  Uses
    /// the cached critical-mode profile (refreshed with the geometry), so it
    /// is cheap enough to sample every few steps during a sweep.
    double extract_x() const {
        const int m = cfg_.critical_m;
        double nrm_r = 0.0;
        for (int i = 0; i < nw_; ++i)
            nrm_r += phiC_[i] * phiC_[i] * area_w_[i];
        double num_c = 0.0, num_s = 0.0, nrm_c = 0.0, nrm_s = 0.0;
        for (int j = 0; j < nphi_; ++j) {
            const double cj = std::cos(m * phi_of(j));
            const double sj = std::sin(m * phi_of(j));
            nrm_c += cj * cj;
            nrm_s += sj * sj;
            double row_c = 0.0;
            for (int i = 0; i < nw_; ++i)
                row_c += U_[idx(i, j)] * phiC_[i] * area_w_[i];
            num_c += row_c * cj;
            num_s += row_c * sj;
        }
        const double ac = num_c / (nrm_r * nrm_c);
        const double as = (m == 0) ? 0.0 : num_s / (nrm_r * nrm_s);
        return std::hypot(ac, as) * cal_.scale / kin_.p.k2();
    }

    // --- full sweep ----------------------------------------------------------------

    struct Series {
        std::vector<double> t, gamma, x;
    };

    struct RunResult {
        Series series;
        std::vector<SurfaceField> snapshots;
    };

    RunResult run() {
        RunResult res;
        const double tf = cfg_.t_final();
        const long nsteps = std::lround(tf / cfg_.dt);
        std::vector<double> want = cfg_.snapshot_gammas;
        std::sort(want.begin(), want.end(), std::greater<>()); // sweep descends
        std::size_t wi = 0;
        auto record = [&] {
            res.series.t.push_back(t_);
            res.series.gamma.push_back(gamma_of_t());
            res.series.x.push_back(extract_x());
        };
        record();
        for (long s = 0; s < nsteps; ++s) {
            step();
            if (step_count_ % cfg_.series_every == 0) record();
            while (wi < want.size() && gamma_of_t() <= want[wi]) {
                res.snapshots.push_back(field());
                ++wi;
            }
        }
        if (res.series.t.empty() || res.series.t.back() != t_) record();
        res.snapshots.push_back(field());
        return res;
    }

    double gamma_of_t() const {
        return cfg_.gamma0 + cfg_.gamma_rate * cfg_.epsilon * t_;
    }

    const SimConfig& config() const { return cfg_; }

  private:
    std::size_t idx(int i, int j) const { return std::size_t(i) * nphi_ + j; }

    void apply_ic() {
        if (cfg_.ic == "eigenmode")
            eigenmode_ic(cfg_.ic_peak);
        else if (cfg_.ic == "noise")
            noise_ic(cfg_.noise_amp_U, cfg_.noise_amp_V, cfg_.seed);
        // "zero": state already cleared
    }

    void explicit_stage() {
        const double k1 = kin_.p.k1(), k2 = kin_.p.k2();
        const double k3 = kin_.p.k3(), k4 = kin_.p.k4();
        const double bq = kin_.p.bq(), cq = kin_.p.cq(), cc = kin_.p.c;
        const double eps = cfg_.epsilon, gr = cfg_.gamma_rate, dt = cfg_.dt;
        const double X00 = kin_.p.X00(), Y00 = kin_.p.Y00();
        for (int i = 0; i < nw_; ++i) {
            const double dil = eps * gr * Qw_[i];
            const double bqe = bq + eps * cc * Y01_[i];
            const double cqe = cq + eps * cc * X01_[i];
            for (int j = 0; j < nphi_; ++j) {
                const std::size_t c = idx(i, j);
                const double u = U_[c], v = V_[c];
                const double shift = eps * (k1a_[i] * u + k1b_[i] * v);
                double ru, rv;
                if (cfg_.affine) {
                    ru = k1 * u + k2 * v + shift - dil * (u + X00);
                    rv = k3 * u + k4 * v - shift - dil * (v + Y00);
                } else {
                    const double nl =
                        bqe * u * u + cqe * 2.0 * u * v + cc * u * u * v;
                    ru = k1 * u + k2 * v + shift - dil * u + nl;
                    rv = k3 * u + k4 * v - shift - dil * v - nl;
                }
                U_[c] = u + dt * ru;
                V_[c] = v + dt * rv;
            }
        }
    }

    /// Backward-Euler diffusion solve: (I - dt D c(w) Delta_disk) F = F_in.
    void implicit_diffusion(std::vector<double>& F, double D) {
        const double beta = cfg_.dt * D;
        std::copy(F.begin(), F.end(), real_);
        fftw_execute(fwd_);
        for (int k = 0; k < nk_; ++k) {
            const double kk = double(k) * k;
            for (int part = 0; part < 2; ++part) {
                // Thomas sweep for this Fourier mode and component.
                double* cp = scratch_a_.data();
                double* dp = scratch_b_.data();
                double bprev =
                    1.0 + beta * (base_diag_[0] + kk * kfac_[0]);
                cp[0] = -beta * base_sup_[0] / bprev;
                dp[0] = spec_[0 * std::size_t(nk_) + k][part] / bprev;
                for (int i = 1; i < nw_; ++i) {
                    const double ai = -beta * base_sub_[i];
                    const double bi =
                        1.0 + beta * (base_diag_[i] + kk * kfac_[i]);
                    const double ci   = -beta * base_sup_[i];
                    const double den  = bi - ai * cp[i - 1];
                    cp[i]             = ci / den;
                    const double rhsi = spec_[std::size_t(i) * nk_ + k][part];
                    dp[i]             = (rhsi - ai * dp[i - 1]) / den;
                }
                double xi = dp[nw_ - 1];
                spec_[std::size_t(nw_ - 1) * nk_ + k][part] = xi;
                for (int i = nw_ - 2; i >= 0; --i) {
                    xi = dp[i] - cp[i] * xi;
                    spec_[std::size_t(i) * nk_ + k][part] = xi;
                }
            }
        }
        fftw_execute(bwd_);
        const double inv = 1.0 / nphi_;
        for (std::size_t c = 0; c < cells(); ++c) F[c] = real_[c] * inv;
    }

    SimConfig cfg_;
    Kinetics kin_;
    Calibration cal_;

    int nw_ = 0, nphi_ = 0, nk_ = 0;
    double dw_ = 0.0;
    double t_  = 0.0;
    long step_count_ = 0;
    double gamma_cur_ = 0.0, M_hat_cur_ = 0.0;

    std::vector<double> U_, V_;
    std::vector<double> cw_, Qw_, k1a_, k1b_, X01_, Y01_, phiC_, area_w_;
    std::vector<double> base_sub_, base_sup_, base_diag_, kfac_;
    std::vector<double> scratch_a_, scratch_b_;

    double* real_       = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

} // namespace slowcap
