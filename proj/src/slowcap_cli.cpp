// slowcap command-line front end.
//
// Subcommands:
//   curves   marginal stability curves A_mn(gamma) per mode
//   eigen    boundary degrees and eigenvalues of modes over a gamma range
//   qp       quasi-patternless correction: coefficients and radial profile
//   nfcoef   reduced (normal-form) coefficient table over gamma
//   nf       slow-passage normal-form trajectories and pitchfork branch
//   sim      full PDE sweep on the evolving cap (presets fig5..fig8)
//   project  modal projection table of a stored snapshot
//   converge grid-refinement study with fitted convergence orders
//
// Config precedence: command-line flags override --config JSON entries,
// which override built-in defaults.  Every command writes its artifacts
// plus a manifest (named <command>_manifest.json, written last) into the
// output directory.  Identical config and seed give byte-identical CSVs.
//
// Exit codes: 0 success, 2 argument/validation error, 3 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "slowcap/converge.hpp"
#include "slowcap/csvio.hpp"
#include "slowcap/geometry.hpp"
#include "slowcap/kinetics.hpp"
#include "slowcap/manifest.hpp"
#include "slowcap/nf.hpp"
#include "slowcap/params.hpp"
#include "slowcap/quasipattern.hpp"
#include "slowcap/reduction.hpp"
#include "slowcap/simulator.hpp"
#include "slowcap/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slowcap;

namespace {

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

struct Common {
    std::string out_dir = "out";
    std::string config_path;
    json cfg = json::object();

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--config", config_path, "JSON config file");
    }

    /// Load the JSON config (if any).  Must run before merge().
    void load() {
        if (config_path.empty()) return;
        std::ifstream in(config_path);
        if (!in)
            throw std::invalid_argument("cannot open config file: " + config_path);
        in >> cfg;
        if (cfg.contains("out")) out_dir = cfg.at("out").get<std::string>();
    }

    /// Flags beat JSON beats defaults: pull `key` from the config only when
    /// the corresponding flag was not given.
    template <class T>
    void merge(const CLI::App* cmd, const std::string& flag,
               const std::string& key, T& var) const {
        if (cmd->count(flag) == 0 && cfg.contains(key))
            var = cfg.at(key).get<T>();
    }

    fs::path prepare() const {
        fs::path dir(out_dir);
        fs::create_directories(dir);
        return dir;
    }
};

std::pair<int, int> parse_mode(const std::string& s) {
    int m = -1, n = -1;
    char extra;
    if (std::sscanf(s.c_str(), "%d,%d%c", &m, &n, &extra) != 2 || m < 0 || n < 1)
        throw std::invalid_argument("bad --mode '" + s +
                                    "' (expected m,n with m >= 0, n >= 1)");
    return {m, n};
}

std::pair<int, int> parse_grid(const std::string& s) {
    int nw = 0, nphi = 0;
    char extra;
    if (std::sscanf(s.c_str(), "%d,%d%c", &nw, &nphi, &extra) != 2)
        throw std::invalid_argument("bad --grid '" + s + "' (expected Nw,Nphi)");
    return {nw, nphi};
}

std::string eps_tag(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0e", eps);
    return buf;
}

std::string gamma_tag(double gamma) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", gamma);
    return buf;
}

const Kinetics& kinetics() {
    static Kinetics k{ModelParams{}};
    return k;
}

const Calibration& calibration() {
    static Calibration c = make_calibration(kinetics());
    return c;
}

// ---------------------------------------------------------------------------
// curves
// ---------------------------------------------------------------------------

struct CurvesOpts {
    double gamma_lo = 0.3, gamma_hi = 0.8;
    int samples = 201;
    std::vector<std::string> modes; // "m,n"
};

int cmd_curves(const Common& com, const CLI::App* cmd, CurvesOpts o) {
    com.merge(cmd, "--gamma0", "gamma0", o.gamma_lo);
    com.merge(cmd, "--gamma-end", "gamma_end", o.gamma_hi);
    com.merge(cmd, "--samples", "samples", o.samples);
    com.merge(cmd, "--mode", "modes", o.modes);
    if (o.modes.empty()) {
        // Explicitly cleared mode list is a usage error; absent means default.
        if (cmd->count("--mode") > 0 || com.cfg.contains("modes"))
            throw std::invalid_argument("curves: mode list is empty");
        o.modes = {"0,3", "1,3", "2,2", "3,2", "5,1", "6,1"};
    }
    if (o.samples < 2) throw std::invalid_argument("--samples must be >= 2");
    const double lo = std::min(o.gamma_lo, o.gamma_hi);
    const double hi = std::max(o.gamma_lo, o.gamma_hi);
    if (!(lo > 0.0 && hi <= 1.0))
        throw std::invalid_argument("gamma range must lie in (0, 1]");

    const fs::path dir = com.prepare();
    RunManifest man("curves",
                    json{{"gamma_lo", lo},
                         {"gamma_hi", hi},
                         {"samples", o.samples},
                         {"modes", o.modes}});
    const Kinetics& kin = kinetics();
    for (const auto& ms : o.modes) {
        const auto [m, n] = parse_mode(ms);
        std::vector<double> gs, as;
        for (int i = 0; i < o.samples; ++i) {
            const double g = lo + (hi - lo) * i / (o.samples - 1);
            const double lambda = boundary_degree(m, n, g);
            const double mu     = cap_eigenvalue(lambda, g, kin.p.radius);
            // Modes with no onset at this gamma are skipped, not fatal.
            if (const auto A = kin.marginal_A(mu)) {
                gs.push_back(g);
                as.push_back(*A);
            }
        }
        const auto path =
            dir / ("curve_m" + std::to_string(m) + "_n" + std::to_string(n) +
                   ".csv");
        write_csv(path.string(), {"gamma", "A"}, {gs, as});
        man.note_output(path.string());
        std::printf("curves: mode (%d,%d) -> %zu rows\n", m, n, gs.size());
    }
    man.write((dir / "curves_manifest.json").string());
    return 0;
}

// ---------------------------------------------------------------------------
// eigen
// ---------------------------------------------------------------------------

struct EigenOpts {
    double gamma_lo = 0.3, gamma_hi = 0.8;
    int samples = 101;
    std::vector<std::string> modes;
};

int cmd_eigen(const Common& com, const CLI::App* cmd, EigenOpts o) {
    com.merge(cmd, "--gamma0", "gamma0", o.gamma_lo);
    com.merge(cmd, "--gamma-end", "gamma_end", o.gamma_hi);
    com.merge(cmd, "--samples", "samples", o.samples);
    com.merge(cmd, "--mode", "modes", o.modes);
    if (o.modes.empty()) o.modes = {"5,1"};
    if (o.samples < 2) throw std::invalid_argument("--samples must be >= 2");
    const double lo = std::min(o.gamma_lo, o.gamma_hi);
    const double hi = std::max(o.gamma_lo, o.gamma_hi);
    if (!(lo > 0.0 && hi <= 1.0))
        throw std::invalid_argument("gamma range must lie in (0, 1]");

    const fs::path dir = com.prepare();
    RunManifest man("eigen",
                    json{{"gamma_lo", lo},
                         {"gamma_hi", hi},
                         {"samples", o.samples},
                         {"modes", o.modes}});
    for (const auto& ms : o.modes) {
        const auto [m, n] = parse_mode(ms);
        std::vector<double> gs(o.samples), ls(o.samples), mus(o.samples);
        for (int i = 0; i < o.samples; ++i) {
            const double g = lo + (hi - lo) * i / (o.samples - 1);
            gs[i]  = g;
            ls[i]  = boundary_degree(m, n, g);
            mus[i] = cap_eigenvalue(ls[i], g, 1.0);
        }
        const auto path =
            dir / ("eigen_m" + std::to_string(m) + "_n" + std::to_string(n) +
                   ".csv");
        write_csv(path.string(), {"gamma", "lambda", "mu"}, {gs, ls, mus});
        man.note_output(path.string());
    }
    man.write((dir / "eigen_manifest.json").string());
    return 0;
}

// ---------------------------------------------------------------------------
// qp
// ---------------------------------------------------------------------------

struct QpOpts {
    double gamma0 = 0.4915;
    double rate   = -1.0;
    int n_modes   = 5;
    int samples   = 201; // radial profile samples
};

int cmd_qp(const Common& com, const CLI::App* cmd, QpOpts o) {
    com.merge(cmd, "--gamma0", "gamma0", o.gamma0);
    com.merge(cmd, "--rate", "rate", o.rate);
    com.merge(cmd, "--modes", "modes", o.n_modes);
    com.merge(cmd, "--samples", "samples", o.samples);
    if (o.samples < 2) throw std::invalid_argument("--samples must be >= 2");
    if (o.n_modes < 1) throw std::invalid_argument("--modes must be >= 1");

    const fs::path dir = com.prepare();
    RunManifest man("qp", json{{"gamma0", o.gamma0},
                               {"rate", o.rate},
                               {"modes", o.n_modes},
                               {"samples", o.samples}});
    const CapGeometry geom(o.gamma0, 1.0);
    const QuasiPatternless qp(geom, kinetics(), o.rate, o.n_modes);

    {
        std::vector<double> ns, ls, mus, qs, als, bes;
        for (int n = 0; n < o.n_modes; ++n) {
            ns.push_back(n + 1);
            ls.push_back(qp.lambda[n]);
            mus.push_back(qp.mu[n]);
            qs.push_back(qp.q[n]);
            als.push_back(qp.alpha[n]);
            bes.push_back(qp.beta[n]);
        }
        const auto path = dir / "qp_coeffs.csv";
        write_csv(path.string(), {"n", "lambda", "mu", "q", "alpha", "beta"},
                  {ns, ls, mus, qs, als, bes});
        man.note_output(path.string());
    }
    {
        std::vector<double> ws(o.samples), zs(o.samples), xs(o.samples),
            ys(o.samples);
        for (int i = 0; i < o.samples; ++i) {
            const double w = double(i) / (o.samples - 1);
            ws[i]          = w;
            zs[i]          = geom.zeta_of_w(w);
            const Vec2 c   = qp.correction(zs[i]);
            xs[i]          = c[0];
            ys[i]          = c[1];
        }
        const auto path = dir / "qp_profile.csv";
        write_csv(path.string(), {"w", "zeta", "X01", "Y01"},
                  {ws, zs, xs, ys});
        man.note_output(path.string());
    }
    man.write((dir / "qp_manifest.json").string());
    return 0;
}

// ---------------------------------------------------------------------------
// nfcoef
// ---------------------------------------------------------------------------

struct NfcoefOpts {
    double gamma_lo = 0.4415, gamma_hi = 0.52;
    int samples = 36;
    double rate = -1.0;
};

int cmd_nfcoef(const Common& com, const CLI::App* cmd, NfcoefOpts o) {
    com.merge(cmd, "--gamma0", "gamma0", o.gamma_lo);
    com.merge(cmd, "--gamma-end", "gamma_end", o.gamma_hi);
    com.merge(cmd, "--samples", "samples", o.samples);
    com.merge(cmd, "--rate", "rate", o.rate);
    if (o.samples < 2) throw std::invalid_argument("--samples must be >= 2");
    const double lo = std::min(o.gamma_lo, o.gamma_hi);
    const double hi = std::max(o.gamma_lo, o.gamma_hi);

    const fs::path dir = com.prepare();
    RunManifest man("nfcoef", json{{"gamma_lo", lo},
                                   {"gamma_hi", hi},
                                   {"samples", o.samples},
                                   {"rate", o.rate}});
    std::vector<double> gs(o.samples), s0(o.samples), s1(o.samples),
        cs(o.samples), ms(o.samples);
    for (int i = 0; i < o.samples; ++i) {
        const double g = lo + (hi - lo) * i / (o.samples - 1);
        const auto r   = reduce_at(g, kinetics(), calibration(), o.rate);
        gs[i] = g;
        s0[i] = r.sigma0;
        s1[i] = r.sigma1;
        cs[i] = r.C;
        ms[i] = r.M_hat;
    }
    const auto path = dir / "nfcoef.csv";
    write_csv(path.string(), {"gamma", "sigma0", "sigma1", "C", "M_hat"},
              {gs, s0, s1, cs, ms});
    man.note_output(path.string());
    man.write((dir / "nfcoef_manifest.json").string());
    return 0;
}

// ---------------------------------------------------------------------------
// nf
// ---------------------------------------------------------------------------

struct NfOpts {
    std::vector<double> epsilons; // default: the four-sweep
    double x0        = 2.305e-3;
    double gamma0    = 0.51;
    double gamma_end = 0.4515;
    int samples      = 36;
};

int cmd_nf(const Common& com, const CLI::App* cmd, NfOpts o) {
    com.merge(cmd, "--epsilon", "epsilon", o.epsilons);
    com.merge(cmd, "--x0", "x0", o.x0);
    com.merge(cmd, "--gamma0", "gamma0", o.gamma0);
    com.merge(cmd, "--gamma-end", "gamma_end", o.gamma_end);
    com.merge(cmd, "--samples", "samples", o.samples);
    if (o.epsilons.empty()) o.epsilons = {1e-6, 3e-7, 1e-7, 3e-8};
    if (o.samples < 4) throw std::invalid_argument("--samples must be >= 4");

    const fs::path dir = com.prepare();
    RunManifest man("nf", json{{"epsilon", o.epsilons},
                               {"x0", o.x0},
                               {"gamma0", o.gamma0},
                               {"gamma_end", o.gamma_end},
                               {"samples", o.samples}});
    const NfTable tab = NfTable::build(kinetics(), calibration(), 0.4415, 0.52,
                                       o.samples);

    json summary;
    for (double eps : o.epsilons) {
        NfSolveConfig cfg;
        cfg.epsilon   = eps; // validate() rejects eps <= 0
        cfg.x0        = o.x0;
        cfg.gamma0    = o.gamma0;
        cfg.gamma_end = o.gamma_end;
        cfg.validate();
        const auto traj = integrate_nf(tab, cfg);
        const auto path = dir / ("nf_eps_" + eps_tag(eps) + ".csv");
        write_csv(path.string(), {"t", "tau", "gamma", "x", "x_branch"},
                  {traj.t, traj.tau, traj.gamma, traj.x, traj.x_branch});
        man.note_output(path.string());

        const double g50    = gamma_at_half_branch(traj);
        const double endg   = traj.gamma.back();
        const double branch = pitchfork_branch(tab.eval_sigma0(endg),
                                               tab.eval_C(endg));
        summary[eps_tag(eps)] = {
            {"gamma_half_branch", g50},
            {"x_end", traj.x.back()},
            {"branch_end", branch},
            {"endpoint_rel_err", std::abs(traj.x.back() - branch) / branch}};
        std::printf("nf: eps=%s  gamma50=%.6f  endpoint err %.3f%%\n",
                    eps_tag(eps).c_str(), g50,
                    100 * std::abs(traj.x.back() - branch) / branch);
    }
    {
        const int npts = 401;
        std::vector<double> gs(npts), xb(npts);
        for (int i = 0; i < npts; ++i) {
            const double g =
                tab.gamma.front() +
                (tab.gamma.back() - tab.gamma.front()) * i / (npts - 1);
            gs[i] = g;
            xb[i] = pitchfork_branch(tab.eval_sigma0(g), tab.eval_C(g));
        }
        const auto path = dir / "branch.csv";
        write_csv(path.string(), {"gamma", "x_branch"}, {gs, xb});
        man.note_output(path.string());
    }
    if (o.samples != 36) {
        // Refinement report: the trajectory table against the default one.
        const NfTable tab36 =
            NfTable::build(kinetics(), calibration(), 0.4415, 0.52, 36);
        const int npts = 201;
        std::vector<double> gs(npts), d0(npts), d1(npts), dC(npts), dM(npts);
        for (int i = 0; i < npts; ++i) {
            const double g =
                tab.gamma.front() +
                (tab.gamma.back() - tab.gamma.front()) * i / (npts - 1);
            gs[i] = g;
            d0[i] = tab.eval_sigma0(g) - tab36.eval_sigma0(g);
            d1[i] = tab.eval_sigma1(g) - tab36.eval_sigma1(g);
            dC[i] = tab.eval_C(g) - tab36.eval_C(g);
            dM[i] = tab.eval_M_hat(g) - tab36.eval_M_hat(g);
        }
        const auto path = dir / "nf_refinement.csv";
        write_csv(path.string(),
                  {"gamma", "dsigma0", "dsigma1", "dC", "dM_hat"},
                  {gs, d0, d1, dC, dM});
        man.note_output(path.string());
        auto amax = [](const std::vector<double>& v) {
            double m = 0;
            for (double x : v) m = std::max(m, std::abs(x));
            return m;
        };
        summary["refinement"] = {{"samples", o.samples},
                                 {"max_dsigma0", amax(d0)},
                                 {"max_dsigma1", amax(d1)},
                                 {"max_dC", amax(dC)},
                                 {"max_dM_hat", amax(dM)}};
        std::printf("nf: refinement %d vs 36 samples: max|dsigma0|=%.3e "
                    "max|dC|=%.3e\n",
                    o.samples, amax(d0), amax(dC));
    }
    {
        const auto path = dir / "nf_summary.json";
        std::ofstream out(path);
        out << summary.dump(2) << "\n";
        man.note_output(path.string());
    }
    man.write((dir / "nf_manifest.json").string());
    return 0;
}

// ---------------------------------------------------------------------------
// sim / converge
// ---------------------------------------------------------------------------

struct SimOpts {
    SimConfig cfg;
    std::string preset;
    std::string grid; // "Nw,Nphi"
    double rate = -1.0;
};

void apply_preset(const std::string& preset, SimConfig& cfg) {
    if (preset.empty()) return;
    if (preset == "fig5") {
        cfg.epsilon   = 1e-6;
        cfg.gamma0    = 0.4915;
        cfg.gamma_end = 0.4515;
        cfg.ic        = "eigenmode";
        cfg.ic_peak   = 0.021;
        cfg.snapshot_gammas = {0.4815, 0.4715, 0.4615};
    } else if (preset == "fig6") {
        cfg.epsilon   = 1e-6;
        cfg.gamma0    = 0.5015;
        cfg.gamma_end = 0.4915;
        cfg.affine    = true;
        cfg.ic        = "zero";
    } else if (preset == "fig7") {
        cfg.epsilon   = 1e-6;
        cfg.gamma0    = 0.4915;
        cfg.gamma_end = 0.4315;
        cfg.ic        = "noise";
    } else if (preset == "fig8") {
        // base settings for the grid-refinement study; `sim` delegates this
        // preset to the convergence driver, `converge` uses it as its base
        cfg.epsilon   = 1e-6;
        cfg.gamma0    = 0.4915;
        cfg.gamma_end = 0.4515;
        cfg.ic        = "eigenmode";
        cfg.ic_peak   = 0.021;
    } else {
        throw std::invalid_argument("unknown preset '" + preset +
                                    "' (fig5|fig6|fig7|fig8)");
    }
}

void merge_sim_flags(const Common& com, const CLI::App* cmd, SimOpts& o) {
    // Layering, lowest to highest: built-in defaults, preset, JSON config,
    // explicit flags.  CLI11 has already written flag values into o.cfg, so
    // rebuild from a fresh default config and re-apply in order.
    if (cmd->count("--preset") == 0 && com.cfg.contains("preset"))
        o.preset = com.cfg.at("preset").get<std::string>();
    SimConfig merged;
    apply_preset(o.preset, merged);
    auto layer = [&](const char* flag, const char* key, auto& dst,
                     const auto& flagged) {
        if (com.cfg.contains(key))
            dst = com.cfg.at(key).get<std::remove_cvref_t<decltype(dst)>>();
        const CLI::Option* opt = cmd->get_option_no_throw(flag);
        if (opt != nullptr && opt->count() > 0) dst = flagged;
    };
    layer("--epsilon", "epsilon", merged.epsilon, o.cfg.epsilon);
    layer("--gamma0", "gamma0", merged.gamma0, o.cfg.gamma0);
    layer("--gamma-end", "gamma_end", merged.gamma_end, o.cfg.gamma_end);
    layer("--dt", "dt", merged.dt, o.cfg.dt);
    layer("--cadence", "cadence", merged.cadence, o.cfg.cadence);
    layer("--seed", "seed", merged.seed, o.cfg.seed);
    layer("--ic", "ic", merged.ic, o.cfg.ic);
    layer("--peak", "ic_peak", merged.ic_peak, o.cfg.ic_peak);
    layer("--series-every", "series_every", merged.series_every,
          o.cfg.series_every);
    layer("--snapshot", "snapshot_gammas", merged.snapshot_gammas,
          o.cfg.snapshot_gammas);
    layer("--affine", "affine", merged.affine, o.cfg.affine);
    layer("--rate", "gamma_rate", merged.gamma_rate, o.rate);
    // JSON-only knobs without dedicated flags.
    auto jget = [&](const char* key, auto& dst) {
        if (com.cfg.contains(key))
            dst = com.cfg.at(key).get<std::remove_cvref_t<decltype(dst)>>();
    };
    jget("nw", merged.nw);
    jget("nphi", merged.nphi);
    std::string grid;
    layer("--grid", "grid", grid, o.grid);
    if (!grid.empty()) {
        const auto [nw, nphi] = parse_grid(grid);
        merged.nw   = nw;
        merged.nphi = nphi;
    }
    jget("noise_amp_U", merged.noise_amp_U);
    jget("noise_amp_V", merged.noise_amp_V);
    jget("critical_m", merged.critical_m);
    jget("critical_n", merged.critical_n);
    jget("qp_modes", merged.qp_modes);
    o.cfg = merged;
    o.cfg.validate();
}

struct ConvergeOpts {
    SimOpts sim;
    std::vector<int> ladder = {32, 48, 64};
    int ref_nw              = 192;
};

int converge_core(const Common& com, const ConvergeOpts& o,
                  const std::string& cmd_name) {
    const fs::path dir = com.prepare();
    json cfgj          = o.sim.cfg;
    cfgj["preset"]     = o.sim.preset;
    cfgj["grids"]      = o.ladder;
    cfgj["ref_nw"]     = o.ref_nw;
    RunManifest man(cmd_name, cfgj);

    const auto r = run_convergence(o.sim.cfg, o.ladder, o.ref_nw, kinetics(),
                                   calibration());
    std::vector<double> nws(r.nw.begin(), r.nw.end());
    const auto path = dir / "convergence.csv";
    write_csv(path.string(), {"nw", "h", "err_l2", "err_linf", "x_end"},
              {nws, r.h, r.l2, r.linf, r.x_end});
    man.note_output(path.string());
    {
        json summary = {{"slope_l2", r.slope_l2},
                        {"slope_linf", r.slope_linf},
                        {"ref_nw", r.ref_nw},
                        {"ref_x_end", r.ref_x_end}};
        const auto spath = dir / "convergence_summary.json";
        std::ofstream out(spath);
        out << summary.dump(2) << "\n";
        man.note_output(spath.string());
    }
    std::printf("%s: fitted order L2 = %.3f, Linf = %.3f (ref nw=%d)\n",
                cmd_name.c_str(), r.slope_l2, r.slope_linf, r.ref_nw);
    man.write((dir / (cmd_name + "_manifest.json")).string());
    return 0;
}

int cmd_sim(const Common& com, const CLI::App* cmd, SimOpts o) {
    merge_sim_flags(com, cmd, o);
    if (o.preset == "fig8") {
        // Convergence-study preset: a refinement ladder, not a single run.
        ConvergeOpts vo;
        vo.sim = std::move(o);
        if (com.cfg.contains("grids"))
            vo.ladder = com.cfg.at("grids").get<std::vector<int>>();
        if (com.cfg.contains("ref_nw"))
            vo.ref_nw = com.cfg.at("ref_nw").get<int>();
        return converge_core(com, vo, "sim");
    }
    const fs::path dir = com.prepare();
    json cfgj          = o.cfg;
    cfgj["preset"]     = o.preset;
    RunManifest man("sim", cfgj);

    Simulator sim(o.cfg, kinetics(), calibration());
    const auto res = sim.run();

    {
        const auto path = dir / "sim_series.csv";
        write_csv(path.string(), {"t", "gamma", "x"},
                  {res.series.t, res.series.gamma, res.series.x});
        man.note_output(path.string());
    }
    for (const auto& f : res.snapshots) {
        const auto path =
            dir / ("sim_snapshot_g" + gamma_tag(f.gamma) + ".dat");
        write_snapshot(path.string(), f);
        man.note_output(path.string());
    }
    {
        const auto path = dir / "sim_config.json";
        std::ofstream out(path);
        out << cfgj.dump(2) << "\n";
        man.note_output(path.string());
    }

    if (o.cfg.affine && o.cfg.epsilon > 0.0) {
        // Overlay table: simulated deviation/epsilon against the analytic
        // 5-term correction profile at the final geometry.
        const double gT = res.snapshots.back().gamma;
        const CapGeometry geom(gT, 1.0);
        const QuasiPatternless qp(geom, kinetics(), o.cfg.gamma_rate,
                                  o.cfg.qp_modes);
        const auto& f = res.snapshots.back();
        std::vector<double> ws(o.cfg.nw), zs(o.cfg.nw), us(o.cfg.nw),
            xr(o.cfg.nw), vs(o.cfg.nw), yr(o.cfg.nw);
        double worst = 0.0, scale = 0.0;
        for (int i = 0; i < o.cfg.nw; ++i) {
            ws[i]        = (i + 0.5) / o.cfg.nw;
            zs[i]        = geom.zeta_of_w(ws[i]);
            us[i]        = f.U[std::size_t(i) * o.cfg.nphi] / o.cfg.epsilon;
            vs[i]        = f.V[std::size_t(i) * o.cfg.nphi] / o.cfg.epsilon;
            const Vec2 c = qp.correction(zs[i]);
            xr[i]        = c[0];
            yr[i]        = c[1];
            scale        = std::max(scale, std::abs(xr[i]));
        }
        for (int i = 0; i < o.cfg.nw; ++i)
            worst = std::max(worst, std::abs(us[i] - xr[i]) / scale);
        const auto path = dir / "qp_overlay.csv";
        write_csv(path.string(),
                  {"w", "zeta", "U_over_eps", "X01", "V_over_eps", "Y01"},
                  {ws, zs, us, xr, vs, yr});
        man.note_output(path.string());
        std::printf("sim: affine profile error vs 5-term correction: %.4f%% "
                    "of profile max\n",
                    100 * worst);
    }
    std::printf("sim: %zu series points, %zu snapshots, final x = %.6e at "
                "gamma = %.4f\n",
                res.series.t.size(), res.snapshots.size(), res.series.x.back(),
                res.snapshots.back().gamma);
    man.write((dir / "sim_manifest.json").string());
    return 0;
}

int cmd_converge(const Common& com, const CLI::App* cmd, ConvergeOpts o) {
    if (o.sim.preset.empty()) o.sim.preset = "fig8";
    merge_sim_flags(com, cmd, o.sim);
    if (cmd->count("--grids") == 0 && com.cfg.contains("grids"))
        o.ladder = com.cfg.at("grids").get<std::vector<int>>();
    if (cmd->count("--ref-nw") == 0 && com.cfg.contains("ref_nw"))
        o.ref_nw = com.cfg.at("ref_nw").get<int>();
    return converge_core(com, o, "converge");
}

// ---------------------------------------------------------------------------
// project
// ---------------------------------------------------------------------------

struct ProjectOpts {
    std::string input;
    int mmax = 8, nmax = 3;
};

int cmd_project(const Common& com, const CLI::App* cmd, ProjectOpts o) {
    com.merge(cmd, "--mmax", "mmax", o.mmax);
    com.merge(cmd, "--nmax", "nmax", o.nmax);
    com.merge(cmd, "input", "input", o.input);
    if (o.input.empty())
        throw std::invalid_argument("project: missing snapshot file argument");
    if (o.mmax < 0 || o.nmax < 1)
        throw std::invalid_argument("project: need mmax >= 0, nmax >= 1");

    const SurfaceField f = read_snapshot(o.input);
    SimConfig cfg;
    cfg.nw        = f.nw;
    cfg.nphi      = f.nphi;
    cfg.epsilon   = 0.0;
    cfg.gamma0    = f.gamma;
    cfg.gamma_end = f.gamma;
    cfg.ic        = "zero";
    Simulator sim(cfg, kinetics(), calibration());
    sim.set_state(f.U, f.V);

    const fs::path dir = com.prepare();
    RunManifest man("project", json{{"input", o.input},
                                    {"mmax", o.mmax},
                                    {"nmax", o.nmax},
                                    {"gamma", f.gamma}});
    const CapGeometry geom(f.gamma, 1.0);
    std::vector<double> ms, ns, ls, cc, ss, mag, peak;
    for (int m = 0; m <= o.mmax; ++m) {
        for (int n = 1; n <= o.nmax; ++n) {
            const double lambda = boundary_degree(m, n, f.gamma);
            const auto a        = sim.project_mode(m, n);
            const double pmax =
                max_abs_ferrers(m, lambda, geom.s(), 1.0, 2001);
            ms.push_back(m);
            ns.push_back(n);
            ls.push_back(lambda);
            cc.push_back(a[0]);
            ss.push_back(a[1]);
            mag.push_back(std::hypot(a[0], a[1]));
            peak.push_back(std::hypot(a[0], a[1]) * pmax);
        }
    }
    const auto path = dir / "projections.csv";
    write_csv(path.string(),
              {"m", "n", "lambda", "coeff_cos", "coeff_sin", "magnitude",
               "peak_amplitude"},
              {ms, ns, ls, cc, ss, mag, peak});
    man.note_output(path.string());
    std::printf("project: gamma=%.4f, calibrated critical amplitude x = %.6e\n",
                f.gamma, sim.extract_x());
    man.write((dir / "project_manifest.json").string());
    return 0;
}

} // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"slowcap: delayed pattern onset on a slowly flattening "
                 "spherical cap"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);

    Common com;

    auto* curves = app.add_subcommand(
        "curves", "marginal stability curves A_mn(gamma)");
    CurvesOpts co;
    com.attach(curves);
    curves->add_option("--gamma0", co.gamma_lo, "gamma range start");
    curves->add_option("--gamma-end", co.gamma_hi, "gamma range end");
    curves->add_option("--samples", co.samples, "rows per curve");
    curves->add_option("--mode", co.modes, "mode m,n (repeatable)");

    auto* eigen =
        app.add_subcommand("eigen", "boundary degrees and eigenvalues");
    EigenOpts eo;
    com.attach(eigen);
    eigen->add_option("--gamma0", eo.gamma_lo, "gamma range start");
    eigen->add_option("--gamma-end", eo.gamma_hi, "gamma range end");
    eigen->add_option("--samples", eo.samples, "rows per mode");
    eigen->add_option("--mode", eo.modes, "mode m,n (repeatable)");

    auto* qp = app.add_subcommand(
        "qp", "quasi-patternless correction coefficients and profile");
    QpOpts qo;
    com.attach(qp);
    qp->add_option("--gamma0", qo.gamma0, "cap curvature");
    qp->add_option("--rate", qo.rate, "d(gamma)/d(tau)");
    qp->add_option("--modes", qo.n_modes, "series truncation");
    qp->add_option("--samples", qo.samples, "profile samples");

    auto* nfcoef = app.add_subcommand(
        "nfcoef", "reduced coefficient table sigma0/sigma1/C/M_hat");
    NfcoefOpts fo;
    com.attach(nfcoef);
    nfcoef->add_option("--gamma0", fo.gamma_lo, "gamma range start");
    nfcoef->add_option("--gamma-end", fo.gamma_hi, "gamma range end");
    nfcoef->add_option("--samples", fo.samples, "table rows");
    nfcoef->add_option("--rate", fo.rate, "d(gamma)/d(tau)");

    auto* nf = app.add_subcommand(
        "nf", "slow-passage normal-form trajectories and branch");
    NfOpts no;
    com.attach(nf);
    nf->add_option("--epsilon", no.epsilons, "sweep rate(s) (repeatable)")
        ->delimiter(',');
    nf->add_option("--x0", no.x0, "initial amplitude");
    nf->add_option("--gamma0", no.gamma0, "sweep start");
    nf->add_option("--gamma-end", no.gamma_end, "sweep end");
    nf->add_option("--samples", no.samples, "coefficient table samples");

    auto* sim = app.add_subcommand("sim", "PDE sweep on the evolving cap");
    SimOpts so;
    com.attach(sim);
    sim->add_option("--preset", so.preset, "fig5|fig6|fig7|fig8");
    sim->add_option("--epsilon", so.cfg.epsilon, "sweep rate");
    sim->add_option("--gamma0", so.cfg.gamma0, "sweep start");
    sim->add_option("--gamma-end", so.cfg.gamma_end, "sweep end");
    sim->add_option("--grid", so.grid, "Nw,Nphi");
    sim->add_option("--dt", so.cfg.dt, "time step");
    sim->add_option("--cadence", so.cfg.cadence, "geometry refresh period");
    sim->add_option("--seed", so.cfg.seed, "noise IC seed");
    sim->add_option("--ic", so.cfg.ic, "eigenmode|noise|zero");
    sim->add_option("--peak", so.cfg.ic_peak, "eigenmode IC peak");
    sim->add_option("--rate", so.rate, "d(gamma)/d(tau)");
    sim->add_option("--series-every", so.cfg.series_every,
                    "amplitude sampling stride");
    sim->add_option("--snapshot", so.cfg.snapshot_gammas,
                    "snapshot gamma (repeatable)")
        ->delimiter(',');
    sim->add_flag("--affine", so.cfg.affine, "affine (probe) dynamics");

    auto* conv = app.add_subcommand(
        "converge", "grid-refinement study with fitted orders");
    ConvergeOpts vo;
    com.attach(conv);
    conv->add_option("--preset", vo.sim.preset, "base preset (default fig8)");
    conv->add_option("--epsilon", vo.sim.cfg.epsilon, "sweep rate");
    conv->add_option("--gamma0", vo.sim.cfg.gamma0, "sweep start");
    conv->add_option("--gamma-end", vo.sim.cfg.gamma_end, "sweep end");
    conv->add_option("--grid", vo.sim.grid, "Nw,Nphi (Nphi shared)");
    conv->add_option("--dt", vo.sim.cfg.dt, "time step");
    conv->add_option("--cadence", vo.sim.cfg.cadence,
                     "geometry refresh period");
    conv->add_option("--seed", vo.sim.cfg.seed, "noise IC seed");
    conv->add_option("--ic", vo.sim.cfg.ic, "eigenmode|noise|zero");
    conv->add_option("--peak", vo.sim.cfg.ic_peak, "eigenmode IC peak");
    conv->add_option("--rate", vo.sim.rate, "d(gamma)/d(tau)");
    conv->add_option("--series-every", vo.sim.cfg.series_every,
                     "amplitude sampling stride");
    conv->add_flag("--affine", vo.sim.cfg.affine, "affine (probe) dynamics");
    conv->add_option("--grids", vo.ladder, "ladder radial resolutions")
        ->delimiter(',');
    conv->add_option("--ref-nw", vo.ref_nw, "reference radial resolution");

    auto* proj =
        app.add_subcommand("project", "modal projection table of a snapshot");
    ProjectOpts po;
    com.attach(proj);
    proj->add_option("input", po.input, "snapshot file");
    proj->add_option("--mmax", po.mmax, "largest angular wavenumber");
    proj->add_option("--nmax", po.nmax, "largest radial index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        com.load();
        if (app.got_subcommand(curves)) return cmd_curves(com, curves, co);
        if (app.got_subcommand(eigen)) return cmd_eigen(com, eigen, eo);
        if (app.got_subcommand(qp)) return cmd_qp(com, qp, qo);
        if (app.got_subcommand(nfcoef)) return cmd_nfcoef(com, nfcoef, fo);
        if (app.got_subcommand(nf)) return cmd_nf(com, nf, no);
        if (app.got_subcommand(sim)) return cmd_sim(com, sim, so);
        if (app.got_subcommand(conv)) return cmd_converge(com, conv, vo);
        if (app.got_subcommand(proj)) return cmd_project(com, proj, po);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return 2; // no subcommand (unreachable with require_subcommand)
}
