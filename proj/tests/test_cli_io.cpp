// Integration tests for the command-line front end.
//
// These drive the installed binary (path injected via SLOWCAP_CLI_PATH)
// through fork/exec-free std::system calls and inspect the artifacts it
// writes: CSV layout, manifest contents, config precedence, exit codes,
// and byte-level determinism of repeated runs.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output; // combined stdout+stderr
};

fs::path fresh_dir(const std::string& stem) {
    static std::mt19937_64 rng(std::random_device{}());
    const fs::path dir = fs::temp_directory_path() /
                         (stem + "_" + std::to_string(rng()));
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args, const fs::path& scratch) {
    const fs::path log = scratch / "cli_log.txt";
    const std::string cmd =
        std::string(SLOWCAP_CLI_PATH) + " " + args + " > " + log.string() +
        " 2>&1";
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

TEST_CASE("curves: single mode reproduces the critical threshold",
          "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_curves");
    const auto r   = run_cli("curves --mode 5,1 --gamma0 0.5 --gamma-end 0.5 "
                             "--samples 2 --out " + dir.string(), dir);
    REQUIRE(r.exit_code == 0);

    const auto rows = read_csv(dir / "curve_m5_n1.csv");
    REQUIRE(rows.size() == 3); // header + 2 samples
    REQUIRE(rows[0] == std::vector<std::string>{"gamma", "A"});
    const double A = std::stod(rows[1][1]);
    CHECK_THAT(A, Catch::Matchers::WithinAbs(76.5198, 5e-4));
    // Values carry full round-trip precision.
    CHECK(rows[1][1].size() >= 17);
}

TEST_CASE("curves: default mode set writes six files", "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_curves6");
    const auto r   = run_cli("curves --samples 11 --out " + dir.string(), dir);
    REQUIRE(r.exit_code == 0);
    for (const char* f :
         {"curve_m0_n3.csv", "curve_m1_n3.csv", "curve_m2_n2.csv",
          "curve_m3_n2.csv", "curve_m5_n1.csv", "curve_m6_n1.csv"})
        CHECK(fs::exists(dir / f));
}

TEST_CASE("manifest lists outputs that all exist and is written last",
          "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_manifest");
    const auto r =
        run_cli("eigen --samples 5 --out " + dir.string(), dir);
    REQUIRE(r.exit_code == 0);

    const fs::path man_path = dir / "eigen_manifest.json";
    REQUIRE(fs::exists(man_path));
    const json man = json::parse(slurp(man_path));
    CHECK(man.at("command") == "eigen");
    CHECK(man.contains("config"));
    CHECK(man.contains("version"));
    REQUIRE(man.at("outputs").is_array());
    REQUIRE_FALSE(man.at("outputs").empty());
    for (const auto& out : man.at("outputs")) {
        const fs::path p = out.get<std::string>();
        CHECK(fs::exists(p));
        // nothing listed in the manifest is newer than the manifest itself
        CHECK(fs::last_write_time(p) <= fs::last_write_time(man_path));
    }
}

TEST_CASE("config precedence: flags beat JSON beats defaults", "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_prec");
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"samples": 7, "gamma0": 0.45, "gamma_end": 0.55})";
    }
    const auto r = run_cli("curves --mode 5,1 --samples 3 --config " +
                               (dir / "cfg.json").string() + " --out " +
                               dir.string(),
                           dir);
    REQUIRE(r.exit_code == 0);
    const auto rows = read_csv(dir / "curve_m5_n1.csv");
    REQUIRE(rows.size() == 4); // flag --samples 3 beats JSON's 7
    CHECK_THAT(std::stod(rows[1][0]),
               Catch::Matchers::WithinRel(0.45, 1e-12)); // JSON beats default
    CHECK_THAT(std::stod(rows[3][0]),
               Catch::Matchers::WithinRel(0.55, 1e-12));
}

TEST_CASE("exit codes: validation errors are 2, runtime failures 3",
          "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_exit");
    CHECK(run_cli("--help", dir).exit_code == 0);
    CHECK(run_cli("bogus-subcommand", dir).exit_code == 2);
    CHECK(run_cli("curves --mode notamode --out " + dir.string(), dir)
              .exit_code == 2);
    CHECK(run_cli("nf --epsilon 0 --out " + dir.string(), dir).exit_code ==
          2);
    CHECK(run_cli("sim --grid 3,8 --out " + dir.string(), dir).exit_code ==
          2); // radial resolution too small
    CHECK(run_cli("project /does/not/exist.dat --out " + dir.string(), dir)
              .exit_code == 3);
    {
        std::ofstream cfg(dir / "empty_modes.json");
        cfg << R"({"modes": []})";
    }
    CHECK(run_cli("curves --config " + (dir / "empty_modes.json").string() +
                      " --out " + dir.string(),
                  dir)
              .exit_code == 2);
}

TEST_CASE("sim determinism: identical config and seed give byte-identical "
          "CSVs",
          "[cli]") {
    const auto dir1 = fresh_dir("slowcap_cli_det1");
    const auto dir2 = fresh_dir("slowcap_cli_det2");
    const std::string base =
        "sim --epsilon 1e-5 --gamma0 0.4915 --gamma-end 0.4905 --grid 24,32 "
        "--ic noise --seed 4242 --out ";
    REQUIRE(run_cli(base + dir1.string(), dir1).exit_code == 0);
    REQUIRE(run_cli(base + dir2.string(), dir2).exit_code == 0);
    CHECK(slurp(dir1 / "sim_series.csv") == slurp(dir2 / "sim_series.csv"));
    CHECK(slurp(dir1 / "sim_snapshot_g0.4905.dat") ==
          slurp(dir2 / "sim_snapshot_g0.4905.dat"));

    // and a different seed actually changes the trajectory
    const auto dir3 = fresh_dir("slowcap_cli_det3");
    const std::string alt =
        "sim --epsilon 1e-5 --gamma0 0.4915 --gamma-end 0.4905 --grid 24,32 "
        "--ic noise --seed 4243 --out ";
    REQUIRE(run_cli(alt + dir3.string(), dir3).exit_code == 0);
    CHECK(slurp(dir1 / "sim_series.csv") != slurp(dir3 / "sim_series.csv"));
}

TEST_CASE("manifest config reproduces the run", "[cli]") {
    const auto dir1 = fresh_dir("slowcap_cli_repro1");
    const auto dir2 = fresh_dir("slowcap_cli_repro2");
    REQUIRE(run_cli("sim --epsilon 1e-5 --gamma0 0.4915 --gamma-end 0.4910 "
                    "--grid 16,16 --out " + dir1.string(), dir1)
                .exit_code == 0);
    // Re-run purely from the recorded config.
    const json man = json::parse(slurp(dir1 / "sim_manifest.json"));
    {
        std::ofstream cfg(dir2 / "replay.json");
        cfg << man.at("config").dump();
    }
    REQUIRE(run_cli("sim --config " + (dir2 / "replay.json").string() +
                        " --out " + dir2.string(),
                    dir2)
                .exit_code == 0);
    CHECK(slurp(dir1 / "sim_series.csv") == slurp(dir2 / "sim_series.csv"));
}

TEST_CASE("sim: the convergence preset runs the refinement ladder", "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_fig8");
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"grids": [6, 8, 12], "ref_nw": 24})";
    }
    const auto r = run_cli("sim --preset fig8 --grid 6,8 --gamma-end 0.4905 "
                           "--dt 0.05 --config " + (dir / "cfg.json").string() +
                           " --out " + dir.string(),
                           dir);
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "convergence.csv"));
    const auto rows = read_csv(dir / "convergence.csv");
    REQUIRE(rows[0] == std::vector<std::string>{"nw", "h", "err_l2",
                                                "err_linf", "x_end"});
    REQUIRE(rows.size() == 4); // header + one row per ladder grid
    const json sum = json::parse(slurp(dir / "convergence_summary.json"));
    CHECK(sum.contains("slope_l2"));
    CHECK(sum.at("ref_nw").get<int>() == 24);
    // the manifest is named for the command that actually ran
    const json man = json::parse(slurp(dir / "sim_manifest.json"));
    CHECK(man.at("config").at("preset") == "fig8");
}

TEST_CASE("nf: four-rate sweep writes trajectories, branch, and summary",
          "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_nf");
    const auto r   = run_cli("nf --samples 8 --out " + dir.string(), dir);
    REQUIRE(r.exit_code == 0);
    for (const char* f : {"nf_eps_1e-06.csv", "nf_eps_3e-07.csv",
                          "nf_eps_1e-07.csv", "nf_eps_3e-08.csv",
                          "branch.csv", "nf_summary.json"})
        CHECK(fs::exists(dir / f));
    const auto rows = read_csv(dir / "nf_eps_1e-06.csv");
    REQUIRE(rows[0] == std::vector<std::string>{"t", "tau", "gamma", "x",
                                                "x_branch"});
    // onset delay: gamma at half branch decreases as the sweep speeds up
    const json sum = json::parse(slurp(dir / "nf_summary.json"));
    const double g50_fast = sum.at("1e-06").at("gamma_half_branch");
    const double g50_slow = sum.at("3e-08").at("gamma_half_branch");
    CHECK(g50_fast < g50_slow);
}

TEST_CASE("nf: off-default table sampling adds a refinement report",
          "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_nfref");
    const auto r   = run_cli("nf --samples 12 --epsilon 1e-6 --out " +
                                 dir.string(),
                             dir);
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "nf_refinement.csv"));
    const auto rows = read_csv(dir / "nf_refinement.csv");
    REQUIRE(rows[0][0] == "gamma");
    REQUIRE(rows.size() > 100);
}

TEST_CASE("project: snapshot round-trip yields the modal table", "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_proj");
    REQUIRE(run_cli("sim --epsilon 1e-5 --gamma0 0.4915 --gamma-end 0.4905 "
                    "--grid 32,64 --out " + dir.string(), dir)
                .exit_code == 0);
    const auto r = run_cli("project " +
                               (dir / "sim_snapshot_g0.4905.dat").string() +
                               " --mmax 6 --nmax 2 --out " + dir.string(),
                           dir);
    REQUIRE(r.exit_code == 0);
    const auto rows = read_csv(dir / "projections.csv");
    REQUIRE(rows.size() == std::size_t(1 + 7 * 2));
    // The five-lobed critical mode dominates an eigenmode-seeded sweep.
    // Compare physical peak amplitudes (last column): raw coefficients of
    // high-wavenumber modes are deflated by their huge profile maxima.
    double best = 0, m_best = -1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double peak = std::stod(rows[i][6]);
        if (peak > best) {
            best   = peak;
            m_best = std::stod(rows[i][0]);
        }
    }
    CHECK(m_best == 5.0);
}

TEST_CASE("qp and nfcoef write their tables", "[cli]") {
    const auto dir = fresh_dir("slowcap_cli_tables");
    REQUIRE(run_cli("qp --gamma0 0.4915 --out " + dir.string(), dir)
                .exit_code == 0);
    const auto coeffs = read_csv(dir / "qp_coeffs.csv");
    REQUIRE(coeffs.size() == 6);
    CHECK_THAT(std::stod(coeffs[1][4]),
               Catch::Matchers::WithinRel(5.2800, 1e-3)); // alpha_1
    REQUIRE(run_cli("nfcoef --samples 5 --out " + dir.string(), dir)
                .exit_code == 0);
    const auto tab = read_csv(dir / "nfcoef.csv");
    REQUIRE(tab.size() == 6);
    REQUIRE(tab[0] == std::vector<std::string>{"gamma", "sigma0", "sigma1",
                                               "C", "M_hat"});
}
