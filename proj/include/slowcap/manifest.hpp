#pragma once

// ============================================================================
// slowcap -- run manifest
//
// Every CLI invocation records what it did: the subcommand, the fully
// resolved configuration (after flag/file/default precedence), the library
// version, every file it wrote, and the wall time.  The manifest is written
// LAST so its presence certifies a completed run.
// ============================================================================

#include <chrono>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "version.hpp"

namespace slowcap {

struct RunManifest {
    std::string command;                ///< subcommand name
    nlohmann::json resolved_config;     ///< configuration actually used
    std::vector<std::string> outputs;   ///< files written by the run
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();

    void note_output(const std::string& path) { outputs.push_back(path); }

    /// Serialize and write; call after all other outputs are on disk.
    void write(const std::string& path) const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        nlohmann::json j{{"command", command},
                         {"config", resolved_config},
                         {"version", version_string},
                         {"outputs", outputs},
                         {"wall_time_seconds", wall}};
        std::ofstream out(path);
        if (!out) throw std::runtime_error("RunManifest: cannot open " + path);
        out << j.dump(2) << "\n";
    }
};

} // namespace slowcap
