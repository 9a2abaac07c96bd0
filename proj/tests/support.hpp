#pragma once

// Shared helpers for the test binaries: independent controller-law
// transcriptions used as oracles, a subprocess runner for CLI tests, and a
// scratch-directory helper.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <sys/wait.h>

#include "burgersim/control.hpp"

namespace testsupport {

// ----- controller-law oracles -----
// Written directly from the closed-form laws with independent arithmetic
// (std::pow instead of repeated multiplication, no shared helpers), so they
// can disagree with the library if either side mistranscribes.

struct OraclePair {
    double f0, f1;
};

inline OraclePair oracle_feedback(burgersim::Variant v, double k, double u0,
                                  double u1) {
    if (v == burgersim::Variant::theorem1)
        return {k * (u0 + std::pow(u0, 3.0)), -k * (u1 + std::pow(u1, 3.0))};
    return {k * u0, -k * u1};
}

inline OraclePair oracle_feedforward(burgersim::Variant v, double uh0, double uh1,
                                     double U0, double U1, double rp, double ci) {
    if (v == burgersim::Variant::theorem1)
        return {uh0 * U0 + std::pow(U0, 2.0) / 2.0,
                uh1 * U1 + std::pow(U1, 2.0) / 2.0 + rp - ci};
    return {uh0 * U0 + (std::pow(uh0, 2.0) + std::pow(U0, 2.0)) / 2.0,
            uh1 * U1 + (std::pow(uh1, 2.0) + std::pow(U1, 2.0)) / 2.0 + rp - ci};
}

// ----- subprocess runner -----

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr combined
};

inline CliResult run_command(const std::string& command) {
    CliResult res;
    std::FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (!pipe) return res;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        res.output.append(buf.data(), got);
    const int status = ::pclose(pipe);
    if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
    return res;
}

#ifdef BURGERSIM_CLI_PATH
inline CliResult run_cli(const std::string& args) {
    return run_command(std::string("'") + BURGERSIM_CLI_PATH + "' " + args);
}
#endif

#ifdef BURGERSIM_SCENARIO_DIR
inline std::string scenario_path(const std::string& name) {
    return std::string(BURGERSIM_SCENARIO_DIR) + "/" + name;
}
#endif

// ----- scratch directories -----

class ScratchDir {
public:
    ScratchDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        const auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto candidate = base / ("burgersim_test_" + std::to_string(rng()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create scratch directory");
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::string write_file(const std::string& name, const std::string& body) const {
        const auto p = path_ / name;
        std::ofstream out(p);
        out << body;
        out.close();
        return p.string();
    }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
