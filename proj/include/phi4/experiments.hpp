#pragma once

#include <filesystem>
#include <ostream>

#include "phi4/config.hpp"

namespace phi4 {

/// Exit codes shared by the CLI and the experiment runners.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kBlowup = 2,
    kNoConvergence = 3,
    kInsufficientData = 4,
};

/// Experiment runners: validate the config, run, write the manifest and all
/// artifacts under `out`, and report via the exit code.  The CLI is a thin
/// dispatcher over these.
int run_solve_skeleton(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int run_certificate(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int run_control(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int run_lower_bound_control(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int run_mc_ldp(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int run_tails(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int run_cdfi(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int run_excursions(const Config& cfg, const std::filesystem::path& out, std::ostream& log);
int run_selftest(const Config& cfg, const std::filesystem::path& out, std::ostream& log);

}  // namespace phi4
