#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace phi4 {

struct CriterionResult {
    std::string id;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int workers = 2;
    std::uint64_t seed = 2026;
    std::filesystem::path scratch = "acceptance_scratch";
    bool quick = false;   // reduced Monte Carlo budgets (development aid);
                          // the shipped acceptance run uses quick = false
};

/// Runs the twelve acceptance criteria, printing one pass/fail line per
/// criterion to `log`.  All tolerances are fixed here, not configurable.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log);

}  // namespace phi4
