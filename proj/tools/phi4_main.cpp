#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "phi4/config.hpp"
#include "phi4/experiments.hpp"
#include "phi4/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"phi4: large-deviation toolkit for the Phi^4 Langevin dynamics"};
    app.set_version_flag("--version", phi4::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;

    const char* subcommands[] = {"solve-skeleton", "certificate",        "control",
                                 "lower-bound-control", "mc-ldp",        "tails",
                                 "cdfi",            "excursions",        "selftest"};
    for (const char* name : subcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config file (key=value or JSON)");
        sub->add_option("--seed", seed, "master seed (overrides config)")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--workers", workers, "worker threads (default: PHI4_WORKERS or hw)");
        sub->add_option("--out", out_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    phi4::Config cfg;
    try {
        if (!config_path.empty()) cfg = phi4::Config::load(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return phi4::kConfigError;
    }
    if (seed_set) cfg.set("seed", std::to_string(seed));
    if (workers > 0) cfg.set("workers", std::to_string(workers));

    using Runner = int (*)(const phi4::Config&, const std::filesystem::path&, std::ostream&);
    Runner runner = nullptr;
    if (sub == "solve-skeleton") runner = phi4::run_solve_skeleton;
    else if (sub == "certificate") runner = phi4::run_certificate;
    else if (sub == "control") runner = phi4::run_control;
    else if (sub == "lower-bound-control") runner = phi4::run_lower_bound_control;
    else if (sub == "mc-ldp") runner = phi4::run_mc_ldp;
    else if (sub == "tails") runner = phi4::run_tails;
    else if (sub == "cdfi") runner = phi4::run_cdfi;
    else if (sub == "excursions") runner = phi4::run_excursions;
    else if (sub == "selftest") runner = phi4::run_selftest;

    return runner(cfg, out_dir, std::cout);
}
