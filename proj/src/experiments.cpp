#include "phi4/experiments.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "phi4/acceptance.hpp"
#include "phi4/io.hpp"
#include "phi4/ldp.hpp"
#include "phi4/parallel.hpp"
#include "phi4/version.hpp"

namespace phi4 {

namespace {

GridSpec make_grid(const Config& cfg, ConfigValidation& v) {
    const int d = cfg.get_int("grid.d", 1);
    const int n = cfg.get_int("grid.n", 32);
    v.require(d >= 1 && d <= 3, "grid.d must be in {1,2,3}");
    v.require(n >= 4 && n % 2 == 0, "grid.n must be even and >= 4");
    return (v.ok()) ? GridSpec(d, n) : GridSpec(1, 4);
}

ModelParams make_params(const Config& cfg, ConfigValidation& v) {
    ModelParams p;
    p.d = cfg.get_int("grid.d", 1);
    p.m2 = cfg.get_double("model.m2", 1.0);
    p.eps = cfg.get_double("model.eps", 0.0);
    p.alpha = cfg.get_double("model.alpha", -7.0 / 12.0);
    v.require(p.m2 > 0, "model.m2 must be > 0");
    v.require(p.eps >= 0, "model.eps must be >= 0");
    v.require(p.alpha > -2.0 / 3.0 && p.alpha < -0.5, "model.alpha must lie in (-2/3,-1/2)");
    return p;
}

Field make_field(const Config& cfg, const std::string& prefix, const GridSpec& g,
                 std::uint64_t seed, ConfigValidation& v) {
    const std::string kind = cfg.get_string(prefix + ".kind", "zero");
    const double a = cfg.get_double(prefix + ".amplitude", 1.0);
    if (kind == "zero") return Field(g);
    if (kind == "constant") return Field::constant(g, a);
    if (kind == "cosine") {
        const int k = cfg.get_int(prefix + ".mode", 1);
        return Field::cosine_mode(g, {k, 0, 0}, a);
    }
    if (kind == "two-mode") {
        Field f = Field::cosine_mode(g, {1, 0, 0}, a);
        const std::array<int, 3> k2 = g.d > 1 ? std::array<int, 3>{0, 1, 0}
                                              : std::array<int, 3>{2, 0, 0};
        f += Field::cosine_mode(g, k2, a / 2.0);
        return f;
    }
    if (kind == "random") {
        Field f = random_field(g, cfg.get_double(prefix + ".decay", 2.0), seed, 5, 0);
        const double h1 = sobolev_norm(f, 1.0);
        if (h1 > 0.0) f *= a / h1;  // H1-normalized then scaled
        return f;
    }
    if (kind == "rough") {
        Field f = random_rough_field(g, cfg.get_double("model.alpha", -7.0 / 12.0), seed, 5, 0);
        const double n = hoelder_norm(f, cfg.get_double("model.alpha", -7.0 / 12.0));
        if (n > 0.0) f *= a / n;
        return f;
    }
    v.require(false, prefix + ".kind must be one of zero|constant|cosine|two-mode|random|rough");
    return Field(g);
}

int config_failure(const ConfigValidation& v, std::ostream& log) {
    for (const auto& e : v.errors) log << "config error: " << e << "\n";
    return kConfigError;
}

void write_manifest(const Config& cfg, const std::string& subcommand,
                    const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    Config resolved = cfg;
    resolved.set("subcommand", subcommand);
    resolved.set("version", kVersion);
    std::ofstream f(out / "manifest.json");
    f << resolved.to_json() << "\n";
}

int guard(std::ostream& log, const std::function<int()>& body) {
    try {
        return body();
    } catch (const BlowupError& e) {
        log << "blowup: " << e.what() << "\n";
        return kBlowup;
    } catch (const NoConvergenceError& e) {
        log << "no convergence: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const HorizonExhaustedError& e) {
        log << "no convergence: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const InsufficientDataError& e) {
        log << "insufficient data: " << e.what() << "\n";
        return kInsufficientData;
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kConfigError;
    }
}

int effective_workers(const Config& cfg) {
    const int w = cfg.get_int("workers", 0);
    return w >= 1 ? w : default_workers();
}

}  // namespace

int run_solve_skeleton(const Config& cfg, const std::filesystem::path& out, std::ostream& log) {
    return guard(log, [&]() -> int {
        ConfigValidation v;
        GridSpec g = make_grid(cfg, v);
        ModelParams params = make_params(cfg, v);
        const double T = cfg.get_double("solver.T", 1.0);
        const double dt = cfg.get_double("solver.dt", 1e-3);
        v.require(T > 0, "solver.T must be > 0");
        v.require(dt > 0, "solver.dt must be > 0");
        const std::uint64_t seed = cfg.get_u64("seed", 1);
        if (!v.ok()) return config_failure(v, log);
        Field z = make_field(cfg, "ic", g, seed, v);
        if (!v.ok()) return config_failure(v, log);

        Control h;
        if (cfg.get_string("control.kind", "zero") != "zero") {
            h = Control(g, 0.0, T, dt);
            Field hf = make_field(cfg, "control", g, seed + 1, v);
            if (!v.ok()) return config_failure(v, log);
            for (auto& fr : h.frames) fr = hf;
        }

        SolveOptions so;
        so.scheme = cfg.get_string("solver.scheme", "etd1") == "etd2" ? TimeScheme::Etd2
                                                                      : TimeScheme::Etd1;
        so.store_every = cfg.get_int("solver.store_every", 10);
        SolveReport rep = solve_skeleton(z, h, T, dt, params, so);

        write_manifest(cfg, "solve-skeleton", out);
        io::write_path(out / "path", rep.path);
        io::NdjsonWriter nd(out / "trajectory.ndjson");
        for (std::size_t j = 0; j < rep.path.frames.size(); ++j) {
            const Field& u = rep.path.frames[j];
            std::ostringstream os;
            os << "{\"t\":" << io::format_g17(rep.path.time(j))
               << ",\"l2\":" << io::format_g17(lp_norm(u, 2.0))
               << ",\"l4\":" << io::format_g17(lp_norm(u, 4.0))
               << ",\"action\":" << io::format_g17(action(u, params.m2))
               << ",\"zero_mode\":" << io::format_g17(u.coeffs()[0].real()) << "}";
            nd.record(os.str());
        }
        log << "solve-skeleton: " << rep.path.frames.size() << " frames, max Lp "
            << rep.max_lp << ", wall " << rep.wall_seconds << " s\n";
        return kOk;
    });
}

int run_certificate(const Config& cfg, const std::filesystem::path& out, std::ostream& log) {
    return guard(log, [&]() -> int {
        ConfigValidation v;
        GridSpec g = make_grid(cfg, v);
        ModelParams params = make_params(cfg, v);
        const double T = cfg.get_double("cert.T", 8.0);
        const double eps_seg = cfg.get_double("cert.eps_seg", 0.05);
        const double dt = cfg.get_double("solver.dt", 1e-3);
        v.require(T > 0 && eps_seg > 0 && eps_seg < T, "need 0 < cert.eps_seg < cert.T");
        const std::uint64_t seed = cfg.get_u64("seed", 1);
        if (!v.ok()) return config_failure(v, log);
        Field target = make_field(cfg, "target", g, seed, v);
        if (!v.ok()) return config_failure(v, log);

        Certificate cert = quasipotential_certificate(target, eps_seg, T, dt, params);
        write_manifest(cfg, "certificate", out);
        io::write_path(out / "control", cert.control, true);

        nlohmann::json j;
        j["cost"] = cert.cost;
        j["half_cost"] = cert.cost / 2.0;
        j["action_target"] = cert.action_target;
        j["action_waypoint"] = cert.action_waypoint;
        j["endpoint_error_h1"] = cert.endpoint_error;
        j["local_cost"] = cert.local_cost;
        j["local_endpoint_error_h1"] = cert.local_endpoint_error;
        j["eps_seg"] = cert.eps_seg;
        j["T"] = cert.T;
        j["dt"] = cert.dt;
        j["inflated_steps"] = cert.inflated_steps;
        j["chain_gap"] = cert.chain_gap;
        j["control_manifest"] = "control/manifest.json";
        std::ofstream jf(out / "certificate.json");
        jf << j.dump(2) << "\n";
        log << "certificate: cost/2 = " << cert.cost / 2.0
            << ", S(target) = " << cert.action_target
            << ", rel gap = " << (cert.cost / 2.0 - cert.action_target) / cert.action_target
            << ", endpoint H1 error = " << cert.endpoint_error << "\n";
        return kOk;
    });
}

int run_control(const Config& cfg, const std::filesystem::path& out, std::ostream& log) {
    return guard(log, [&]() -> int {
        ConfigValidation v;
        GridSpec g = make_grid(cfg, v);
        ModelParams params = make_params(cfg, v);
        const double T = cfg.get_double("ctrl.T", 0.5);
        const double dt = cfg.get_double("solver.dt", 1e-3);
        const std::uint64_t seed = cfg.get_u64("seed", 1);
        v.require(T > 0 && dt > 0, "ctrl.T and solver.dt must be > 0");
        if (!v.ok()) return config_failure(v, log);
        Field target = make_field(cfg, "target", g, seed, v);
        if (!v.ok()) return config_failure(v, log);

        NonlinearControlOptions opts;
        opts.method = cfg.get_string("ctrl.method", "picard") == "newton"
                          ? ControlMethod::Newton
                          : ControlMethod::Picard;
        opts.damping = cfg.get_double("ctrl.damping", 0.5);
        opts.tol = cfg.get_double("ctrl.tol", 1e-6);
        opts.max_iter = cfg.get_int("ctrl.max_iter", 50);
        NonlinearControlResult res = nonlinear_control_to(target, T, dt, params, opts);

        write_manifest(cfg, "control", out);
        io::write_path(out / "control", res.h, true);
        nlohmann::json j;
        j["endpoint_error_h1"] = res.endpoint_error;
        j["iterations"] = res.iterations;
        j["cost"] = res.h.cost();
        j["residual_history"] = res.residual_history;
        std::ofstream jf(out / "control.json");
        jf << j.dump(2) << "\n";
        log << "control: endpoint H1 error " << res.endpoint_error << " in "
            << res.iterations << " iterations\n";
        return kOk;
    });
}

int run_lower_bound_control(const Config& cfg, const std::filesystem::path& out,
                            std::ostream& log) {
    return guard(log, [&]() -> int {
        ConfigValidation v;
        GridSpec g = make_grid(cfg, v);
        ModelParams params = make_params(cfg, v);
        const std::uint64_t seed = cfg.get_u64("seed", 1);
        LowerBoundControlOptions opts;
        opts.T_cert = cfg.get_double("lb.T_cert", 8.0);
        opts.eps_seg = cfg.get_double("lb.eps_seg", 0.05);
        opts.dt = cfg.get_double("solver.dt", 1e-3);
        opts.n_samples = cfg.get_int("lb.samples", 50);
        opts.seed = seed;
        const double rho = cfg.get_double("lb.rho", 1.0);
        const double delta = cfg.get_double("lb.delta", 0.2);
        const double gamma = cfg.get_double("lb.gamma", 0.1);
        v.require(rho > 0 && delta > 0 && gamma > 0, "lb.rho, lb.delta, lb.gamma must be > 0");
        if (!v.ok()) return config_failure(v, log);
        Field z = make_field(cfg, "target", g, seed, v);
        if (!v.ok()) return config_failure(v, log);

        LowerBoundControl lb = lower_bound_control(z, rho, delta, gamma, params, opts);
        write_manifest(cfg, "lower-bound-control", out);
        io::write_path(out / "control", lb.h0, true);
        nlohmann::json j;
        j["T0"] = lb.T0;
        j["Tbar"] = lb.Tbar;
        j["cost"] = lb.cost;
        j["budget_2S_plus_half_gamma"] = 2.0 * action(z, params.m2) + gamma / 2.0;
        j["worst_endpoint_error"] = lb.worst_endpoint_error;
        j["endpoint_errors"] = lb.endpoint_errors;
        j["certificate_cost"] = lb.certificate.cost;
        std::ofstream jf(out / "lower_bound.json");
        jf << j.dump(2) << "\n";
        log << "lower-bound-control: T0 = " << lb.T0 << ", cost = " << lb.cost
            << ", worst endpoint error = " << lb.worst_endpoint_error << "\n";
        return kOk;
    });
}

int run_mc_ldp(const Config& cfg, const std::filesystem::path& out, std::ostream& log) {
    return guard(log, [&]() -> int {
        ConfigValidation v;
        GridSpec g = make_grid(cfg, v);
        ModelParams params = make_params(cfg, v);
        const double T = cfg.get_double("ldp.T", 1.0);
        const double dt = cfg.get_double("solver.dt", 2.5e-3);
        const std::uint64_t seed = cfg.get_u64("seed", 1);
        if (!v.ok()) return config_failure(v, log);
        Field hf = make_field(cfg, "ldp.control", g, seed, v);
        if (!v.ok()) return config_failure(v, log);

        LdpExperiment exp;
        exp.params = params;
        exp.delta = cfg.get_double("ldp.delta", 0.3);
        exp.eps_schedule = cfg.get_list("ldp.eps", {0.5, 0.4, 0.3});
        exp.samples_per_eps = static_cast<std::size_t>(cfg.get_int("ldp.samples", 20000));
        exp.tube_norm = cfg.get_string("ldp.tube", "path") == "endpoint" ? TubeNorm::Endpoint
                                                                         : TubeNorm::PathSup;
        exp.seed = seed;
        exp.workers = effective_workers(cfg);
        exp.min_expected_hits =
            static_cast<std::size_t>(cfg.get_int("ldp.min_expected_hits", 25));

        exp.target_control = Control(g, 0.0, T, dt);
        for (auto& fr : exp.target_control.frames) fr = hf;
        SolveOptions so;
        so.lp_monitor = false;
        exp.target = solve_skeleton(Field(g), exp.target_control, T, dt, params, so).path;

        TubeProbabilityResult res = mc_tube_probability(exp);

        write_manifest(cfg, "mc-ldp", out);
        io::CsvWriter csv(out / "tube.csv",
                          {"epsilon", "n_samples", "hits", "p_hat", "wilson_lo", "wilson_hi",
                           "rate_point"});
        for (const auto& e : res.estimates)
            csv.row({e.eps, static_cast<double>(e.n_samples), static_cast<double>(e.hits),
                     e.wilson.p_hat, e.wilson.lo, e.wilson.hi, e.rate_point});

        nlohmann::json j;
        j["I0"] = res.I0;
        j["I_tube"] = res.I_tube;
        j["truncated"] = res.truncated;
        std::vector<SlopePoint> pts;
        for (const auto& e : res.estimates)
            if (e.hits > 0)
                pts.push_back({1.0 / (e.eps * e.eps), -std::log(e.wilson.p_hat),
                               static_cast<double>(e.hits), 0});
        if (pts.size() >= 3) {
            SlopeFit fit = rate_slope_fit(pts);
            j["fitted_rate"] = fit.slope;
            log << "mc-ldp: fitted rate " << fit.slope << " vs bracket [" << res.I_tube
                << ", " << res.I0 << "]\n";
        } else {
            log << "mc-ldp: insufficient nonzero estimates for a slope fit\n";
        }
        std::ofstream jf(out / "summary.json");
        jf << j.dump(2) << "\n";
        if (pts.size() < 3) return kInsufficientData;
        return kOk;
    });
}

int run_tails(const Config& cfg, const std::filesystem::path& out, std::ostream& log) {
    return guard(log, [&]() -> int {
        ConfigValidation v;
        GridSpec g = make_grid(cfg, v);
        ModelParams params = make_params(cfg, v);
        if (!v.ok()) return config_failure(v, log);

        TailExperiment exp;
        exp.params = params;
        exp.grid = g;
        exp.eps_schedule = cfg.get_list("tails.eps", {0.45, 0.35});
        exp.theta_grid = cfg.get_list("tails.theta", {1.2, 1.5, 1.8, 2.1, 2.4, 2.7, 3.0});
        exp.samples_per_eps = static_cast<std::size_t>(cfg.get_double("tails.samples", 1e6));
        exp.dt = cfg.get_double("tails.dt", 0.0125);
        exp.thinning = static_cast<std::size_t>(cfg.get_int("tails.thinning", 40));
        exp.burn_in = cfg.get_double("tails.burn_in", 20.0);
        exp.n_chains = cfg.get_int("tails.chains", 8);
        exp.renormalize = cfg.get_bool("tails.renormalize", false);
        exp.seed = cfg.get_u64("seed", 1);
        exp.workers = effective_workers(cfg);

        TailResult res = invariant_tail_experiment(exp);

        write_manifest(cfg, "tails", out);
        io::CsvWriter csv(out / "tails.csv", {"epsilon", "theta", "mu_hat", "rate_point"});
        for (const auto& r : res.rows) csv.row({r.eps, r.theta, r.mu_hat, r.rate_point});
        nlohmann::json j;
        j["slope"] = res.fit.slope;
        j["theta_window"] = res.fit_theta_window;
        std::ofstream jf(out / "summary.json");
        jf << j.dump(2) << "\n";
        log << "tails: fitted slope " << res.fit.slope << " over theta window ["
            << res.fit_theta_window[0] << ", " << res.fit_theta_window[1] << "]\n";
        return kOk;
    });
}

int run_cdfi(const Config& cfg, const std::filesystem::path& out, std::ostream& log) {
    return guard(log, [&]() -> int {
        ConfigValidation v;
        GridSpec g = make_grid(cfg, v);
        ModelParams params = make_params(cfg, v);
        params.eps = cfg.get_double("model.eps", 0.3);
        const std::uint64_t seed = cfg.get_u64("seed", 1);
        if (!v.ok()) return config_failure(v, log);

        NoiseSpec spec{g, cfg.get_double("noise.kappa", 0.0), seed, 1};
        RenormConstants rc{};
        CdfiOptions opts;
        opts.dt = cfg.get_double("cdfi.dt", 1e-6);
        opts.T = cfg.get_double("cdfi.T", 1.0);
        opts.record_every = cfg.get_int("cdfi.record_every", 2000);
        opts.step.renormalize = false;

        Field shape = random_field(g, 2.0, seed, 11, 0);
        const double sup = lp_norm(shape, NormSpec::inf);
        if (sup > 0.0) shape *= cfg.get_double("cdfi.base", 5.0) / sup;
        std::vector<double> mags = cfg.get_list("cdfi.magnitudes", {1.0, 10.0, 100.0});

        CdfiReport rep = cdfi_check(params, spec, rc, shape, mags, opts);

        write_manifest(cfg, "cdfi", out);
        io::CsvWriter csv(out / "cdfi.csv", {"t", "magnitude", "sup_v"});
        for (std::size_t m = 0; m < mags.size(); ++m)
            for (std::size_t j = 0; j < rep.times.size(); ++j)
                csv.row({rep.times[j], mags[m], rep.envelope[m][j]});
        nlohmann::json j;
        j["sup_half_to_one"] = rep.sup_half_to_one;
        j["ratio_matrix"] = rep.ratio_matrix;
        std::ofstream jf(out / "summary.json");
        jf << j.dump(2) << "\n";
        double worst = 0.0;
        for (const auto& row : rep.ratio_matrix)
            for (double r : row) worst = std::max(worst, r);
        log << "cdfi: worst sup ratio " << worst << "\n";
        return kOk;
    });
}

int run_excursions(const Config& cfg, const std::filesystem::path& out, std::ostream& log) {
    return guard(log, [&]() -> int {
        ConfigValidation v;
        GridSpec g = make_grid(cfg, v);
        ModelParams params = make_params(cfg, v);
        if (!v.ok()) return config_failure(v, log);

        ExcursionExperiment exp;
        exp.params = params;
        exp.grid = g;
        exp.spec.rho = cfg.get_double("exc.rho", 1.0);
        exp.spec.lambda = cfg.get_double("exc.lambda", 0.5);
        exp.spec.n_bar = cfg.get_int("exc.n_bar", 4);
        exp.spec.theta = cfg.get_double("exc.theta", 1.0);
        exp.eps = cfg.get_double("model.eps", 0.3);
        exp.n_paths = static_cast<std::size_t>(cfg.get_int("exc.paths", 2000));
        exp.dt = cfg.get_double("exc.dt", 2e-3);
        exp.seed = cfg.get_u64("seed", 1);
        exp.workers = effective_workers(cfg);

        ExcursionResult res = excursion_statistics(exp);

        write_manifest(cfg, "excursions", out);
        io::CsvWriter csv(out / "excursions.csv", {"n", "frequency"});
        for (std::size_t n = 0; n < res.frequency_by_n.size(); ++n)
            csv.row({static_cast<double>(n + 1), res.frequency_by_n[n]});
        log << "excursions: frequency at n_bar = " << res.frequency << "\n";
        return kOk;
    });
}

int run_selftest(const Config& cfg, const std::filesystem::path& out, std::ostream& log) {
    return guard(log, [&]() -> int {
        AcceptanceOptions opts;
        opts.workers = effective_workers(cfg);
        opts.seed = cfg.get_u64("seed", 2026);
        opts.scratch = out / "scratch";
        opts.quick = cfg.get_bool("selftest.quick", false);
        write_manifest(cfg, "selftest", out);
        auto results = run_acceptance(opts, log);
        bool all = true;
        for (const auto& r : results) all = all && r.pass;
        std::ofstream jf(out / "selftest.json");
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : results)
            j.push_back({{"id", r.id}, {"pass", r.pass}, {"detail", r.detail},
                         {"seconds", r.seconds}});
        jf << j.dump(2) << "\n";
        return all ? kOk : kConfigError;
    });
}

}  // namespace phi4
