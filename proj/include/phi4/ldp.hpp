#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phi4/control.hpp"
#include "phi4/norms.hpp"
#include "phi4/stochastic.hpp"

namespace phi4 {

struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Wilson score interval for a binomial proportion.
struct WilsonInterval {
    double p_hat = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};
WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z = 1.959963984540054);

enum class TubeNorm { PathSup, Endpoint };

/// Monte Carlo estimate of P(trajectory stays in the delta-tube around a
/// target skeleton path) across a decreasing epsilon schedule.
struct LdpExperiment {
    ModelParams params;
    Path target;                  // solved skeleton path (v(0) is the IC)
    Control target_control;       // h with I0 = 1/2 ||h||^2 (for reporting)
    double delta = 0.3;
    std::vector<double> eps_schedule;   // strictly decreasing, positive
    std::size_t samples_per_eps = 20000;
    TubeNorm tube_norm = TubeNorm::PathSup;
    double kappa = 0.0;
    std::uint64_t seed = 1;
    int workers = 1;
    double sde_dt = 0.0;          // 0: use target.dt
    std::size_t min_expected_hits = 25;  // schedule auto-truncation threshold
    int tube_infimum_candidates = 20;

    void validate() const;
};

struct TubeEstimate {
    double eps = 0.0;
    std::size_t n_samples = 0;
    std::size_t hits = 0;
    WilsonInterval wilson;
    double rate_point = 0.0;      // -eps^2 log p_hat (inf if hits == 0)
};

struct TubeProbabilityResult {
    std::vector<TubeEstimate> estimates;   // may be shorter than the schedule
    double I0 = 0.0;              // 1/2 ||h||^2 of the target control
    double I_tube = 0.0;          // surrogate tube infimum (<= I0)
    bool truncated = false;
};

TubeProbabilityResult mc_tube_probability(const LdpExperiment& exp);

/// Weighted least squares of -log p_hat against 1/eps^2.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
};

struct SlopePoint {
    double x = 0.0;   // regressor (1/eps^2, or theta for tails)
    double y = 0.0;   // response (-log p_hat, or -eps^2 log mu_hat)
    double weight = 1.0;
    int group = 0;    // per-group intercept (e.g. one per epsilon)
};

/// Fit y = slope*x + intercept_g; throws InsufficientDataError below 3
/// usable points (or fewer than groups + 2).
SlopeFit rate_slope_fit(const std::vector<SlopePoint>& pts);

/// Tail table of the invariant measure: empirical mu_eps(S(phi) > theta).
struct TailExperiment {
    ModelParams params;
    GridSpec grid{};
    std::vector<double> eps_schedule;
    std::vector<double> theta_grid;
    std::size_t samples_per_eps = 1000000;
    double dt = 0.02;
    std::size_t thinning = 25;
    double burn_in = 20.0;
    int n_chains = 8;             // independent chains (streams); results do
                                  // not depend on the worker count
    bool renormalize = false;     // d = 1 dynamics are well-posed bare
    double kappa = 0.0;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct TailRow {
    double eps = 0.0;
    double theta = 0.0;
    std::size_t n_samples = 0;
    std::size_t hits = 0;
    double mu_hat = 0.0;
    double rate_point = 0.0;      // -eps^2 log mu_hat
};

struct TailResult {
    std::vector<TailRow> rows;
    SlopeFit fit;                 // pooled fit: shared slope, per-eps intercept
    std::vector<double> fit_theta_window;  // [lo, hi] actually used
};

TailResult invariant_tail_experiment(const TailExperiment& exp);

/// Excursion statistics: fraction of trajectories that start in the closed
/// C^alpha rho-ball and satisfy ||v(j)||_{C^alpha} >= lambda at every
/// integer time j in {1...n_bar}.
struct ExcursionSpec {
    double rho = 1.0;
    double lambda = 0.5;
    int n_bar = 4;
    double theta = 1.0;   // reported with the record, not used in the event

    void validate() const;
};

struct ExcursionResult {
    std::vector<double> frequency_by_n;       // P(excursion up to n), n = 1..n_bar
    std::vector<std::vector<std::uint8_t>> hit_pattern;  // per trajectory, per integer time
    double frequency = 0.0;                   // P(excursion up to n_bar)
    std::size_t n_paths = 0;
};

struct ExcursionExperiment {
    ModelParams params;
    GridSpec grid{};
    ExcursionSpec spec;
    double eps = 0.3;
    std::size_t n_paths = 2000;
    double dt = 2e-3;
    double kappa = 0.0;
    std::uint64_t seed = 1;
    int workers = 1;
    bool renormalize = false;
};

ExcursionResult excursion_statistics(const ExcursionExperiment& exp);

}  // namespace phi4
