#pragma once

#include <stdexcept>
#include <vector>

#include "phi4/params.hpp"
#include "phi4/path.hpp"
#include "phi4/semigroup.hpp"

namespace phi4 {

/// Raised when a time-stepped field leaves the finite range; signals that
/// dt is too large (the continuous equation never blows up).
struct BlowupError : std::runtime_error {
    explicit BlowupError(const std::string& what) : std::runtime_error(what) {}
};

enum class TimeScheme {
    Etd1,  // exponential Euler, nonlinearity frozen at the left point
    Etd2,  // one-step ETD2RK (predictor + phi2 correction)
};

struct SolveOptions {
    TimeScheme scheme = TimeScheme::Etd1;
    double overflow_guard = 1e8;  // max |w| before flagging blow-up
    int store_every = 1;          // keep every k-th frame in the report path
    double report_p = 0.0;        // Lp monitor exponent; 0 = params.lp_exponent()
    bool lp_monitor = true;       // false: skip Lp/H1 monitors (keeps frames spectral)
};

/// Monitors of a skeleton solve.
struct SolveReport {
    Path path;                       // stored frames
    std::vector<double> lp_per_frame;       // ||w(t_j)||_{L^p}
    double max_lp = 0.0;
    double weighted_sup_lp = 0.0;    // sup_t (t^1)^eta ||w||_{L^p}
    double weighted_sup_h1 = 0.0;    // sup_t (t^1)^{1+eta} ||w||_{H^1}
    double wall_seconds = 0.0;
};

/// Mild-formulation time stepping for
///   dt w - Lap w = -w^3 - m^2 w + h,   w(0) = z,
/// with the cubic term dealiased on a 2n-padded grid.  h may be empty
/// (zero forcing) or shorter than [0,T] (zero-extended).
SolveReport solve_skeleton(const Field& z, const Control& h, double T, double dt,
                           const ModelParams& params, const SolveOptions& opts = {});

/// Single solver step (exposed for the controllability machinery):
/// advances w by dt under forcing hj (constant over the step).
Field skeleton_step(const OuSymbol& sym, const Field& w, const Field* hj, double dt,
                    TimeScheme scheme, double overflow_guard = 1e8);

/// Decay-monitor record for ||w(t0+t)||_{Lp}^p <= e^{-m^2 t/2}||w(t0)||_{Lp}^p + slack.
struct DecayRecord {
    bool ok = true;
    std::ptrdiff_t first_violation = -1;  // frame index, -1 if none
    double worst_excess = 0.0;            // max over frames of lhs - rhs
    std::vector<double> lp_p;             // per-frame ||w||_p^p from t0
};

/// Checks the a priori decay envelope along a report path; frames before
/// `t0` are skipped (forcing must vanish beyond t0 for the bound to apply).
DecayRecord monitor_decay(const SolveReport& report, double p, double m2,
                          double t0 = 0.0, double slack = 1e-10);

/// Residual of the Lp energy identity on [t0, t1] evaluated per frame:
/// both sides integrated by trapezoid quadrature, gradient of w^{p/2}
/// computed spectrally on an oversampled grid.  p must be even.
std::vector<double> energy_identity_residual(const Path& path, const Control& h, int p,
                                             double m2);

/// Shifted-control comparison: solves v = w^{h,z} on [0,T] and
/// vtilde = w^{htilde,z} with htilde = 0 on [0,s), h(.-s) on [s, s+T];
/// returns t_j -> ||vtilde(t_j + s) - v(t_j)||_{Lp}.  s must be a multiple
/// of dt.
std::vector<double> compare_shifted_control(const Field& z, const Control& h, double s,
                                            double T, double dt, double p,
                                            const ModelParams& params,
                                            const SolveOptions& opts = {});

}  // namespace phi4
