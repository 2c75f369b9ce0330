#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "phi4/action.hpp"
#include "phi4/params.hpp"
#include "phi4/path.hpp"
#include "phi4/semigroup.hpp"

namespace phi4 {

struct NoConvergenceError : std::runtime_error {
    std::vector<double> residual_history;
    NoConvergenceError(const std::string& what, std::vector<double> hist)
        : std::runtime_error(what), residual_history(std::move(hist)) {}
};

struct HorizonExhaustedError : std::runtime_error {
    explicit HorizonExhaustedError(const std::string& what) : std::runtime_error(what) {}
};

/// Linear endpoint map L_T h := z^h(T) of the linear skeleton equation,
/// diagonal in Fourier.  Controls are piecewise constant on N = T/dt steps;
/// the ExpTrapezoid scheme integrates the kernel exactly per step, which
/// makes (L_T, L_T^*, L_T^+) an exactly consistent discrete triple:
///   gain      beta_j(k) = int_{s_j}^{s_{j+1}} e^{-(T-s) lambda_k} ds
///   adjoint   (L^* psi)_j = (beta_j/dt) psi^(k)      [L2L2 left-point pairing]
///   Gramian   (L L^* psi)^(k) = gamma_k psi^(k),  gamma_k = sum_j beta_j^2/dt
///   pseudoinv (L^+ phi)_j = (beta_j/dt) phi^(k)/gamma_k.
class LinearEndpointSymbol {
  public:
    LinearEndpointSymbol(const GridSpec& g, double m2, double T, double dt,
                         QuadScheme scheme = QuadScheme::ExpTrapezoid);

    const GridSpec& grid() const { return grid_; }
    double m2() const { return m2_; }
    double T() const { return T_; }
    double dt() const { return dt_; }
    std::size_t steps() const { return steps_; }
    QuadScheme scheme() const { return scheme_; }

    /// Per-step gain for mode with decay rate lambda.
    double gain(std::size_t j, double lambda) const;
    /// Discrete Gramian eigenvalue for mode with decay rate lambda.
    double gramian(double lambda) const;
    /// Continuum Gramian (1 - e^{-2 T lambda}) / (2 lambda).
    double gramian_continuum(double lambda) const;

    const OuSymbol& ou() const { return ou_; }

  private:
    GridSpec grid_;
    double m2_, T_, dt_;
    std::size_t steps_;
    QuadScheme scheme_;
    OuSymbol ou_;
};

Field linear_endpoint(const LinearEndpointSymbol& sym, const Control& h);
Control linear_adjoint(const LinearEndpointSymbol& sym, const Field& psi);
Control linear_pseudoinverse(const LinearEndpointSymbol& sym, const Field& phi);

/// Tikhonov-regularized pseudo-inverse L^* (L L^* + iota I)^{-1} phi solved
/// matrix-free by conjugate gradients on the (SPD) Gramian; test oracle for
/// the closed form.
Control linear_pseudoinverse_tikhonov(const LinearEndpointSymbol& sym, const Field& phi,
                                      double iota, double cg_tol = 1e-14,
                                      int cg_maxiter = 10000);

enum class ControlMethod { Picard, Newton };

struct NonlinearControlOptions {
    ControlMethod method = ControlMethod::Picard;
    double damping = 0.5;          // Picard relaxation factor
    double tol = 1e-6;             // endpoint H1 residual target
    int max_iter = 50;
    double newton_switch = 1e-2;   // Newton method: switch once below this
    int gmres_iter = 25;
    TimeScheme scheme = TimeScheme::Etd1;
    double overflow_guard = 1e8;
};

struct NonlinearControlResult {
    Control h;
    Field endpoint;                 // achieved w^{h,0}(T)
    double endpoint_error = 0.0;    // H1 distance to target
    int iterations = 0;
    std::vector<double> residual_history;
};

/// Global exact controllability: finds h with w^{h,0}(T) = target by
/// damped Picard iteration on phi -> target + int e^{(T-s)(Lap-m2)} w^3 ds
/// (optionally finished by matrix-free Newton-Krylov), h = L_T^+ phi*.
/// Throws NoConvergenceError after max_iter.
NonlinearControlResult nonlinear_control_to(const Field& target, double T, double dt,
                                            const ModelParams& params,
                                            const NonlinearControlOptions& opts = {});

/// Constructive V = 2S certificate.
struct Certificate {
    Field target;
    Control control;            // h_star on [0, T]
    double cost = 0.0;          // 1/2 ||h_star||^2_{L2L2}
    double endpoint_error = 0.0;    // H1 distance of re-solved endpoint to target
    double eps_seg = 0.0;
    double T = 0.0;
    double dt = 0.0;
    double action_target = 0.0;     // S(target)
    double action_waypoint = 0.0;   // S(v(eps_seg)), the down-flow endpoint
    double local_cost = 0.0;        // 1/2 ||htilde||^2 on [0, eps_seg]
    double local_endpoint_error = 0.0;
    int inflated_steps = 0;     // tracking-control steps scaled up to keep
                                // the discrete one-sided bound
    double chain_gap = 0.0;     // sum q_j - (dt/4)||h_j||^2 <= 0 certifies
                                // cost/2 >= S(target) - S(waypoint) ... see notes
};

struct CertificateOptions {
    TimeScheme scheme = TimeScheme::Etd1;
    NonlinearControlOptions local;  // settings for the [0, eps] segment
    bool validate_endpoint = true;  // re-solve w^{h*,0} and record the error
};

/// Builds h_star = htilde on [0,eps] (+) tracking control along the
/// time-reversed free decay v(t) = w^{0,target}(T-t) on [eps,T], so that
/// cost/2 sandwiches S(target):
///   S(target) <= cost/2           (exact discrete inequality, see below)
///   cost/2 -> S(target)           as T grows and eps shrinks.
/// The lower bound is certified step-by-step: with G_j the exact chord
/// gradient (Simpson in the line parameter, exact for the quartic S) and
/// delta_j = v_{j+1}-v_j, one has sum_j <G_j, delta_j> = S(target)-S(v(eps))
/// to roundoff, and each step is checked to satisfy
/// ||G_j||*||delta_j|| <= (dt/4)||h_j||^2 (h_j inflated minimally if not).
Certificate quasipotential_certificate(const Field& target, double eps_seg, double T,
                                       double dt, const ModelParams& params,
                                       const CertificateOptions& opts = {});

struct LowerBoundControlOptions {
    double T_cert = 8.0;        // certificate horizon
    double eps_seg = 0.05;
    double dt = 1e-3;
    int n_samples = 50;         // Monte Carlo ICs y in the rho-ball
    std::uint64_t seed = 1;
    double T0_init = 1.0;
    double T0_cap = 64.0;       // doubling-search cap
    CertificateOptions cert;
};

struct LowerBoundControl {
    Control h0;                 // 0 on [0,T0] (+) hbar on (T0, T0+Tbar]
    double T0 = 0.0;
    double Tbar = 0.0;
    double cost = 0.0;          // 1/2 ||h0||^2 == certificate cost exactly
    Certificate certificate;
    std::vector<double> endpoint_errors;  // per sampled y, C^alpha distance
    double worst_endpoint_error = 0.0;
};

/// Lemma-3.2-style construction: prepend a free-decay window T0 (doubling
/// search) to a certificate control so that from every sampled IC in the
/// closed C^alpha rho-ball the endpoint lands within delta/2 of z.
/// Throws HorizonExhaustedError if the search exceeds the cap.
LowerBoundControl lower_bound_control(const Field& z, double rho, double delta,
                                      double gamma, const ModelParams& params,
                                      const LowerBoundControlOptions& opts = {});

struct SublevelDistanceOptions {
    int max_iter = 600;
    double step0 = 0.2;
    std::uint64_t seed = 7;
    bool* stalled = nullptr;   // set if the optimizer made no late progress
};

/// dist_{C^alpha}(z, S[theta]) = min { ||z - phi||_{C^alpha} : S(phi) <= theta };
/// 0 if z itself is feasible.  Projected subgradient descent with an
/// exact-penalty fallback; ties broken toward smaller H^1 norm.
double sublevel_distance(const Field& z, double theta, const ModelParams& params,
                         const SublevelDistanceOptions& opts = {});

}  // namespace phi4
