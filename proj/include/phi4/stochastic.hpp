#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "phi4/params.hpp"
#include "phi4/semigroup.hpp"
#include "phi4/skeleton.hpp"

namespace phi4 {

/// Space-time white noise discretization: mode-k increments over dt are
/// independent complex Gaussians (Hermitian-paired) with variance
/// dt * rhohat_kappa(k)^2, where rhohat_kappa(k) = exp(-kappa^2 4pi^2 |k|^2)
/// is the heat-kernel mollifier (kappa = 0: pure Galerkin cutoff).
/// Deterministic in (seed, stream, step index).
struct NoiseSpec {
    GridSpec grid{};
    double kappa = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    double mollifier(int k2) const;
};

Field noise_increment(const NoiseSpec& spec, double dt, std::uint64_t step_index);

/// Wick constants entering the renormalized mass m^2 - 3 eps^2 C1 + 9 eps^4 C2.
struct RenormConstants {
    double C1 = 0.0;
    double C2 = 0.0;   // 0 unless d == 3
    std::string cutoff;  // descriptor: grid + mollifier scale

    double mass_shift(double eps) const { return -3.0 * eps * eps * C1 + 9.0 * eps * eps * eps * eps * C2; }
};

struct RenormOptions {
    int c2_samples = 2000;       // Monte Carlo size of the d=3 oracle
    std::uint64_t c2_seed = 99;
};

/// C1 = sum_k rhohat(k)^2 / (2 lambda_k): stationary spatial variance of the
/// linear dynamics at eps = 1.  C2 (d = 3 only) is estimated by the Monte
/// Carlo pairing oracle of the Wick square with its Green-convolution; no
/// closed form is hardcoded.
RenormConstants renorm_constants(const GridSpec& g, double m2, int d, double kappa,
                                 const RenormOptions& opts = {});

struct SpdeStepOptions {
    bool renormalize = true;    // apply the mass shift from the constants
    double overflow_guard = 1e8;
};

/// One exponential-Euler step of the (renormalized) Langevin dynamics:
///   u+ = e^{dt(Lap - mt2)} u + dt phi1 * (-u^3) + exact OU noise increment,
/// with per-mode noise variance eps^2 rhohat^2 (1 - e^{-2 lt dt})/(2 lt).
/// mt2 is the renormalized mass; step_index addresses the noise counters.
Field step_spde(const Field& state, double dt, const ModelParams& params,
                const NoiseSpec& spec, const RenormConstants& constants,
                std::uint64_t step_index, const SpdeStepOptions& opts = {});

/// Buffer-reusing stepper for long Monte Carlo runs; one instance per
/// thread.  Integrates the same exponential-Euler scheme as step_spde
/// (agreement to roundoff) without per-step allocation.
class SpdeSimulator {
  public:
    SpdeSimulator(const ModelParams& params, const NoiseSpec& spec,
                  const RenormConstants& constants, double dt,
                  const SpdeStepOptions& opts = {});

    void set_state(const Field& f);
    Field state() const;
    const std::vector<cplx>& state_coeffs() const { return u_; }

    /// Advance n steps; the step counter persists across calls.
    void advance(std::size_t n);

    std::uint64_t step_index() const { return step_; }
    double dt() const { return dt_; }

    /// S(u) for the current state (one extra padded transform).
    double action() const;
    double l2_norm() const;

  private:
    GridSpec grid_;
    GridSpec pad_;
    ModelParams params_;
    NoiseSpec spec_;
    double dt_;
    SpdeStepOptions opts_;
    double mt2_ = 0.0;
    std::uint64_t step_ = 0;
    std::vector<cplx> u_;             // state spectrum (n-grid)
    std::vector<cplx> padbuf_;        // padded scratch
    std::vector<double> decay_;       // e^{-lambda dt}
    std::vector<double> bweight_;     // dt phi1(-lambda dt)
    std::vector<double> sigma_;       // exact OU noise deviation per mode
    std::vector<double> lambda_;
    std::vector<std::size_t> pad_index_;   // n-grid mode -> pad-grid slot
    std::vector<std::size_t> partner_;     // Hermitian partner (n-grid)
    std::vector<std::uint8_t> nyquist_;
};

struct SampleInvariantOptions {
    double dt = 0.01;
    double burn_in = 10.0;            // time units before recording
    std::size_t n_samples = 1000;
    std::size_t thinning = 25;        // steps between records
    SpdeStepOptions step;
    Field initial;                    // empty: start from 0
};

/// Long-run trajectory snapshots after burn-in; each sample is passed to
/// `sink` (which owns any aggregation).  Reproducible per (seed, stream).
void sample_invariant(const ModelParams& params, const NoiseSpec& spec,
                      const RenormConstants& constants,
                      const SampleInvariantOptions& opts,
                      const std::function<void(std::size_t, const Field&)>& sink);

/// Convenience: collect the sampled fields (small runs only).
std::vector<Field> sample_invariant_collect(const ModelParams& params, const NoiseSpec& spec,
                                            const RenormConstants& constants,
                                            const SampleInvariantOptions& opts);

/// Coming-down-from-infinity check: v := u - Psi where Psi solves the
/// massless stochastic heat equation from 0 with the *same* noise
/// realization.  Records sup_x |v(t,x)| along [0, 1] for each IC magnitude.
struct CdfiReport {
    std::vector<double> magnitudes;
    std::vector<double> sup_half_to_one;            // per magnitude: sup_{t in [1/2,1], x} |v|
    std::vector<std::vector<double>> envelope;      // per magnitude: sup_x |v(t_j,x)| per frame
    std::vector<double> times;
    std::vector<std::vector<double>> ratio_matrix;  // sup[i]/sup[j]
};

struct CdfiOptions {
    double dt = 2e-3;
    double T = 1.0;
    int record_every = 10;
    SpdeStepOptions step;
};

CdfiReport cdfi_check(const ModelParams& params, const NoiseSpec& spec,
                      const RenormConstants& constants, const Field& ic_shape,
                      const std::vector<double>& ic_magnitudes, const CdfiOptions& opts = {});

}  // namespace phi4
