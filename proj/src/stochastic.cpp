#include "phi4/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phi4/action.hpp"
#include "phi4/fft.hpp"
#include "phi4/norms.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

namespace {

constexpr double four_pi2 = 4.0 * 9.869604401089358;

/// Hermitian field of independent standard complex Gaussians scaled
/// per-mode by amp(k^2): E|c(k)|^2 = amp(k^2)^2.  Counter layout matches
/// noise_increment so the same (seed, stream, index) yields the same
/// underlying normals for any per-mode scaling.
template <typename AmpFn>
Field hermitian_gaussian_field(const GridSpec& g, AmpFn amp, std::uint64_t seed,
                               std::uint64_t stream, std::uint64_t index) {
    const auto& tab = ModeTable::get(g);
    std::vector<cplx> c(g.size(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (tab.nyquist(i)) continue;
        auto ix = g.axis_indices(i);
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < g.d; ++a) k[a] = g.wavenumber(ix[a]);
        std::array<int, 3> mk{-k[0], -k[1], -k[2]};
        const std::size_t partner = g.mode_index(mk);
        if (partner < i) continue;
        double g0, g1;
        rng::normal_pair(seed, stream, index, 2 * i, g0, g1);
        const double w = amp(tab.k2(i));
        if (partner == i) {
            c[i] = cplx(w * g0, 0.0);
        } else {
            const cplx z(w * g0 / std::sqrt(2.0), w * g1 / std::sqrt(2.0));
            c[i] = z;
            c[partner] = std::conj(z);
        }
    }
    return Field::from_coeffs(g, std::move(c));
}

/// Exact one-step OU noise variance (1 - e^{-2 lambda dt}) / (2 lambda),
/// valid for lambda of any sign (renormalized mass may be negative).
double ou_step_variance(double lambda, double dt) {
    return dt * phi1(-2.0 * lambda * dt);
}

}  // namespace

double NoiseSpec::mollifier(int k2) const {
    return std::exp(-kappa * kappa * four_pi2 * static_cast<double>(k2));
}

Field noise_increment(const NoiseSpec& spec, double dt, std::uint64_t step_index) {
    if (!(dt > 0.0)) throw std::invalid_argument("noise_increment: dt must be > 0");
    const double sdt = std::sqrt(dt);
    return hermitian_gaussian_field(
        spec.grid, [&](int k2) { return sdt * spec.mollifier(k2); }, spec.seed,
        spec.stream, step_index);
}

RenormConstants renorm_constants(const GridSpec& g, double m2, int d, double kappa,
                                 const RenormOptions& opts) {
    if (d < 1 || d > 3) throw std::invalid_argument("renorm_constants: d in {1,2,3}");
    if (g.d != d) throw std::invalid_argument("renorm_constants: grid dimension mismatch");
    NoiseSpec probe{g, kappa, 0, 0};
    const auto& tab = ModeTable::get(g);

    RenormConstants rc;
    rc.cutoff = "galerkin n=" + std::to_string(g.n) + " d=" + std::to_string(d) +
                " kappa=" + std::to_string(kappa);
    for (std::size_t i = 0; i < tab.size(); ++i) {
        if (tab.nyquist(i)) continue;
        const double lam = four_pi2 * static_cast<double>(tab.k2(i)) + m2;
        const double rho = probe.mollifier(tab.k2(i));
        rc.C1 += rho * rho / (2.0 * lam);
    }

    if (d == 3) {
        // Monte Carlo sunset oracle: X stationary Gaussian (per-mode variance
        // rho^2/(2 lambda)), W = P(X^2) - C1 its projected Wick square,
        // C2 := E[ <(-Lap + m2)^{-1} W, W> ] / 2.
        const Field one = Field::constant(g, 1.0);
        double acc = 0.0;
        for (int s = 0; s < opts.c2_samples; ++s) {
            Field x = hermitian_gaussian_field(
                g,
                [&](int k2) {
                    const double lam = four_pi2 * static_cast<double>(k2) + m2;
                    return probe.mollifier(k2) / std::sqrt(2.0 * lam);
                },
                opts.c2_seed, 3, static_cast<std::uint64_t>(s));
            Field wick = dealiased_product3(x, x, one);
            auto& wc = wick.mutable_coeffs();
            wc[0] -= rc.C1;  // center: subtract E[X^2]
            std::vector<cplx> kw(wc.size());
            for (std::size_t i = 0; i < wc.size(); ++i) {
                const double lam = four_pi2 * static_cast<double>(tab.k2(i)) + m2;
                kw[i] = wc[i] / lam;
            }
            acc += l2_inner(Field::from_coeffs(g, std::move(kw)), wick);
        }
        rc.C2 = 0.5 * acc / static_cast<double>(opts.c2_samples);
    }
    return rc;
}

Field step_spde(const Field& state, double dt, const ModelParams& params,
                const NoiseSpec& spec, const RenormConstants& constants,
                std::uint64_t step_index, const SpdeStepOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_spde: dt must be > 0");
    const GridSpec& g = state.grid();
    const double mt2 = params.m2 + (opts.renormalize ? constants.mass_shift(params.eps) : 0.0);
    const auto& tab = ModeTable::get(g);
    const std::size_t sz = g.size();

    Field nl = cube_dealiased(state) * -1.0;
    const auto& cs = state.coeffs();
    const auto& cn = nl.coeffs();
    std::vector<cplx> out(sz);
    for (std::size_t i = 0; i < sz; ++i) {
        const double lam = four_pi2 * static_cast<double>(tab.k2(i)) + mt2;
        out[i] = std::exp(-lam * dt) * cs[i] + dt * phi1(-lam * dt) * cn[i];
    }
    Field next = Field::from_coeffs(g, std::move(out));

    if (params.eps > 0.0) {
        Field noise = hermitian_gaussian_field(
            g,
            [&](int k2) {
                const double lam = four_pi2 * static_cast<double>(k2) + mt2;
                return params.eps * spec.mollifier(k2) *
                       std::sqrt(ou_step_variance(lam, dt));
            },
            spec.seed, spec.stream, step_index);
        next += noise;
    }

    const double n2 = next.l2_norm();
    if (!std::isfinite(n2) || n2 > opts.overflow_guard)
        throw BlowupError("step_spde: state left the finite range; reduce dt");
    return next;
}

SpdeSimulator::SpdeSimulator(const ModelParams& params, const NoiseSpec& spec,
                             const RenormConstants& constants, double dt,
                             const SpdeStepOptions& opts)
    : grid_(spec.grid),
      pad_(spec.grid.d, 2 * spec.grid.n),
      params_(params),
      spec_(spec),
      dt_(dt),
      opts_(opts) {
    mt2_ = params.m2 + (opts.renormalize ? constants.mass_shift(params.eps) : 0.0);
    const auto& tab = ModeTable::get(grid_);
    const std::size_t sz = grid_.size();
    u_.assign(sz, cplx(0.0, 0.0));
    padbuf_.assign(pad_.size(), cplx(0.0, 0.0));
    decay_.resize(sz);
    bweight_.resize(sz);
    sigma_.resize(sz);
    lambda_.resize(sz);
    pad_index_.resize(sz);
    partner_.resize(sz);
    nyquist_.resize(sz);
    for (std::size_t i = 0; i < sz; ++i) {
        const double lam = four_pi2 * static_cast<double>(tab.k2(i)) + mt2_;
        lambda_[i] = lam;
        decay_[i] = std::exp(-lam * dt);
        bweight_[i] = dt * phi1(-lam * dt);
        sigma_[i] = params.eps * spec.mollifier(tab.k2(i)) *
                    std::sqrt(ou_step_variance(lam, dt));
        auto ix = grid_.axis_indices(i);
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < grid_.d; ++a) k[a] = grid_.wavenumber(ix[a]);
        pad_index_[i] = pad_.mode_index(k);
        std::array<int, 3> mk{-k[0], -k[1], -k[2]};
        partner_[i] = grid_.mode_index(mk);
        nyquist_[i] = tab.nyquist(i) ? 1 : 0;
    }
}

void SpdeSimulator::set_state(const Field& f) {
    if (f.grid() != grid_) throw std::invalid_argument("SpdeSimulator: grid mismatch");
    u_ = f.coeffs();
}

Field SpdeSimulator::state() const {
    return Field::from_coeffs(grid_, u_);
}

void SpdeSimulator::advance(std::size_t n) {
    const std::size_t sz = grid_.size();
    const double eps = params_.eps;
    for (std::size_t s = 0; s < n; ++s, ++step_) {
        // dealiased cube on the padded grid
        std::fill(padbuf_.begin(), padbuf_.end(), cplx(0.0, 0.0));
        for (std::size_t i = 0; i < sz; ++i)
            if (!nyquist_[i]) padbuf_[pad_index_[i]] = u_[i];
        fft::backward(pad_, padbuf_.data());
        for (auto& z : padbuf_) {
            const double x = z.real();
            z = cplx(x * x * x, 0.0);
        }
        fft::forward(pad_, padbuf_.data());

        for (std::size_t i = 0; i < sz; ++i) {
            const cplx cube = nyquist_[i] ? cplx(0.0, 0.0) : padbuf_[pad_index_[i]];
            u_[i] = decay_[i] * u_[i] - bweight_[i] * cube;
        }
        if (eps > 0.0) {
            for (std::size_t i = 0; i < sz; ++i) {
                if (nyquist_[i]) continue;
                const std::size_t p = partner_[i];
                if (p < i) continue;
                double g0, g1;
                rng::normal_pair(spec_.seed, spec_.stream, step_, 2 * i, g0, g1);
                if (p == i) {
                    u_[i] += cplx(sigma_[i] * g0, 0.0);
                } else {
                    const cplx z(sigma_[i] * g0 / std::sqrt(2.0),
                                 sigma_[i] * g1 / std::sqrt(2.0));
                    u_[i] += z;
                    u_[p] += std::conj(z);
                }
            }
        }
    }
    double n2 = 0.0;
    for (const auto& z : u_) n2 += std::norm(z);
    if (!std::isfinite(n2) || std::sqrt(n2) > opts_.overflow_guard)
        throw BlowupError("SpdeSimulator: state left the finite range; reduce dt");
}

double SpdeSimulator::action() const {
    return phi4::action(Field::from_coeffs(grid_, u_), params_.m2);
}

double SpdeSimulator::l2_norm() const {
    double n2 = 0.0;
    for (const auto& z : u_) n2 += std::norm(z);
    return std::sqrt(n2);
}

void sample_invariant(const ModelParams& params, const NoiseSpec& spec,
                      const RenormConstants& constants,
                      const SampleInvariantOptions& opts,
                      const std::function<void(std::size_t, const Field&)>& sink) {
    if (opts.thinning == 0) throw std::invalid_argument("sample_invariant: thinning >= 1");
    SpdeSimulator sim(params, spec, constants, opts.dt, opts.step);
    if (opts.initial.size()) sim.set_state(opts.initial);
    const auto burn_steps =
        static_cast<std::uint64_t>(std::llround(opts.burn_in / opts.dt));
    sim.advance(burn_steps);
    for (std::size_t s = 0; s < opts.n_samples; ++s) {
        sim.advance(opts.thinning);
        sink(s, sim.state());
    }
}

std::vector<Field> sample_invariant_collect(const ModelParams& params, const NoiseSpec& spec,
                                            const RenormConstants& constants,
                                            const SampleInvariantOptions& opts) {
    std::vector<Field> out;
    out.reserve(opts.n_samples);
    sample_invariant(params, spec, constants, opts,
                     [&](std::size_t, const Field& f) { out.push_back(f); });
    return out;
}

CdfiReport cdfi_check(const ModelParams& params, const NoiseSpec& spec,
                      const RenormConstants& constants, const Field& ic_shape,
                      const std::vector<double>& ic_magnitudes, const CdfiOptions& opts) {
    const GridSpec& g = spec.grid;
    const auto& tab = ModeTable::get(g);
    const std::size_t sz = g.size();
    const double dt = opts.dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(opts.T / dt));
    const double mt2 =
        params.m2 + (opts.step.renormalize ? constants.mass_shift(params.eps) : 0.0);

    CdfiReport rep;
    rep.magnitudes = ic_magnitudes;
    rep.envelope.assign(ic_magnitudes.size(), {});
    rep.sup_half_to_one.assign(ic_magnitudes.size(), 0.0);

    std::vector<Field> u;
    for (double mag : ic_magnitudes) u.push_back(ic_shape * mag);
    Field z(g);  // massless stochastic heat companion, started from 0

    // One unit-variance Hermitian draw per step drives every equation; each
    // integrator scales it by its own exact OU step deviation, so the noise
    // cancels in u - z up to the O(m^2 dt) difference of the two kernels.
    for (std::size_t step = 0; step <= n_steps; ++step) {
        if (step % static_cast<std::size_t>(opts.record_every) == 0 || step == n_steps) {
            const double t = static_cast<double>(step) * dt;
            rep.times.push_back(t);
            for (std::size_t m = 0; m < u.size(); ++m) {
                Field v = u[m] - z;
                const double sup = lp_norm(v, NormSpec::inf);
                rep.envelope[m].push_back(sup);
                if (t >= 0.5 && t <= 1.0)
                    rep.sup_half_to_one[m] = std::max(rep.sup_half_to_one[m], sup);
            }
        }
        if (step == n_steps) break;

        Field gauss = hermitian_gaussian_field(
            g, [](int) { return 1.0; }, spec.seed, spec.stream, step);
        const auto& cg = gauss.coeffs();

        for (auto& ui : u) {
            Field nl = cube_dealiased(ui) * -1.0;
            const auto& cs = ui.coeffs();
            const auto& cn = nl.coeffs();
            std::vector<cplx> out(sz);
            for (std::size_t i = 0; i < sz; ++i) {
                const double lam = four_pi2 * static_cast<double>(tab.k2(i)) + mt2;
                const double sig = params.eps * spec.mollifier(tab.k2(i)) *
                                   std::sqrt(ou_step_variance(lam, dt));
                out[i] = std::exp(-lam * dt) * cs[i] + dt * phi1(-lam * dt) * cn[i] +
                         sig * cg[i];
            }
            ui = Field::from_coeffs(g, std::move(out));
        }
        {
            const auto& cz = z.coeffs();
            std::vector<cplx> out(sz);
            for (std::size_t i = 0; i < sz; ++i) {
                const double lam0 = four_pi2 * static_cast<double>(tab.k2(i));  // massless
                const double sig = params.eps * spec.mollifier(tab.k2(i)) *
                                   std::sqrt(ou_step_variance(lam0, dt));
                out[i] = std::exp(-lam0 * dt) * cz[i] + sig * cg[i];
            }
            z = Field::from_coeffs(g, std::move(out));
        }
    }

    rep.ratio_matrix.assign(u.size(), std::vector<double>(u.size(), 0.0));
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j)
            rep.ratio_matrix[i][j] = rep.sup_half_to_one[j] > 0.0
                                         ? rep.sup_half_to_one[i] / rep.sup_half_to_one[j]
                                         : 0.0;
    return rep;
}

}  // namespace phi4
