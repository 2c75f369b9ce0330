#include "phi4/skeleton.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "phi4/fft.hpp"
#include "phi4/norms.hpp"

namespace phi4 {

namespace {

void check_state(const Field& w, double guard, std::size_t step) {
    const double n = w.l2_norm();
    if (!std::isfinite(n) || n > guard)
        throw BlowupError("skeleton solve: non-finite or oversized state at step " +
                          std::to_string(step) + " (|w|_L2 = " + std::to_string(n) +
                          "); reduce dt");
}

std::size_t step_count(double T, double dt) {
    const double raw = T / dt;
    const auto n = static_cast<std::size_t>(std::llround(raw));
    if (n == 0 || std::abs(raw - static_cast<double>(n)) > 1e-9 * std::max(1.0, raw))
        throw std::invalid_argument("T/dt must be a positive integer");
    return n;
}

}  // namespace

Field skeleton_step(const OuSymbol& sym, const Field& w, const Field* hj, double dt,
                    TimeScheme scheme, double overflow_guard) {
    const GridSpec& g = sym.grid();
    const std::size_t sz = g.size();

    auto linstep = [&](const Field& u, const Field& nl) {
        const auto& cu = u.coeffs();
        const auto& cn = nl.coeffs();
        std::vector<cplx> out(sz);
        for (std::size_t i = 0; i < sz; ++i) {
            const double lam = sym.lambda(i);
            out[i] = std::exp(-lam * dt) * cu[i] + dt * phi1(-lam * dt) * cn[i];
        }
        return Field::from_coeffs(g, std::move(out));
    };

    Field nl = cube_dealiased(w) * -1.0;
    if (hj) nl += *hj;
    Field pred = linstep(w, nl);

    if (scheme == TimeScheme::Etd1) {
        check_state(pred, overflow_guard, 0);
        return pred;
    }

    // ETD2RK corrector: w+ = pred + dt phi2(-lam dt) (N(pred) - N(w));
    // the step-constant forcing cancels in the difference.
    Field n_pred = cube_dealiased(pred) * -1.0;
    Field n_old = cube_dealiased(w) * -1.0;
    const auto& cp = pred.coeffs();
    const auto& cnp = n_pred.coeffs();
    const auto& cno = n_old.coeffs();
    std::vector<cplx> out(sz);
    for (std::size_t i = 0; i < sz; ++i) {
        const double lam = sym.lambda(i);
        out[i] = cp[i] + dt * phi2(-lam * dt) * (cnp[i] - cno[i]);
    }
    Field next = Field::from_coeffs(g, std::move(out));
    check_state(next, overflow_guard, 0);
    return next;
}

SolveReport solve_skeleton(const Field& z, const Control& h, double T, double dt,
                           const ModelParams& params, const SolveOptions& opts) {
    params.validate();
    if (!(T > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("solve_skeleton: T and dt must be > 0");
    const GridSpec& g = z.grid();
    const std::size_t n_steps = step_count(T, dt);
    const bool has_h = !h.frames.empty();
    if (has_h) {
        if (h.grid != g) throw std::invalid_argument("solve_skeleton: control grid mismatch");
        if (std::abs(h.dt - dt) > 1e-12 * dt)
            throw std::invalid_argument("solve_skeleton: control must live on the solver grid");
    }

    const OuSymbol sym(g, params.m2);
    const double p = opts.report_p > 0.0 ? opts.report_p : params.lp_exponent();
    const double eta = params.eta();

    const auto t_start = std::chrono::steady_clock::now();

    SolveReport rep;
    rep.path.grid = g;
    rep.path.t0 = 0.0;
    rep.path.t1 = T;
    rep.path.dt = dt * opts.store_every;
    rep.path.frames.clear();

    Field w = z;
    w.ensure_spectral();

    auto monitor = [&](std::size_t j, const Field& u) {
        if (!opts.lp_monitor) return;
        const double lp = lp_norm(u, p);
        rep.lp_per_frame.push_back(lp);
        rep.max_lp = std::max(rep.max_lp, lp);
        const double t = static_cast<double>(j) * dt;
        if (t > 0.0) {
            const double wgt = std::pow(std::min(t, 1.0), eta);
            rep.weighted_sup_lp = std::max(rep.weighted_sup_lp, wgt * lp);
            const double h1 = sobolev_norm(u, 1.0);
            rep.weighted_sup_h1 =
                std::max(rep.weighted_sup_h1, std::pow(std::min(t, 1.0), 1.0 + eta) * h1);
        }
    };

    monitor(0, w);
    rep.path.frames.push_back(w);

    for (std::size_t j = 0; j < n_steps; ++j) {
        const Field* hj = nullptr;
        if (has_h && j < h.steps()) hj = &h.frames[j];
        try {
            w = skeleton_step(sym, w, hj, dt, opts.scheme, opts.overflow_guard);
        } catch (const BlowupError&) {
            throw BlowupError("skeleton solve blew up at t = " +
                              std::to_string(static_cast<double>(j + 1) * dt) +
                              "; reduce dt");
        }
        monitor(j + 1, w);
        if ((j + 1) % static_cast<std::size_t>(opts.store_every) == 0 || j + 1 == n_steps)
            rep.path.frames.push_back(w);
    }

    // Path frame bookkeeping when store_every does not divide n_steps: keep
    // dt as the stored stride only if consistent, else store the raw grid.
    if (opts.store_every != 1 &&
        rep.path.frames.size() !=
            n_steps / static_cast<std::size_t>(opts.store_every) + 1) {
        rep.path.dt = dt;  // fall back marker; callers use frames directly
    }

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

DecayRecord monitor_decay(const SolveReport& report, double p, double m2, double t0,
                          double slack) {
    DecayRecord rec;
    const Path& path = report.path;
    std::size_t j0 = 0;
    while (j0 < path.frames.size() && path.time(j0) < t0 - 1e-12) ++j0;
    if (j0 >= path.frames.size()) return rec;

    const double base = std::pow(lp_norm(path.frames[j0], p), p);
    for (std::size_t j = j0; j < path.frames.size(); ++j) {
        const double t = path.time(j) - path.time(j0);
        const double lhs = std::pow(lp_norm(path.frames[j], p), p);
        rec.lp_p.push_back(lhs);
        const double rhs = std::exp(-m2 * t / 2.0) * base + slack;
        const double excess = lhs - rhs;
        if (excess > 0.0) {
            if (rec.ok) rec.first_violation = static_cast<std::ptrdiff_t>(j);
            rec.ok = false;
            rec.worst_excess = std::max(rec.worst_excess, excess);
        }
    }
    return rec;
}

std::vector<double> energy_identity_residual(const Path& path, const Control& h, int p,
                                             double m2) {
    if (p < 2 || p % 2 != 0)
        throw std::invalid_argument("energy_identity_residual: p must be even and >= 2");
    path.validate();
    const GridSpec& g = path.grid;
    const double dt = path.dt;
    const bool has_h = !h.frames.empty();

    // Oversample so that pointwise powers up to w^{p/2}, and products
    // w^{p-1}*h, are alias-free: bandwidth p/2*(n/2-1) must stay below the
    // Nyquist of the sampling grid.
    int n_pad = g.n;
    while (n_pad / 2 <= (p / 2) * (g.n / 2 - 1) + g.n / 2) n_pad += g.n;

    constexpr double four_pi2 = 4.0 * 9.869604401089358;
    const GridSpec gp(g.d, n_pad);
    const auto& tab = ModeTable::get(gp);

    const std::size_t n_frames = path.frames.size();
    std::vector<double> lhs(n_frames), grad_term(n_frames), drift_term(n_frames),
        force_term(n_frames);

    for (std::size_t j = 0; j < n_frames; ++j) {
        Field wp = resample(path.frames[j], n_pad);
        const auto& v = wp.values();
        // w^{p/2} on the fine grid, spectral gradient there
        std::vector<cplx> pw(v.size());
        double lp_p = 0.0, drift = 0.0, force = 0.0;
        const std::vector<double>* hv = nullptr;
        Field hf;
        if (has_h && j < h.frames.size()) {
            hf = resample(h.frames[j], n_pad);
            hv = &hf.values();
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = v[i];
            double xp2 = 1.0;  // x^{p/2}
            for (int q = 0; q < p / 2; ++q) xp2 *= x;
            pw[i] = cplx(xp2, 0.0);
            lp_p += xp2 * xp2;  // x^p
            double xpm1 = 1.0;  // x^{p-1}
            for (int q = 0; q < p - 1; ++q) xpm1 *= x;
            drift += (x * x * x + m2 * x) * xpm1;
            if (hv) force += (*hv)[i] * xpm1;
        }
        const double vol = static_cast<double>(v.size());
        lhs[j] = lp_p / vol / static_cast<double>(p);
        drift_term[j] = drift / vol;
        force_term[j] = force / vol;

        fft::forward(gp, pw);
        double grad2 = 0.0;
        for (std::size_t i = 0; i < pw.size(); ++i)
            grad2 += four_pi2 * static_cast<double>(tab.k2(i)) * std::norm(pw[i]);
        grad_term[j] = grad2;
    }

    // Trapezoid in time of dissipation/forcing terms; residual of the
    // identity (1/p) d/dt ||w||_p^p = -(4(p-1)/p^2)||grad w^{p/2}||^2
    //                                 - <w^3 + m^2 w, w^{p-1}> + <h, w^{p-1}>.
    const double cg = 4.0 * static_cast<double>(p - 1) / static_cast<double>(p * p);
    std::vector<double> residual(n_frames, 0.0);
    double integral = 0.0;
    for (std::size_t j = 1; j < n_frames; ++j) {
        const auto rhs_rate = [&](std::size_t i) {
            return -cg * grad_term[i] - drift_term[i] + force_term[i];
        };
        integral += 0.5 * dt * (rhs_rate(j - 1) + rhs_rate(j));
        residual[j] = std::abs(lhs[j] - lhs[0] - integral);
    }
    return residual;
}

std::vector<double> compare_shifted_control(const Field& z, const Control& h, double s,
                                            double T, double dt, double p,
                                            const ModelParams& params,
                                            const SolveOptions& opts) {
    if (s < 0.0) throw std::invalid_argument("compare_shifted_control: s must be >= 0");
    const auto shift = static_cast<std::size_t>(std::llround(s / dt));
    if (std::abs(static_cast<double>(shift) * dt - s) > 1e-9)
        throw std::invalid_argument("compare_shifted_control: s must be a multiple of dt");

    SolveOptions so = opts;
    so.store_every = 1;
    SolveReport direct = solve_skeleton(z, h, T, dt, params, so);

    // htilde = 0 on [0, s), h(. - s) on [s, s + T]
    Control hshift(z.grid(), 0.0, s + T, dt);
    for (std::size_t j = 0; j < h.steps() && j < hshift.steps() - shift; ++j)
        hshift.frames[shift + j] = h.frames[j];
    SolveReport delayed = solve_skeleton(z, hshift, s + T, dt, params, so);

    std::vector<double> diff;
    diff.reserve(direct.path.frames.size());
    for (std::size_t j = 0; j < direct.path.frames.size(); ++j) {
        Field d = delayed.path.frames[j + shift] - direct.path.frames[j];
        diff.push_back(lp_norm(d, p));
    }
    return diff;
}

}  // namespace phi4
