#include "phi4/action.hpp"

#include <cmath>
#include <stdexcept>

#include "phi4/norms.hpp"

namespace phi4 {

namespace {
constexpr double four_pi2 = 4.0 * 9.869604401089358;
}

double action(const Field& phi, double m2) {
    const auto& c = phi.coeffs();
    const auto& tab = ModeTable::get(phi.grid());
    double quad = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double lam = four_pi2 * static_cast<double>(tab.k2(i)) + m2;
        quad += lam * std::norm(c[i]);
    }
    return 0.5 * quad + 0.25 * quartic_integral(phi);
}

Field action_gradient(const Field& phi, double m2) {
    Field cube = cube_dealiased(phi);
    const auto& c = phi.coeffs();
    const auto& tab = ModeTable::get(phi.grid());
    auto& out = cube.mutable_coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double lam = four_pi2 * static_cast<double>(tab.k2(i)) + m2;
        out[i] += lam * c[i];
    }
    return cube;
}

double action_gradient_norm(const Field& phi, double m2) {
    return action_gradient(phi, m2).l2_norm();
}

Path gradient_flow(const Field& phi, double T, double dt, double m2,
                   FlowDirection direction, const FlowOptions& opts) {
    const GridSpec& g = phi.grid();
    const auto n_steps = static_cast<std::size_t>(std::llround(T / dt));
    if (n_steps == 0) throw std::invalid_argument("gradient_flow: T/dt must be >= 1");

    Path path;
    path.grid = g;
    path.t0 = 0.0;
    path.t1 = T;
    path.dt = dt * opts.store_every;
    path.frames.clear();

    Field v = phi;
    v.ensure_spectral();
    path.frames.push_back(v);

    if (direction == FlowDirection::Down) {
        const OuSymbol sym(g, m2);
        for (std::size_t j = 0; j < n_steps; ++j) {
            v = skeleton_step(sym, v, nullptr, dt, TimeScheme::Etd1, opts.overflow_guard);
            if ((j + 1) % static_cast<std::size_t>(opts.store_every) == 0 ||
                j + 1 == n_steps)
                path.frames.push_back(v);
        }
        return path;
    }

    // Up-flow dt v = +DS(v): fully explicit RK4 (the flipped linear part is
    // anti-dissipative, no exponential treatment).
    auto rhs = [&](const Field& u) { return action_gradient(u, m2); };
    for (std::size_t j = 0; j < n_steps; ++j) {
        Field k1 = rhs(v);
        Field u2 = v;
        u2.add_scaled(k1, dt / 2.0);
        Field k2 = rhs(u2);
        Field u3 = v;
        u3.add_scaled(k2, dt / 2.0);
        Field k3 = rhs(u3);
        Field u4 = v;
        u4.add_scaled(k3, dt);
        Field k4 = rhs(u4);
        v.add_scaled(k1, dt / 6.0);
        v.add_scaled(k2, dt / 3.0);
        v.add_scaled(k3, dt / 3.0);
        v.add_scaled(k4, dt / 6.0);
        const double n = v.l2_norm();
        if (!std::isfinite(n) || n > opts.overflow_guard)
            throw BlowupError("gradient_flow(up) exceeded the overflow guard at t = " +
                              std::to_string(static_cast<double>(j + 1) * dt));
        if ((j + 1) % static_cast<std::size_t>(opts.store_every) == 0 || j + 1 == n_steps)
            path.frames.push_back(v);
    }
    return path;
}

double rate_functional(const Path& v, double m2) {
    if (v.frames.size() < 3)
        throw std::invalid_argument("rate_functional: need at least 3 frames");
    v.validate();
    const double dt = v.dt;
    const std::size_t n = v.frames.size();

    std::vector<double> h2(n);  // ||h(t_j)||_{L2}^2
    for (std::size_t j = 0; j < n; ++j) {
        Field dv(v.grid);
        if (j == 0) {
            dv = v.frames[1] - v.frames[0];
            dv *= 1.0 / dt;
        } else if (j == n - 1) {
            dv = v.frames[n - 1] - v.frames[n - 2];
            dv *= 1.0 / dt;
        } else {
            dv = v.frames[j + 1] - v.frames[j - 1];
            dv *= 1.0 / (2.0 * dt);
        }
        Field h = action_gradient(v.frames[j], m2);
        h += dv;
        const double nh = h.l2_norm();
        h2[j] = nh * nh;
    }

    double integral = 0.0;  // trapezoid
    for (std::size_t j = 1; j < n; ++j) integral += 0.5 * dt * (h2[j - 1] + h2[j]);
    return 0.5 * integral;
}

double chain_rule_check(const Path& v, double m2) {
    if (v.frames.size() < 3)
        throw std::invalid_argument("chain_rule_check: need at least 3 frames");
    const double dt = v.dt;
    const std::size_t n = v.frames.size();

    std::vector<double> pairing(n);
    for (std::size_t j = 0; j < n; ++j) {
        Field dv(v.grid);
        if (j == 0) {
            dv = v.frames[1] - v.frames[0];
            dv *= 1.0 / dt;
        } else if (j == n - 1) {
            dv = v.frames[n - 1] - v.frames[n - 2];
            dv *= 1.0 / dt;
        } else {
            dv = v.frames[j + 1] - v.frames[j - 1];
            dv *= 1.0 / (2.0 * dt);
        }
        pairing[j] = l2_inner(action_gradient(v.frames[j], m2), dv);
    }
    double integral = 0.0;
    for (std::size_t j = 1; j < n; ++j) integral += 0.5 * dt * (pairing[j - 1] + pairing[j]);

    const double ds = action(v.frames[n - 1], m2) - action(v.frames[0], m2);
    return std::abs(ds - integral);
}

}  // namespace phi4
