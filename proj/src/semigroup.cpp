#include "phi4/semigroup.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4 {

double phi1(double z) {
    if (std::abs(z) < 1e-4) {
        // 1 + z/2 + z^2/6 + z^3/24
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    }
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 1e-4) {
        // 1/2 + z/6 + z^2/24 + z^3/120
        return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0));
    }
    return (std::expm1(z) - z) / (z * z);
}

OuSymbol::OuSymbol(const GridSpec& g, double m2) : grid_(g), m2_(m2) {
    if (!(m2 > 0.0)) throw std::invalid_argument("OuSymbol: m2 must be > 0");
    const auto& tab = ModeTable::get(g);
    lambda_.resize(g.size());
    constexpr double four_pi2 = 4.0 * 9.869604401089358;  // 4*pi^2
    for (std::size_t i = 0; i < lambda_.size(); ++i)
        lambda_[i] = four_pi2 * static_cast<double>(tab.k2(i)) + m2;
}

Field ou_apply(const OuSymbol& sym, double t, const Field& f) {
    if (t < 0.0) throw std::invalid_argument("ou_apply: t must be >= 0");
    if (f.grid() != sym.grid()) throw std::invalid_argument("ou_apply: grid mismatch");
    const auto& c = f.coeffs();
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = c[i] * std::exp(-t * sym.lambda(i));
    return Field::from_coeffs(f.grid(), std::move(out));
}

Field duhamel(const OuSymbol& sym, const Path& forcing, QuadScheme scheme) {
    if (forcing.frames.empty()) throw std::invalid_argument("duhamel: empty path");
    forcing.validate();
    if (forcing.grid != sym.grid()) throw std::invalid_argument("duhamel: grid mismatch");

    const std::size_t n_steps = forcing.steps();
    const double dt = forcing.dt;
    const double T = forcing.t1 - forcing.t0;
    const std::size_t sz = sym.grid().size();
    std::vector<cplx> acc(sz, cplx(0.0, 0.0));

    for (std::size_t j = 0; j < n_steps; ++j) {
        const auto& hj = forcing.frames[j].coeffs();
        const double sj = static_cast<double>(j) * dt;
        if (scheme == QuadScheme::LeftPoint) {
            for (std::size_t i = 0; i < sz; ++i) {
                const double lam = sym.lambda(i);
                acc[i] += hj[i] * (std::exp(-(T - sj) * lam) * dt);
            }
        } else {
            const auto& hj1 = forcing.frames[j + 1].coeffs();
            for (std::size_t i = 0; i < sz; ++i) {
                const double lam = sym.lambda(i);
                const double z = -lam * dt;
                // int_{s_j}^{s_j+dt} e^{-(T-s) lam} (h_j + (s-s_j)/dt (h_{j+1}-h_j)) ds
                //   = e^{-(T-s_j-dt) lam} dt [ (phi1 - phi2) h_j + phi2 h_{j+1} ]
                // evaluated at z = -lam dt; exact when h_{j+1} = h_j.
                const double head = std::exp(-(T - sj - dt) * lam) * dt;
                const double w1 = phi1(z) - phi2(z);
                const double w2 = phi2(z);
                acc[i] += head * (w1 * hj[i] + w2 * hj1[i]);
            }
        }
    }
    return Field::from_coeffs(sym.grid(), std::move(acc));
}

}  // namespace phi4
