#include "phi4/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phi4 {

void NormSpec::validate() const {
    if (kind == Kind::Lp || kind == Kind::Besov) {
        if (!(p >= 1.0)) throw std::invalid_argument("NormSpec: p must be >= 1");
    }
    if (kind == Kind::Besov) {
        if (!(q >= 1.0)) throw std::invalid_argument("NormSpec: q must be >= 1");
    }
}

std::string NormSpec::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Lp: os << "L" << p; break;
        case Kind::Sobolev: os << "H^" << alpha; break;
        case Kind::Besov: os << "B^" << alpha << "_{" << p << "," << q << "}"; break;
        case Kind::Hoelder: os << "C^" << alpha; break;
    }
    return os.str();
}

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    const auto& v = f.values();
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s / static_cast<double>(v.size()));
    }
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s / static_cast<double>(v.size()), 1.0 / p);
}

double sobolev_norm(const Field& f, double alpha) {
    const auto& c = f.coeffs();
    const auto& tab = ModeTable::get(f.grid());
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double w = std::pow(1.0 + static_cast<double>(tab.k2(i)), alpha);
        s += w * std::norm(c[i]);
    }
    return std::sqrt(s);
}

int max_dyadic_block(const GridSpec& g) {
    const double kmax = std::sqrt(static_cast<double>(g.d)) * (g.n / 2.0);
    int j = 0;
    while (std::pow(2.0, j) <= kmax) ++j;
    return j;  // annulus [2^{j-1}, 2^j) covers kmax
}

Field dyadic_block(const Field& f, int j) {
    const auto& c = f.coeffs();
    const auto& tab = ModeTable::get(f.grid());
    std::vector<cplx> out(c.size(), cplx(0.0, 0.0));
    const double lo2 = j <= -1 ? -1.0 : std::pow(2.0, 2 * (j - 1));  // |k|^2 >= lo2
    const double hi2 = j <= -1 ? 1.0 : std::pow(2.0, 2 * j);         // |k|^2 <  hi2
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double k2 = static_cast<double>(tab.k2(i));
        const bool inside = (j <= -1) ? (k2 < 1.0) : (k2 >= lo2 && k2 < hi2);
        if (inside) out[i] = c[i];
    }
    return Field::from_coeffs(f.grid(), std::move(out));
}

namespace {

double besov_norm(const Field& f, double alpha, double p, double q) {
    f.ensure_spectral();
    const int jmax = max_dyadic_block(f.grid());
    const bool qinf = std::isinf(q);
    double acc = 0.0;
    for (int j = -1; j <= jmax; ++j) {
        const Field blk = dyadic_block(f, j);
        const double term = std::pow(2.0, j * alpha) * lp_norm(blk, p);
        if (qinf)
            acc = std::max(acc, term);
        else
            acc += std::pow(term, q);
    }
    return qinf ? acc : std::pow(acc, 1.0 / q);
}

}  // namespace

double hoelder_norm(const Field& f, double alpha) {
    return besov_norm(f, alpha, NormSpec::inf, NormSpec::inf);
}

double norm(const Field& f, const NormSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case NormSpec::Kind::Lp: return lp_norm(f, spec.p);
        case NormSpec::Kind::Sobolev: return sobolev_norm(f, spec.alpha);
        case NormSpec::Kind::Besov: return besov_norm(f, spec.alpha, spec.p, spec.q);
        case NormSpec::Kind::Hoelder: return besov_norm(f, spec.alpha, NormSpec::inf, NormSpec::inf);
    }
    throw std::logic_error("norm: unreachable");
}

}  // namespace phi4
