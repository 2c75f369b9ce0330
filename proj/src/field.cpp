#include "phi4/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>

#include "phi4/fft.hpp"

namespace phi4 {

Field::Field(const GridSpec& g) : grid_(g) {
    grid_.validate();
    values_.assign(g.size(), 0.0);
    coeffs_.assign(g.size(), cplx(0.0, 0.0));
    has_values_ = true;
    has_coeffs_ = true;
}

Field Field::from_values(const GridSpec& g, std::vector<double> v) {
    if (v.size() != g.size()) throw std::invalid_argument("from_values: size mismatch");
    Field f;
    f.grid_ = g;
    f.values_ = std::move(v);
    f.has_values_ = true;
    f.has_coeffs_ = false;
    return f;
}

Field Field::from_coeffs(const GridSpec& g, std::vector<cplx> c) {
    if (c.size() != g.size()) throw std::invalid_argument("from_coeffs: size mismatch");
    Field f;
    f.grid_ = g;
    f.coeffs_ = std::move(c);
    f.has_coeffs_ = true;
    f.has_values_ = false;
    return f;
}

Field Field::constant(const GridSpec& g, double c) {
    Field f(g);
    f.values_.assign(g.size(), c);
    f.coeffs_.assign(g.size(), cplx(0.0, 0.0));
    f.coeffs_[0] = cplx(c, 0.0);
    return f;
}

Field Field::cosine_mode(const GridSpec& g, const std::array<int, 3>& k, double a) {
    std::vector<cplx> c(g.size(), cplx(0.0, 0.0));
    std::array<int, 3> mk{-k[0], -k[1], -k[2]};
    c[g.mode_index(k)] += cplx(a / 2.0, 0.0);
    c[g.mode_index(mk)] += cplx(a / 2.0, 0.0);
    return from_coeffs(g, std::move(c));
}

void Field::ensure_physical() const {
    if (has_values_) return;
    if (!has_coeffs_) throw std::logic_error("Field: no representation present");
    std::vector<cplx> buf = coeffs_;
    fft::backward(grid_, buf);
    values_.resize(grid_.size());
    for (std::size_t i = 0; i < buf.size(); ++i) values_[i] = buf[i].real();
    has_values_ = true;
}

void Field::ensure_spectral() const {
    if (has_coeffs_) return;
    if (!has_values_) throw std::logic_error("Field: no representation present");
    std::vector<cplx> buf(grid_.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = cplx(values_[i], 0.0);
    fft::forward(grid_, buf);
    coeffs_ = std::move(buf);
    has_coeffs_ = true;
}

const std::vector<double>& Field::values() const {
    ensure_physical();
    return values_;
}

const std::vector<cplx>& Field::coeffs() const {
    ensure_spectral();
    return coeffs_;
}

std::vector<double>& Field::mutable_values() {
    ensure_physical();
    has_coeffs_ = false;
    return values_;
}

std::vector<cplx>& Field::mutable_coeffs() {
    ensure_spectral();
    has_values_ = false;
    return coeffs_;
}

Field& Field::operator+=(const Field& o) {
    add_scaled(o, 1.0);
    return *this;
}

Field& Field::operator-=(const Field& o) {
    add_scaled(o, -1.0);
    return *this;
}

Field& Field::operator*=(double a) {
    if (has_coeffs_)
        for (auto& c : coeffs_) c *= a;
    if (has_values_)
        for (auto& v : values_) v *= a;
    return *this;
}

void Field::add_scaled(const Field& o, double a) {
    if (grid_ != o.grid_) throw std::invalid_argument("Field: grid mismatch");
    if (has_coeffs_ && o.has_coeffs_) {
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * o.coeffs_[i];
        has_values_ = false;
        return;
    }
    ensure_physical();
    o.ensure_physical();
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * o.values_[i];
    has_coeffs_ = false;
}

Field Field::operator+(const Field& o) const {
    Field r = *this;
    r += o;
    return r;
}

Field Field::operator-(const Field& o) const {
    Field r = *this;
    r -= o;
    return r;
}

Field Field::operator*(double a) const {
    Field r = *this;
    r *= a;
    return r;
}

Field Field::operator-() const { return *this * -1.0; }

double Field::l2_norm() const {
    if (has_coeffs_) {
        double s = 0.0;
        for (const auto& c : coeffs_) s += std::norm(c);
        return std::sqrt(s);
    }
    ensure_physical();
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s / static_cast<double>(values_.size()));
}

bool Field::finite() const {
    if (has_values_) {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }
    for (const auto& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

double Field::hermitian_defect() const {
    ensure_spectral();
    const auto& tab = ModeTable::get(grid_);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        scale = std::max(scale, std::abs(coeffs_[i]));
        auto ix = grid_.axis_indices(i);
        std::array<int, 3> mk{0, 0, 0};
        for (int a = 0; a < grid_.d; ++a) mk[a] = -grid_.wavenumber(ix[a]);
        std::size_t j = grid_.mode_index(mk);
        worst = std::max(worst, std::abs(coeffs_[j] - std::conj(coeffs_[i])));
    }
    (void)tab;
    return scale > 0.0 ? worst / scale : 0.0;
}

void Field::zero_nyquist() {
    ensure_spectral();
    const auto& tab = ModeTable::get(grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (tab.nyquist(i)) coeffs_[i] = cplx(0.0, 0.0);
    has_values_ = false;
}

double l2_inner(const Field& a, const Field& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("l2_inner: grid mismatch");
    if (a.has_coeffs() && b.has_coeffs()) {
        const auto& ca = a.coeffs();
        const auto& cb = b.coeffs();
        double s = 0.0;
        for (std::size_t i = 0; i < ca.size(); ++i)
            s += ca[i].real() * cb[i].real() + ca[i].imag() * cb[i].imag();
        return s;
    }
    const auto& va = a.values();
    const auto& vb = b.values();
    double s = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
    return s / static_cast<double>(va.size());
}

namespace {

GridSpec padded_grid(const GridSpec& g) { return GridSpec(g.d, 2 * g.n); }

/// Embed the n-grid spectrum into the 2n-grid (same wavenumbers).
std::vector<cplx> embed_padded(const Field& f) {
    const GridSpec& g = f.grid();
    GridSpec pg = padded_grid(g);
    std::vector<cplx> big(pg.size(), cplx(0.0, 0.0));
    const auto& c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx(0.0, 0.0)) continue;
        auto ix = g.axis_indices(i);
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < g.d; ++a) k[a] = g.wavenumber(ix[a]);
        big[pg.mode_index(k)] = c[i];
    }
    return big;
}

/// Restrict the 2n-grid spectrum back to the n-grid band (Nyquist zeroed).
std::vector<cplx> project_band(const GridSpec& g, const std::vector<cplx>& big) {
    GridSpec pg = padded_grid(g);
    std::vector<cplx> c(g.size(), cplx(0.0, 0.0));
    const auto& tab = ModeTable::get(g);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (tab.nyquist(i)) continue;
        auto ix = g.axis_indices(i);
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < g.d; ++a) k[a] = g.wavenumber(ix[a]);
        c[i] = big[pg.mode_index(k)];
    }
    return c;
}

std::vector<double> padded_values(const Field& f) {
    GridSpec pg = padded_grid(f.grid());
    std::vector<cplx> big = embed_padded(f);
    fft::backward(pg, big);
    std::vector<double> v(pg.size());
    for (std::size_t i = 0; i < big.size(); ++i) v[i] = big[i].real();
    return v;
}

}  // namespace

Field cube_dealiased(const Field& f, double* quartic) {
    GridSpec pg = padded_grid(f.grid());
    std::vector<double> v = padded_values(f);
    std::vector<cplx> big(pg.size());
    double q4 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = v[i];
        const double x3 = x * x * x;
        big[i] = cplx(x3, 0.0);
        q4 += x3 * x;
    }
    if (quartic) *quartic = q4 / static_cast<double>(pg.size());
    fft::forward(pg, big);
    return Field::from_coeffs(f.grid(), project_band(f.grid(), big));
}

Field dealiased_product3(const Field& a, const Field& b, const Field& c) {
    if (a.grid() != b.grid() || a.grid() != c.grid())
        throw std::invalid_argument("dealiased_product3: grid mismatch");
    GridSpec pg = padded_grid(a.grid());
    std::vector<double> va = padded_values(a);
    std::vector<double> vb = padded_values(b);
    std::vector<double> vc = padded_values(c);
    std::vector<cplx> big(pg.size());
    for (std::size_t i = 0; i < va.size(); ++i) big[i] = cplx(va[i] * vb[i] * vc[i], 0.0);
    fft::forward(pg, big);
    return Field::from_coeffs(a.grid(), project_band(a.grid(), big));
}

double quartic_integral(const Field& f) {
    std::vector<double> v = padded_values(f);
    double q4 = 0.0;
    for (double x : v) {
        const double x2 = x * x;
        q4 += x2 * x2;
    }
    return q4 / static_cast<double>(v.size());
}

Field resample(const Field& f, int n_new) {
    const GridSpec& g = f.grid();
    GridSpec gn(g.d, n_new);
    const int band = std::min(g.n, n_new) / 2 - 1;  // keep |k_a| <= band
    std::vector<cplx> out(gn.size(), cplx(0.0, 0.0));
    const auto& c = f.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx(0.0, 0.0)) continue;
        auto ix = g.axis_indices(i);
        std::array<int, 3> k{0, 0, 0};
        bool keep = true;
        for (int a = 0; a < g.d; ++a) {
            k[a] = g.wavenumber(ix[a]);
            if (std::abs(k[a]) > band) keep = false;
        }
        if (keep) out[gn.mode_index(k)] = c[i];
    }
    return Field::from_coeffs(gn, std::move(out));
}

namespace {

Field random_spectral(const GridSpec& g, const std::function<double(int)>& amp,
                      std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto& tab = ModeTable::get(g);
    std::vector<cplx> c(g.size(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (tab.nyquist(i)) continue;
        auto ix = g.axis_indices(i);
        std::array<int, 3> k{0, 0, 0};
        for (int a = 0; a < g.d; ++a) k[a] = g.wavenumber(ix[a]);
        std::array<int, 3> mk{-k[0], -k[1], -k[2]};
        const std::size_t partner = g.mode_index(mk);
        if (partner < i) continue;  // filled by its mirror
        double g0, g1;
        rng::normal_pair(seed, stream, index, 2 * i, g0, g1);
        const double w = amp(tab.k2(i));
        if (partner == i) {
            c[i] = cplx(w * g0, 0.0);  // self-conjugate: k = 0
        } else {
            // E|c|^2 = w^2 per mode on both partners
            const cplx z(w * g0 / std::sqrt(2.0), w * g1 / std::sqrt(2.0));
            c[i] = z;
            c[partner] = std::conj(z);
        }
    }
    return Field::from_coeffs(g, std::move(c));
}

}  // namespace

Field random_field(const GridSpec& g, double sobolev_decay, std::uint64_t seed,
                   std::uint64_t stream, std::uint64_t index) {
    const double s = sobolev_decay;
    return random_spectral(
        g, [s](int k2) { return std::pow(1.0 + static_cast<double>(k2), -s / 2.0); }, seed,
        stream, index);
}

Field random_rough_field(const GridSpec& g, double alpha, std::uint64_t seed,
                         std::uint64_t stream, std::uint64_t index) {
    const double expo = -(alpha + static_cast<double>(g.d) / 2.0);
    return random_spectral(
        g,
        [expo](int k2) {
            const double kk = std::max(1.0, std::sqrt(static_cast<double>(k2)));
            return std::pow(kk, expo);
        },
        seed, stream, index);
}

}  // namespace phi4
