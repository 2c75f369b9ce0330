#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "phi4/field.hpp"
#include "phi4/norms.hpp"

using namespace phi4;

TEST_CASE("constant field transforms to a pure zero mode") {
    for (int d : {1, 2, 3}) {
        GridSpec g(d, 8);
        Field f = Field::constant(g, 1.0);
        const auto& c = f.coeffs();
        CHECK(std::abs(c[0] - cplx(1.0, 0.0)) < 1e-14);
        for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::abs(c[i]) < 1e-14);
    }
}

TEST_CASE("cos(2 pi x1) has coefficients 1/2 at +-e1") {
    GridSpec g(1, 16);
    std::vector<double> v(g.size());
    for (int i = 0; i < g.n; ++i) v[i] = std::cos(2.0 * M_PI * i / g.n);
    Field f = Field::from_values(g, v);
    const auto& c = f.coeffs();
    CHECK(std::abs(c[g.mode_index({1, 0, 0})] - cplx(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(c[g.mode_index({-1, 0, 0})] - cplx(0.5, 0.0)) < 1e-14);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i == g.mode_index({1, 0, 0}) || i == g.mode_index({-1, 0, 0})) continue;
        CHECK(std::abs(c[i]) < 1e-13);
    }
}

TEST_CASE("spectral-physical roundtrip is the identity to 1e-12") {
    for (int d : {1, 2}) {
        GridSpec g(d, 16);
        Field f = random_field(g, 1.0, 7, 1, d);
        const auto vals = f.values();
        Field g2 = Field::from_values(g, vals);
        const auto& c1 = f.coeffs();
        const auto& c2 = g2.coeffs();
        for (std::size_t i = 0; i < c1.size(); ++i)
            CHECK(std::abs(c1[i] - c2[i]) <= 1e-12 * (1.0 + std::abs(c1[i])));
    }
}

TEST_CASE("Parseval holds to 1e-10 on 1000 random fields") {
    GridSpec g(1, 32);
    for (int i = 0; i < 1000; ++i) {
        Field f = random_field(g, 0.8, 11, 2, static_cast<std::uint64_t>(i));
        const auto& c = f.coeffs();
        double spec = 0.0;
        for (const auto& z : c) spec += std::norm(z);
        spec = std::sqrt(spec);
        const auto& v = f.values();
        double phys = 0.0;
        for (double x : v) phys += x * x;
        phys = std::sqrt(phys / static_cast<double>(v.size()));
        CHECK(std::abs(spec - phys) <= 1e-10 * std::max(1.0, spec));
    }
}

TEST_CASE("random fields are Hermitian-symmetric to 1e-12 relative") {
    for (int d : {1, 2, 3}) {
        GridSpec g(d, 8);
        Field f = random_field(g, 1.2, 13, 3, static_cast<std::uint64_t>(d));
        CHECK(f.hermitian_defect() < 1e-12);
        Field r = random_rough_field(g, -0.58, 13, 4, static_cast<std::uint64_t>(d));
        CHECK(r.hermitian_defect() < 1e-12);
    }
}

TEST_CASE("dealiased cube matches the direct spectral convolution") {
    // Brute-force cubic convolution over modes as an independent oracle.
    GridSpec g(1, 16);
    Field f = random_field(g, 1.5, 17, 5, 0);
    Field cube = cube_dealiased(f);
    const auto& c = f.coeffs();
    const int n = g.n;
    auto coeff = [&](int k) {  // 0 outside the representable band
        if (k < -n / 2 || k > n / 2 - 1) return cplx(0.0, 0.0);
        return c[g.mode_index({k, 0, 0})];
    };
    for (int k = -n / 2 + 1; k < n / 2; ++k) {
        cplx s(0.0, 0.0);
        for (int a = -n / 2; a < n / 2; ++a)
            for (int b = -n / 2; b < n / 2; ++b) s += coeff(a) * coeff(b) * coeff(k - a - b);
        CHECK(std::abs(cube.coeffs()[g.mode_index({k, 0, 0})] - s) < 1e-12);
    }
}

TEST_CASE("quartic integral equals the mode-sum oracle") {
    GridSpec g(1, 16);
    Field f = random_field(g, 1.5, 19, 6, 0);
    // int f^4 = sum_{a+b+c+d=0} c_a c_b c_c c_d
    const auto& c = f.coeffs();
    const int n = g.n;
    auto coeff = [&](int k) {
        if (k < -n / 2 || k > n / 2 - 1) return cplx(0.0, 0.0);
        return c[g.mode_index({k, 0, 0})];
    };
    cplx s(0.0, 0.0);
    for (int a = -n / 2; a < n / 2; ++a)
        for (int b = -n / 2; b < n / 2; ++b)
            for (int cc = -n / 2; cc < n / 2; ++cc) s += coeff(a) * coeff(b) * coeff(cc) * coeff(-a - b - cc);
    CHECK(std::abs(quartic_integral(f) - s.real()) < 1e-12);
    CHECK(std::abs(s.imag()) < 1e-12);
}

TEST_CASE("resample embeds and restricts bands") {
    GridSpec g(1, 16);
    Field f = random_field(g, 1.0, 23, 7, 0);
    Field up = resample(f, 32);
    Field back = resample(up, 16);
    const auto& a = f.coeffs();
    const auto& b = back.coeffs();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-14);
    CHECK(std::abs(sobolev_norm(up, 0.0) - sobolev_norm(f, 0.0)) < 1e-13);
}

TEST_CASE("arithmetic is consistent across representations") {
    GridSpec g(2, 8);
    Field a = random_field(g, 1.0, 29, 8, 0);
    Field b = random_field(g, 1.0, 29, 8, 1);
    Field s1 = a + b;           // spectral route
    Field a2 = Field::from_values(g, a.values());
    Field b2 = Field::from_values(g, b.values());
    Field s2 = a2 + b2;         // physical route
    Field d = s1 - s2;
    CHECK(d.l2_norm() < 1e-13);
}
