#pragma once

// Test-only oracles, independent of the library implementation paths they
// check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Closed form of xdot = -x^3 - m2 x (Bernoulli):
/// x(t) = x0 e^{-m2 t} / sqrt(1 + x0^2 (1 - e^{-2 m2 t}) / m2).
inline double cubic_ode_exact(double x0, double m2, double t) {
    const double e = std::exp(-m2 * t);
    return x0 * e / std::sqrt(1.0 + x0 * x0 * (1.0 - e * e) / m2);
}

/// Adaptive RK45 (Cash-Karp) for scalar ODEs; tolerance-controlled.
inline double rk45(const std::function<double(double, double)>& f, double x0, double t0,
                   double t1, double tol = 1e-12) {
    double t = t0, x = x0, h = (t1 - t0) / 100.0;
    const int kmax = 2000000;
    for (int k = 0; k < kmax && t < t1; ++k) {
        if (t + h > t1) h = t1 - t;
        const double k1 = f(t, x);
        const double k2 = f(t + h / 5.0, x + h * k1 / 5.0);
        const double k3 = f(t + 3.0 * h / 10.0, x + h * (3.0 * k1 + 9.0 * k2) / 40.0);
        const double k4 = f(t + 3.0 * h / 5.0,
                            x + h * (3.0 * k1 / 10.0 - 9.0 * k2 / 10.0 + 6.0 * k3 / 5.0));
        const double k5 = f(t + h, x + h * (-11.0 * k1 / 54.0 + 5.0 * k2 / 2.0 -
                                            70.0 * k3 / 27.0 + 35.0 * k4 / 27.0));
        const double k6 =
            f(t + 7.0 * h / 8.0,
              x + h * (1631.0 * k1 / 55296.0 + 175.0 * k2 / 512.0 + 575.0 * k3 / 13824.0 +
                       44275.0 * k4 / 110592.0 + 253.0 * k5 / 4096.0));
        const double x5 = x + h * (37.0 * k1 / 378.0 + 250.0 * k3 / 621.0 +
                                   125.0 * k4 / 594.0 + 512.0 * k6 / 1771.0);
        const double x4 = x + h * (2825.0 * k1 / 27648.0 + 18575.0 * k3 / 48384.0 +
                                   13525.0 * k4 / 55296.0 + 277.0 * k5 / 14336.0 +
                                   k6 / 4.0);
        const double err = std::abs(x5 - x4);
        const double scale = tol * (1.0 + std::abs(x));
        if (err <= scale) {
            t += h;
            x = x5;
        }
        h *= 0.9 * std::pow(scale / std::max(err, 1e-300), 0.2);
        h = std::min(h, t1 - t0);
    }
    if (t < t1) throw std::runtime_error("rk45: step limit");
    return x;
}

/// Exact convolution int_0^t e^{-lam (t-s)} sin(w s) ds.
inline double sin_convolution_exact(double lam, double w, double t) {
    return (lam * std::sin(w * t) - w * std::cos(w * t) + w * std::exp(-lam * t)) /
           (lam * lam + w * w);
}

/// Two-sided Kolmogorov-Smirnov test of xs against a standard normal with
/// deviation sigma; returns the p-value (asymptotic Kolmogorov series).
inline double ks_gaussian_pvalue(std::vector<double> xs, double sigma) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-xs[i] / (sigma * std::sqrt(2.0)));
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    const double x = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
    return std::min(1.0, std::max(0.0, p));
}

}  // namespace oracles
