#pragma once

#include <stdexcept>

namespace phi4 {

/// Model parameters shared by the deterministic and stochastic dynamics.
struct ModelParams {
    int d = 1;             // torus dimension
    double m2 = 1.0;       // mass squared, > 0
    double eps = 0.0;      // noise intensity, >= 0
    double alpha = -7.0 / 12.0;  // Hoelder exponent, in (-2/3, -1/2)

    void validate() const {
        if (m2 <= 0) throw std::invalid_argument("ModelParams: m2 must be > 0");
        if (eps < 0) throw std::invalid_argument("ModelParams: eps must be >= 0");
        if (!(alpha > -2.0 / 3.0 && alpha < -0.5))
            throw std::invalid_argument("ModelParams: alpha must lie in (-2/3, -1/2)");
        if (d < 1 || d > 3) throw std::invalid_argument("ModelParams: d must be in {1,2,3}");
    }

    /// Default path-space weight, the midpoint of (-5 alpha/12, -alpha/3).
    double eta() const { return -3.0 * alpha / 8.0; }

    /// Integrability exponent p = 3/(1+alpha) from the local theory.
    double lp_exponent() const { return 3.0 / (1.0 + alpha); }
};

}  // namespace phi4
