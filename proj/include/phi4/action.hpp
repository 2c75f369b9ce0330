#pragma once

#include "phi4/params.hpp"
#include "phi4/path.hpp"
#include "phi4/skeleton.hpp"

namespace phi4 {

/// Phi^4 action S(phi) = 1/2 ||grad phi||_{L2}^2 + m^2/2 ||phi||_{L2}^2
///                       + 1/4 ||phi||_{L4}^4,
/// gradient spectral, quartic term on the dealiased grid.
double action(const Field& phi, double m2);

/// D S(phi) = -Lap phi + m^2 phi + phi^3 (dealiased cube).
Field action_gradient(const Field& phi, double m2);

/// ||D S(phi)||_{L2}.
double action_gradient_norm(const Field& phi, double m2);

enum class FlowDirection { Down, Up };

struct FlowOptions {
    double overflow_guard = 1e8;
    int store_every = 1;
};

/// Integrates  dt v = -+ D S(v): Down uses exponential treatment of
/// -Lap + m^2 (ETD1), Up uses fully explicit RK4 and throws BlowupError
/// past the overflow guard.
Path gradient_flow(const Field& phi, double T, double dt, double m2,
                   FlowDirection direction, const FlowOptions& opts = {});

/// Dynamic rate functional I(v) = 1/2 int int (dt v - Lap v + v^3 + m^2 v)^2.
/// Time derivative by centered differences (one-sided at endpoints),
/// spatial operators spectral, time quadrature trapezoidal.
double rate_functional(const Path& v, double m2);

/// | S(v(T)) - S(v(0)) - int <D S(v), dt v> |, the Hilbert-space chain rule
/// residual along a path (>= 3 frames).
double chain_rule_check(const Path& v, double m2);

}  // namespace phi4
