#pragma once

#include <cstddef>
#include <vector>

#include "phi4/field.hpp"

namespace phi4 {

/// Time-indexed sequence of fields on a uniform grid over [t0, t1];
/// frames[j] sits at t0 + j*dt and (t1-t0)/dt is an integer.
struct Path {
    GridSpec grid{};
    double t0 = 0.0;
    double t1 = 0.0;
    double dt = 0.0;
    std::vector<Field> frames;

    Path() = default;
    Path(const GridSpec& g, double t0_, double t1_, double dt_);

    std::size_t steps() const { return frames.empty() ? 0 : frames.size() - 1; }
    double time(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
    void validate() const;
};

/// Element of the discretized Cameron-Martin space L^2([t0,t1]; L^2(T^d)),
/// stored like a Path.  frames[j] is the (piecewise-constant) value on
/// [t_j, t_{j+1}); the last frame is kept for layout parity with Path and
/// does not enter the cost.
struct Control : Path {
    using Path::Path;

    /// 1/2 sum_j ||h_j||_{L2}^2 dt, left-point quadrature over the steps.
    double cost() const;

    /// ||h||_{L2 L2}^2 = sum_j ||h_j||^2 dt (left-point).
    double l2l2_sq() const;

    static Control zero(const GridSpec& g, double t0, double t1, double dt);
};

/// <h, g>_{L2([t0,t1]; L2)} with left-point quadrature; layouts must match.
double l2l2_inner(const Control& a, const Control& b);

}  // namespace phi4
