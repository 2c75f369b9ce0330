#include "phi4/path.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4 {

Path::Path(const GridSpec& g, double t0_, double t1_, double dt_)
    : grid(g), t0(t0_), t1(t1_), dt(dt_) {
    validate();
    const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
    frames.assign(n + 1, Field(g));
}

void Path::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("Path: dt must be > 0");
    if (!(t1 > t0)) throw std::invalid_argument("Path: t1 must exceed t0");
    const double steps = (t1 - t0) / dt;
    if (std::abs(steps - std::llround(steps)) > 1e-9 * std::max(1.0, steps))
        throw std::invalid_argument("Path: (t1 - t0)/dt must be an integer");
    if (!frames.empty() &&
        frames.size() != static_cast<std::size_t>(std::llround(steps)) + 1)
        throw std::invalid_argument("Path: frame count mismatch");
}

double Control::l2l2_sq() const {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < frames.size(); ++j) {
        const double nj = frames[j].l2_norm();
        s += nj * nj * dt;
    }
    return s;
}

double Control::cost() const { return 0.5 * l2l2_sq(); }

Control Control::zero(const GridSpec& g, double t0, double t1, double dt) {
    Control h(g, t0, t1, dt);
    return h;
}

double l2l2_inner(const Control& a, const Control& b) {
    if (a.frames.size() != b.frames.size() || a.dt != b.dt)
        throw std::invalid_argument("l2l2_inner: layout mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < a.frames.size(); ++j)
        s += l2_inner(a.frames[j], b.frames[j]) * a.dt;
    return s;
}

}  // namespace phi4
