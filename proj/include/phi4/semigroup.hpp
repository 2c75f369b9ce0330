#pragma once

#include <vector>

#include "phi4/field.hpp"
#include "phi4/path.hpp"

namespace phi4 {

/// phi-functions of exponential integrators, phi1(z) = (e^z-1)/z,
/// phi2(z) = (e^z-1-z)/z^2, evaluated stably (series below |z| = 1e-4).
double phi1(double z);
double phi2(double z);

/// Fourier symbol of the Ornstein-Uhlenbeck semigroup e^{t(Lap - m^2)}:
/// mode k decays at rate lambda_k = 4 pi^2 |k|^2 + m^2.
class OuSymbol {
  public:
    OuSymbol(const GridSpec& g, double m2);

    const GridSpec& grid() const { return grid_; }
    double m2() const { return m2_; }
    const std::vector<double>& lambda() const { return lambda_; }
    double lambda(std::size_t flat) const { return lambda_[flat]; }

  private:
    GridSpec grid_;
    double m2_;
    std::vector<double> lambda_;
};

/// Mode-wise e^{-t lambda_k}; rejects t < 0.
Field ou_apply(const OuSymbol& sym, double t, const Field& f);

enum class QuadScheme {
    LeftPoint,     // plain Riemann sum with kernel sampled at s_j
    ExpTrapezoid,  // per-step exact integration of the kernel against the
                   // linear interpolant of h (exact for step-constant h)
};

/// Duhamel quadrature int_0^T e^{(T-s)(Lap-m^2)} h(s) ds for a forcing on a
/// uniform time grid.
Field duhamel(const OuSymbol& sym, const Path& forcing,
              QuadScheme scheme = QuadScheme::ExpTrapezoid);

}  // namespace phi4
