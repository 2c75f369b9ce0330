#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "phi4/grid.hpp"
#include "phi4/rng.hpp"

namespace phi4 {

using cplx = std::complex<double>;

/// Real scalar field on T^d held dually as grid values and Fourier
/// coefficients with Hermitian symmetry.  Representations are synchronized
/// lazily: call ensure_physical()/ensure_spectral() (or the checked
/// accessors) before reading.  Synchronize before sharing across threads;
/// after that, concurrent reads are safe.
class Field {
  public:
    Field() = default;
    explicit Field(const GridSpec& g);  // zero field

    static Field from_values(const GridSpec& g, std::vector<double> v);
    static Field from_coeffs(const GridSpec& g, std::vector<cplx> c);

    /// Constant field f == c.
    static Field constant(const GridSpec& g, double c);

    /// a * cos(2 pi k.x): coefficients a/2 at +/-k.
    static Field cosine_mode(const GridSpec& g, const std::array<int, 3>& k, double a);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }

    bool has_values() const { return has_values_; }
    bool has_coeffs() const { return has_coeffs_; }

    void ensure_physical() const;
    void ensure_spectral() const;

    const std::vector<double>& values() const;      // syncs if needed
    const std::vector<cplx>& coeffs() const;        // syncs if needed

    /// Mutable access drops the other representation.
    std::vector<double>& mutable_values();
    std::vector<cplx>& mutable_coeffs();

    // Linear algebra.  Performed spectrally if both operands carry
    // coefficients, otherwise on grid values.
    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double a);
    void add_scaled(const Field& o, double a);  // this += a*o

    Field operator+(const Field& o) const;
    Field operator-(const Field& o) const;
    Field operator*(double a) const;
    Field operator-() const;

    /// L2(T^d) norm (uniform-grid quadrature / Parseval, whichever
    /// representation is present; both agree to roundoff).
    double l2_norm() const;

    /// Max |k| component-wise infinity?  -- largest |k|^2 with nonzero coeff.
    bool finite() const;

    /// Relative Hermitian-symmetry defect max_k |c(-k) - conj(c(k))| / max|c|.
    double hermitian_defect() const;

    /// Project out unpaired Nyquist modes (see GridSpec notes).
    void zero_nyquist();

  private:
    GridSpec grid_{};
    mutable std::vector<double> values_;
    mutable std::vector<cplx> coeffs_;
    mutable bool has_values_ = false;
    mutable bool has_coeffs_ = false;
};

/// <a, b>_{L2} = (1/n^d) sum_x a(x) b(x).
double l2_inner(const Field& a, const Field& b);

/// Galerkin-exact cube: transform to a 2n-per-axis padded grid, cube
/// pointwise, project back onto the n-grid band.  Exact for Nyquist-free
/// fields.  Also returns integral of f^4 over T^d evaluated on the padded
/// grid (exact under the same condition).
Field cube_dealiased(const Field& f, double* quartic_integral = nullptr);

/// Galerkin-exact triple product a*b*c on the 2n-padded grid.
Field dealiased_product3(const Field& a, const Field& b, const Field& c);

/// int_{T^d} f^4 dx on the dealiased grid.
double quartic_integral(const Field& f);

/// Spectral resampling to an n_new-per-axis grid (band embed or restrict).
Field resample(const Field& f, int n_new);

/// Random real field with E|c(k)|^2 proportional to (1+|k|^2)^{-s}
/// (Hermitian-paired, Nyquist-free).  s = sobolev_decay; s > d/2 gives an
/// L2 field, smaller s gives rougher fields.  Deterministic in (seed,
/// stream, index): mode m uses counter sub = 2*flat(m).
Field random_field(const GridSpec& g, double sobolev_decay,
                   std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

/// Spectral synthesis of a Hoelder-Besov rough sample: coefficient
/// magnitudes |k|^{-(alpha + d/2)} g_k as in the C^alpha sampler, then the
/// caller normalizes.  alpha < 0.
Field random_rough_field(const GridSpec& g, double alpha,
                         std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace phi4
