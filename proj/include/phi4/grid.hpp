#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace phi4 {

/// Uniform Fourier grid on the unit torus T^d.
///
/// Frequency basis e^{2*pi*i*k.x} with k in {-n/2, ..., n/2-1} per axis and
/// torus side length 1.  The Laplacian acts on mode k as -4*pi^2*|k|^2.
/// Unpaired Nyquist modes (any axis index equal to -n/2) carry no Hermitian
/// partner on an even grid; all samplers and spectral operators in this
/// library keep them at zero so that cubic products are exactly representable
/// on a 2n-padded grid.
struct GridSpec {
    int d = 1;  // torus dimension, 1..3
    int n = 0;  // modes per axis, even, >= 4

    GridSpec() = default;
    GridSpec(int dim, int modes) : d(dim), n(modes) { validate(); }

    void validate() const {
        if (d < 1 || d > 3) throw std::invalid_argument("GridSpec: d must be in {1,2,3}");
        if (n < 4 || n % 2 != 0) throw std::invalid_argument("GridSpec: n must be even and >= 4");
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
        return s;
    }

    bool operator==(const GridSpec& o) const { return d == o.d && n == o.n; }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

    /// Signed wavenumber for axis index i in [0, n).
    int wavenumber(int i) const { return i < n / 2 ? i : i - n; }

    /// Decompose a flat row-major index into per-axis indices.
    std::array<int, 3> axis_indices(std::size_t flat) const {
        std::array<int, 3> ix{0, 0, 0};
        for (int a = d - 1; a >= 0; --a) {
            ix[a] = static_cast<int>(flat % static_cast<std::size_t>(n));
            flat /= static_cast<std::size_t>(n);
        }
        return ix;
    }

    /// |k|^2 for the mode at flat index (integer lattice squared norm).
    int mode_k2(std::size_t flat) const {
        auto ix = axis_indices(flat);
        int s = 0;
        for (int a = 0; a < d; ++a) {
            int k = wavenumber(ix[a]);
            s += k * k;
        }
        return s;
    }

    /// True if the mode has an axis index at the unpaired Nyquist frequency.
    bool is_nyquist(std::size_t flat) const {
        auto ix = axis_indices(flat);
        for (int a = 0; a < d; ++a)
            if (ix[a] == n / 2) return true;
        return false;
    }

    /// Flat index of mode k (components reduced mod n).
    std::size_t mode_index(const std::array<int, 3>& k) const {
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) {
            int i = ((k[a] % n) + n) % n;
            flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
        }
        return flat;
    }
};

/// Shared per-grid table of |k|^2 and Nyquist flags, built once per spec.
class ModeTable {
  public:
    explicit ModeTable(const GridSpec& g) : grid_(g) {
        const std::size_t sz = g.size();
        k2_.resize(sz);
        nyquist_.resize(sz);
        for (std::size_t i = 0; i < sz; ++i) {
            k2_[i] = g.mode_k2(i);
            nyquist_[i] = g.is_nyquist(i) ? 1 : 0;
        }
    }

    const GridSpec& grid() const { return grid_; }
    int k2(std::size_t flat) const { return k2_[flat]; }
    bool nyquist(std::size_t flat) const { return nyquist_[flat] != 0; }
    std::size_t size() const { return k2_.size(); }

    /// Cached table lookup; grids are tiny so the cache never evicts.
    static const ModeTable& get(const GridSpec& g);

  private:
    GridSpec grid_;
    std::vector<int> k2_;
    std::vector<std::uint8_t> nyquist_;
};

}  // namespace phi4
