#pragma once

#include <complex>
#include <vector>

#include "phi4/grid.hpp"

namespace phi4::fft {

/// In-place d-dimensional c2c DFT on an n^d row-major array.
/// forward:  out(k) = (1/n^d) sum_x in(x) e^{-2 pi i k.x/n}   (analysis)
/// backward: out(x) = sum_k in(k) e^{+2 pi i k.x/n}           (synthesis)
/// Plans are cached per (d, n, direction) behind a mutex; execution is
/// thread-safe on distinct arrays.
void forward(const GridSpec& g, std::complex<double>* data);
void backward(const GridSpec& g, std::complex<double>* data);

void forward(const GridSpec& g, std::vector<std::complex<double>>& data);
void backward(const GridSpec& g, std::vector<std::complex<double>>& data);

}  // namespace phi4::fft
