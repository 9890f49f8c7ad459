#pragma once

#include "spinkin/common.hpp"

#include <span>
#include <vector>

// Spectral operations on the periodic grid. Transforms are backed by FFTW with
// a process-wide plan cache; execution is thread-safe.
namespace spinkin::spectral {

/// Unnormalized forward DFT, X_k = sum_j x_j exp(-2 pi i jk/n).
std::vector<cplx> fft(std::span<const cplx> in);
/// Normalized inverse DFT.
std::vector<cplx> ifft(std::span<const cplx> in);

/// Angular wavenumbers in FFT order; the Nyquist entry is negative.
std::vector<double> wavenumbers(const Grid1D& grid);

/// Spectral derivative of the given order. Odd orders drop the Nyquist mode.
std::vector<double> derivative(std::span<const double> f, const Grid1D& grid, int order = 1);
std::vector<cplx> derivative(std::span<const cplx> f, const Grid1D& grid, int order = 1);

/// Band-limited interpolant evaluated at x_i + shift for every node i.
std::vector<double> shifted(std::span<const double> f, const Grid1D& grid, double shift);
std::vector<cplx> shifted(std::span<const cplx> f, const Grid1D& grid, double shift);

/// Band-limited interpolant sampled on the doubled grid (values at i*dx/2).
std::vector<cplx> upsample2(std::span<const cplx> f, const Grid1D& grid);

/// Complex amplitude a of the mode exp(i k_m x), so f ~ sum 2 Re(a e^{ikx}) for m > 0.
cplx mode_amplitude(std::span<const double> f, std::size_t mode);

/// Trapezoidal (spectrally exact) integral over the periodic domain.
double integrate(std::span<const double> f, const Grid1D& grid);

}  // namespace spinkin::spectral
