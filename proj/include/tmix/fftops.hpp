#pragma once

// Thin FFTW front end for periodic grids: real-to-complex spectra, circular
// convolution by a real symmetric multiplier, and sharp frequency splits.
//
// Spectra use the usual r2c half layout (last axis 0..m/2).  Multiplying the
// half spectrum by a real vector keeps fields exactly real.  Plans are cached
// per (d, m) and guarded by a mutex; execution on caller-owned buffers is
// thread-safe.

#include <complex>
#include <vector>

#include "tmix/grid.hpp"

namespace tmix {

struct Spectrum {
    int d = 1;
    int m = 0;
    std::vector<std::complex<double>> c; // m^(d-1) * (m/2+1) entries

    std::size_t size() const { return c.size(); }
    // Signed frequency vector of a flat half-spectrum index.
    std::vector<int> freq(std::size_t flat) const;
};

Spectrum forward_fft(const GridDensity& f);
GridDensity inverse_fft(const Spectrum& s); // normalized (round trips are identity)

// vol * DFT of a kernel grid: the discrete convolution symbol.  Exactly real
// for centered symmetric kernels; tiny imaginary parts are dropped so the
// operator stays symmetric.
std::vector<double> convolution_symbol(const GridDensity& kernel_grid);

// Circular convolution (K * f) with unit-mass kernel semantics.
GridDensity convolve_noise(const GridDensity& kernel_grid, const GridDensity& f);

// Prebuilt multiplier for hot loops.
struct SpectralMultiplier {
    int d = 1;
    int m = 0;
    std::vector<double> mult;

    static SpectralMultiplier from_kernel(const GridDensity& kernel_grid);
    void apply(GridDensity& f) const;
};

// Splits f into (low, high) with low supported on Euclidean |k| <= cutoff.
// low + high == f exactly (high is formed by subtraction).
std::pair<GridDensity, GridDensity> freq_split(const GridDensity& f, double cutoff);

} // namespace tmix
