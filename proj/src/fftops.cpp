#include "tmix/fftops.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace tmix {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::pair<int, int>, PlanPair>& plan_cache() {
    static std::map<std::pair<int, int>, PlanPair> cache;
    return cache;
}

std::size_t half_size(int d, int m) {
    std::size_t n = static_cast<std::size_t>(m) / 2 + 1;
    for (int i = 1; i < d; ++i) n *= static_cast<std::size_t>(m);
    return n;
}

// Plans are created once per shape on fftw_malloc'd buffers; execution uses
// the new-array interface on equally aligned buffers.
PlanPair& plans_for(int d, int m) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(d, m);
    auto it = plan_cache().find(key);
    if (it != plan_cache().end()) return it->second;

    std::vector<int> dims(static_cast<std::size_t>(d), m);
    std::size_t nr = GridDensity::cells(d, m);
    std::size_t nc = half_size(d, m);
    double* rbuf = fftw_alloc_real(nr);
    fftw_complex* cbuf = fftw_alloc_complex(nc);
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c(d, dims.data(), rbuf, cbuf, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_c2r(d, dims.data(), cbuf, rbuf, FFTW_ESTIMATE);
    fftw_free(rbuf);
    fftw_free(cbuf);
    return plan_cache().emplace(key, p).first->second;
}

struct FftwBuf {
    double* r = nullptr;
    fftw_complex* c = nullptr;
    FftwBuf(std::size_t nr, std::size_t nc) : r(fftw_alloc_real(nr)), c(fftw_alloc_complex(nc)) {}
    ~FftwBuf() {
        fftw_free(r);
        fftw_free(c);
    }
    FftwBuf(const FftwBuf&) = delete;
    FftwBuf& operator=(const FftwBuf&) = delete;
};

} // namespace

std::vector<int> Spectrum::freq(std::size_t flat) const {
    std::vector<int> k(static_cast<std::size_t>(d));
    const std::size_t last = static_cast<std::size_t>(m) / 2 + 1;
    std::size_t rem = flat;
    k[static_cast<std::size_t>(d) - 1] = static_cast<int>(rem % last);
    rem /= last;
    for (int a = d - 2; a >= 0; --a) {
        int ka = static_cast<int>(rem % static_cast<std::size_t>(m));
        rem /= static_cast<std::size_t>(m);
        if (ka > m / 2) ka -= m;
        k[static_cast<std::size_t>(a)] = ka;
    }
    return k;
}

Spectrum forward_fft(const GridDensity& f) {
    PlanPair& p = plans_for(f.d, f.m);
    std::size_t nr = f.size(), nc = half_size(f.d, f.m);
    FftwBuf buf(nr, nc);
    std::copy(f.v.begin(), f.v.end(), buf.r);
    fftw_execute_dft_r2c(p.fwd, buf.r, buf.c);
    Spectrum s;
    s.d = f.d;
    s.m = f.m;
    s.c.resize(nc);
    for (std::size_t i = 0; i < nc; ++i) s.c[i] = {buf.c[i][0], buf.c[i][1]};
    return s;
}

GridDensity inverse_fft(const Spectrum& s) {
    PlanPair& p = plans_for(s.d, s.m);
    std::size_t nr = GridDensity::cells(s.d, s.m), nc = s.size();
    FftwBuf buf(nr, nc);
    for (std::size_t i = 0; i < nc; ++i) {
        buf.c[i][0] = s.c[i].real();
        buf.c[i][1] = s.c[i].imag();
    }
    fftw_execute_dft_c2r(p.bwd, buf.c, buf.r);
    GridDensity f(s.d, s.m);
    const double scale = 1.0 / static_cast<double>(nr);
    for (std::size_t i = 0; i < nr; ++i) f.v[i] = buf.r[i] * scale;
    return f;
}

std::vector<double> convolution_symbol(const GridDensity& kernel_grid) {
    Spectrum s = forward_fft(kernel_grid);
    const double vol = kernel_grid.cell_volume();
    std::vector<double> mult(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) mult[i] = vol * s.c[i].real();
    return mult;
}

SpectralMultiplier SpectralMultiplier::from_kernel(const GridDensity& kernel_grid) {
    SpectralMultiplier sm;
    sm.d = kernel_grid.d;
    sm.m = kernel_grid.m;
    sm.mult = convolution_symbol(kernel_grid);
    return sm;
}

void SpectralMultiplier::apply(GridDensity& f) const {
    if (f.d != d || f.m != m) throw SizeMismatchError("multiplier/grid shape mismatch");
    Spectrum s = forward_fft(f);
    for (std::size_t i = 0; i < s.size(); ++i) s.c[i] *= mult[i];
    f = inverse_fft(s);
}

GridDensity convolve_noise(const GridDensity& kernel_grid, const GridDensity& f) {
    if (kernel_grid.d != f.d || kernel_grid.m != f.m)
        throw SizeMismatchError("convolve_noise: kernel and field grids differ");
    GridDensity out = f;
    out.drop_exact();
    SpectralMultiplier::from_kernel(kernel_grid).apply(out);
    return out;
}

std::pair<GridDensity, GridDensity> freq_split(const GridDensity& f, double cutoff) {
    if (!(cutoff > 0)) throw DomainError("freq_split: cutoff must be positive");
    Spectrum s = forward_fft(f);
    const double cut2 = cutoff * cutoff;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::vector<int> k = s.freq(i);
        double k2 = 0;
        for (int ka : k) k2 += static_cast<double>(ka) * ka;
        if (k2 > cut2) s.c[i] = 0.0;
    }
    GridDensity low = inverse_fft(s);
    GridDensity high = f;
    high.drop_exact();
    for (std::size_t i = 0; i < f.size(); ++i) high.v[i] = f.v[i] - low.v[i];
    return {std::move(low), std::move(high)};
}

} // namespace tmix
