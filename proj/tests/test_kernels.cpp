#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "tmix/errors.hpp"
#include "tmix/kernels.hpp"
#include "tmix/rng.hpp"

using namespace tmix;

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// Direct DFT of a kernel grid at one frequency (slow reference).
std::complex<double> grid_dft(const GridDensity& g, const std::vector<int>& k) {
    std::complex<double> acc = 0.0;
    const double vol = g.cell_volume();
    for (std::size_t f = 0; f < g.size(); ++f) {
        std::size_t rem = f;
        double phase = 0.0;
        for (int a = g.d - 1; a >= 0; --a) {
            const int j = static_cast<int>(rem % g.m);
            rem /= g.m;
            phase += static_cast<double>(k[static_cast<std::size_t>(a)]) * j / g.m;
        }
        acc += g.v[f] * std::exp(std::complex<double>(0.0, -2.0 * kPi * phase));
    }
    return acc * vol;
}

// cell-average window of the grid representation
double cell_window(const std::vector<int>& k, int m) {
    double w = 1.0;
    for (int ka : k) {
        const double x = kPi * ka / m;
        w *= x == 0.0 ? 1.0 : std::sin(x) / x;
    }
    return w;
}

double grid_mass(const GridDensity& g) {
    double s = 0.0;
    for (double x : g.v) s += x;
    return s * g.cell_volume();
}

} // namespace

TEST_CASE("ball kernel grid matches the hand-integrated cell averages") {
    NoiseKernel k = NoiseKernel::ball_uniform(1, 0.25);
    GridDensity g = k.grid(8);
    // density 1/(2 eps) = 2 on [-1/4, 1/4], cells centered at j/8
    const double expect[8] = {2, 2, 1, 0, 0, 0, 1, 2};
    for (int j = 0; j < 8; ++j) CHECK(g.v[static_cast<std::size_t>(j)] ==
                                      doctest::Approx(expect[j]).epsilon(1e-12));
    CHECK(grid_mass(g) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("kernel grids have exact unit mass and bitwise symmetry") {
    for (int m : {64, 256}) {
        for (auto kern : {NoiseKernel::gaussian(1, 0.07), NoiseKernel::ball_uniform(1, 0.1),
                          NoiseKernel::tensor_tent(1, 0.1), NoiseKernel::tensor_uniform(1, 0.1)}) {
            GridDensity g = kern.grid(m);
            CHECK(std::fabs(grid_mass(g) - 1.0) < 1e-10);
            for (int j = 1; j < m; ++j)
                CHECK(g.v[static_cast<std::size_t>(j)] ==
                      g.v[static_cast<std::size_t>(m - j)]); // bit-exact
        }
    }
}

TEST_CASE("tabulated kernel grid is a passthrough") {
    GridDensity vals(1, 16);
    for (int j = 0; j < 16; ++j) vals.v[static_cast<std::size_t>(j)] = (j < 3 || j > 13) ? 2.0 : 0.1;
    NoiseKernel k = NoiseKernel::tabulated(vals, 0.1);
    GridDensity g = k.grid(16);
    CHECK(std::fabs(grid_mass(g) - 1.0) < 1e-12);
    GridDensity again = k.grid(16);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g.v[j] == again.v[j]);
    CHECK_THROWS_AS(k.grid(32), UnsupportedError);
}

TEST_CASE("compact kernels reject sub-cell support") {
    NoiseKernel k = NoiseKernel::ball_uniform(1, 1.0 / 64.0);
    CHECK_THROWS_AS(k.grid(16), ResolutionError);
}

TEST_CASE("closed-form Fourier coefficients") {
    NoiseKernel g = NoiseKernel::gaussian(1, 0.1);
    CHECK(g.fourier({1}) == doctest::Approx(std::exp(-2.0 * kPi * kPi * 0.01)).epsilon(1e-14));
    CHECK(g.fourier({0}) == doctest::Approx(1.0));

    NoiseKernel b = NoiseKernel::ball_uniform(1, 0.1);
    for (int k = 1; k <= 5; ++k) {
        const double x = 2.0 * kPi * k * 0.1;
        CHECK(b.fourier({k}) == doctest::Approx(std::sin(x) / x).epsilon(1e-14));
    }
    CHECK(b.fourier({0}) == doctest::Approx(1.0));

    NoiseKernel t = NoiseKernel::tensor_tent(2, 0.1);
    CHECK(t.fourier({0, 0}) == doctest::Approx(1.0));
    const double s = std::sin(kPi * 0.1 * 3) / (kPi * 0.1 * 3);
    CHECK(t.fourier({0, 3}) == doctest::Approx(s * s).epsilon(1e-12));
}

TEST_CASE("grid DFT agrees with the closed forms through the cell window") {
    // smooth kernels are alias-free already at m = 256
    {
        NoiseKernel kern = NoiseKernel::gaussian(1, 0.05);
        GridDensity g = kern.grid(256);
        for (int k : {1, 2, 5, 11, 25}) {
            const double dft = grid_dft(g, {k}).real() / cell_window({k}, 256);
            CHECK(std::fabs(dft - kern.fourier({k})) < 1e-8);
        }
    }
    // kinked compact kernels alias like 1/m^2; use a fine grid for 1e-8
    for (auto kern : {NoiseKernel::ball_uniform(1, 0.08), NoiseKernel::tensor_tent(1, 0.08)}) {
        GridDensity g = kern.grid(1 << 14);
        for (int k : {1, 5, 25}) {
            const double dft = grid_dft(g, {k}).real() / cell_window({k}, 1 << 14);
            CHECK(std::fabs(dft - kern.fourier({k})) < 1e-8);
        }
    }
    // d = 2, m = 128
    NoiseKernel g2 = NoiseKernel::gaussian(2, 0.05);
    GridDensity gg = g2.grid(128);
    for (auto k : std::vector<std::vector<int>>{{1, 0}, {2, 3}, {7, 5}}) {
        const double dft = grid_dft(gg, k).real() / cell_window(k, 128);
        CHECK(std::fabs(dft - g2.fourier(k)) < 1e-8);
    }
}

TEST_CASE("isotropic d=2 kernel grids are invariant under axis swap and reflection") {
    for (auto kern : {NoiseKernel::gaussian(2, 0.1), NoiseKernel::ball_uniform(2, 0.15)}) {
        GridDensity g = kern.grid(32);
        const int m = 32;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const double v = g.v[static_cast<std::size_t>(i * m + j)];
                CHECK(v == g.v[static_cast<std::size_t>(j * m + i)]);
                CHECK(v == g.v[static_cast<std::size_t>(((m - i) % m) * m + j)]);
            }
    }
}

TEST_CASE("sampling: support, moments, determinism") {
    NoiseKernel b = NoiseKernel::ball_uniform(1, 0.125);
    Rng r1(42);
    for (int i = 0; i < 2000; ++i) CHECK(std::fabs(b.sample(r1)[0]) <= 0.125 + 1e-15);

    NoiseKernel g = NoiseKernel::gaussian(1, 0.05);
    Rng r2(43);
    const int n = 40000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = g.sample(r2)[0];
        s1 += z;
        s2 += z * z;
    }
    const double mean = s1 / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    CHECK(std::fabs(mean) < 3.0 * 0.05 / std::sqrt(static_cast<double>(n)));
    CHECK(std::fabs(sd - 0.05) < 3.0 * 0.05 / std::sqrt(static_cast<double>(n)));

    // identical seeds give identical streams
    Rng ra(7), rb(7);
    for (int i = 0; i < 100; ++i) CHECK(g.sample(ra)[0] == g.sample(rb)[0]);
}

TEST_CASE("kernel statistics") {
    const double eps = 1.0 / 64.0;
    NoiseKernel b = NoiseKernel::ball_uniform(1, eps);
    KernelStats sb = b.stats(1.0, 0.5);
    CHECK(sb.first_moment == doctest::Approx(eps / 2.0).epsilon(1e-4));
    CHECK(sb.first_moment_leq_eps);
    CHECK(sb.chi_lt_1);

    NoiseKernel g = NoiseKernel::gaussian(1, 0.01);
    KernelStats sg = g.stats(1.0, 0.5);
    CHECK(sg.bold_K == doctest::Approx(std::pow(4.0 * kPi, -0.25)).epsilon(1e-3));
    CHECK(sg.chi_tail == doctest::Approx(std::exp(-2.0 * kPi * kPi)).epsilon(1e-12));

    // tent factor moments against a quadrature oracle
    NoiseKernel t = NoiseKernel::tensor_tent(1, 0.1);
    KernelStats st = t.stats(1.0, 0.5);
    double quad = 0.0;
    const int qn = 200000;
    for (int i = 0; i < qn; ++i) {
        const double x = (i + 0.5) * 0.5 / qn;
        quad += x * (1.0 - x) * (0.5 / qn);
    }
    CHECK(st.A_lower == doctest::Approx(quad).epsilon(1e-6));
    CHECK(st.A_lower > 0.0);
    CHECK(st.A == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gaussian tail supremum is below one for every c") {
    for (double c : {0.1, 0.5, 1.0, 2.0}) {
        NoiseKernel g = NoiseKernel::gaussian(1, 0.02);
        CHECK(g.stats(c, 0.5).chi_tail < 1.0);
    }
}
