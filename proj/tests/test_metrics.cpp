#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tmix/config.hpp"
#include "tmix/errors.hpp"
#include "tmix/metrics.hpp"
#include "tmix/rng.hpp"

using namespace tmix;

namespace {

GridDensity coarsen(const GridDensity& f, int factor) {
    GridDensity g(f.d, f.m / factor);
    if (f.d != 1) throw std::runtime_error("test coarsen is 1d");
    for (int j = 0; j < f.m; ++j)
        g.v[static_cast<std::size_t>(j / factor)] += f.v[static_cast<std::size_t>(j)] / factor;
    return g;
}

double tv_between(const GridDensity& a, const GridDensity& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::fabs(a.v[j] - b.v[j]);
    return 0.5 * s / static_cast<double>(a.size());
}

} // namespace

TEST_CASE("coarse noise mixes the doubling map within a few steps") {
    BernoulliMap dbl = preset_map("doubling");
    NoiseKernel g = NoiseKernel::gaussian(1, 0.25);
    MixResult r = measure_tmix(dbl, g, 0.25, 0.5, 512);
    CHECK(r.worst.t <= 4);
    CHECK(r.worst.t >= 1);
    CHECK(r.worst.converged);
}

TEST_CASE("worst-case envelope is nonincreasing and delta-monotone") {
    BernoulliMap dbl = preset_map("doubling");
    const double eps = 1.0 / 64.0;
    NoiseKernel g = NoiseKernel::gaussian(1, eps);
    MixResult r = measure_tmix(dbl, g, eps, 0.5, 1024);
    for (std::size_t n = 1; n < r.worst.residuals.size(); ++n)
        CHECK(r.worst.residuals[n] <= r.worst.residuals[n - 1] + 1e-9);
    MixResult tight = measure_tmix(dbl, g, eps, 0.25, 1024);
    CHECK(tight.worst.t >= r.worst.t);
    // purely deterministic measurement: identical reruns
    MixResult again = measure_tmix(dbl, g, eps, 0.5, 1024);
    CHECK(again.worst.t == r.worst.t);
    for (std::size_t n = 0; n < r.worst.residuals.size(); ++n)
        CHECK(again.worst.residuals[n] == r.worst.residuals[n]);
}

TEST_CASE("theorem witness keeps tv above delta at step N - N1") {
    BernoulliMap dbl = preset_map("doubling");
    const double eps = 1.0 / 256.0;
    MixResult r = measure_tmix(dbl, NoiseKernel::gaussian(1, eps), eps, 0.5, 4096);
    REQUIRE(r.witness_N.has_value());
    CHECK(*r.witness_N == 4);
    CHECK(*r.witness_N1 == 2);
    REQUIRE(r.witness_tv_at_check.has_value());
    CHECK(*r.witness_tv_at_check >= 0.5);
    CHECK(r.witness_ok);
}

TEST_CASE("identity map mixes on the random-walk time scale") {
    BernoulliMap id = preset_map("identity");
    const double e1 = 1.0 / 8.0, e2 = 1.0 / 16.0;
    MixOptions opt;
    opt.n_starts = 4;
    opt.include_witness = false;
    MixResult r1 = measure_tmix(id, NoiseKernel::gaussian(1, e1), e1, 0.5, 256, opt);
    MixResult r2 = measure_tmix(id, NoiseKernel::gaussian(1, e2), e2, 0.5, 256, opt);
    // halving eps should roughly quadruple the time; superlinear is the gate
    CHECK(r2.worst.t >= 2 * r1.worst.t);
}

TEST_CASE("dissipation time of the doubling map tracks log2(1/eps)") {
    BernoulliMap dbl = preset_map("doubling");
    const double eps = 1.0 / 64.0;
    DisResult r = measure_tdis(dbl, NoiseKernel::gaussian(1, eps), eps, 0.5, 1024);
    CHECK(std::abs(r.meas.t - 6) <= 2);
    // the norm sequence is nonincreasing
    for (std::size_t n = 2; n < r.meas.residuals.size(); ++n)
        CHECK(r.meas.residuals[n] <= r.meas.residuals[n - 1] + 1e-8);
    CHECK_FALSE(r.stalled);
}

TEST_CASE("a strict contraction gives t_dis = 1 for delta near one") {
    BernoulliMap dbl = preset_map("doubling");
    DisResult r = measure_tdis(dbl, NoiseKernel::gaussian(1, 0.05), 0.05, 0.96, 512);
    CHECK(r.meas.t == 1);
}

TEST_CASE("operator norms are submultiplicative") {
    BernoulliMap dbl = preset_map("doubling");
    EvolutionOps ops(dbl, NoiseKernel::gaussian(1, 0.02), 512);
    DisOptions opt;
    const double n1 = operator_norm(ops, 1, opt);
    const double n2 = operator_norm(ops, 2, opt);
    const double n3 = operator_norm(ops, 3, opt);
    CHECK(n2 <= n1 * n1 + 1e-8);
    CHECK(n3 <= n1 * n2 + 1e-8);
}

TEST_CASE("two-level witness survives N steps") {
    BernoulliMap dbl = preset_map("doubling");
    const double eps = 1.0 / 1024.0;
    DisResult r = measure_tdis(dbl, NoiseKernel::ball_uniform(1, eps), eps, 0.5, 4096);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->N >= 1);
    CHECK(r.witness->ratio >= r.witness->required - 1e-9);
    CHECK(r.witness->ok);
    // the witness provides a valid lower-bound check against the measurement
    CHECK(r.witness->decay_time <= r.meas.t + 1);
}

TEST_CASE("ensemble histograms: determinism and the density crosscheck") {
    BernoulliMap dbl = preset_map("doubling");
    const double eps = 1.0 / 64.0;
    NoiseKernel kern = NoiseKernel::gaussian(1, eps);
    const int m = 1024, particles = 20000, steps = 10;
    auto trace = simulate_ensemble(dbl, kern, steps, particles, 99, m, {0.3});
    REQUIRE(static_cast<int>(trace.size()) == steps + 1);
    // step 0 is the start histogram: one loaded cell
    CHECK(trace[0].v[static_cast<std::size_t>(0.3 * m)] == doctest::Approx(m));
    CHECK(std::fabs(trace[0].mean() - 1.0) < 1e-9);

    auto again = simulate_ensemble(dbl, kern, steps, particles, 99, m, {0.3});
    for (int n = 0; n <= steps; ++n)
        for (std::size_t j = 0; j < trace[static_cast<std::size_t>(n)].size(); ++j)
            CHECK(trace[static_cast<std::size_t>(n)].v[j] ==
                  again[static_cast<std::size_t>(n)].v[j]);

    // density evolution from the same start, compared on a coarse grid
    EvolutionOps ops(dbl, kern, m);
    GridDensity f(1, m);
    f.v[static_cast<std::size_t>(0.3 * m)] = static_cast<double>(m);
    const int factor = m / 64;
    double worst = 0.0;
    GridDensity g = f;
    for (int n = 1; n <= steps; ++n) {
        g = ops.t_star(g);
        worst = std::max(worst, tv_between(coarsen(g, factor),
                                           coarsen(trace[static_cast<std::size_t>(n)], factor)));
    }
    CHECK(worst < 0.08); // 2e4 particles on 64 bins
}

TEST_CASE("random-walk variance grows linearly in the step count") {
    NoiseKernel kern = NoiseKernel::gaussian(1, 0.01);
    Rng rng(1234);
    const int n_traj = 4000;
    auto mean_sq = [&](int steps) {
        double acc = 0.0;
        for (int i = 0; i < n_traj; ++i) {
            double s = 0.0;
            for (int k = 0; k < steps; ++k) s += kern.sample(rng)[0];
            acc += s * s;
        }
        return acc / n_traj;
    };
    const double v8 = mean_sq(8), v32 = mean_sq(32);
    CHECK(v32 / v8 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(v8 == doctest::Approx(8.0 * 0.01 * 0.01).epsilon(0.15));
}

TEST_CASE("scaling fit recovers synthetic slopes and rejects thin data") {
    std::vector<std::pair<double, double>> pts;
    for (int k = 3; k <= 9; ++k)
        pts.emplace_back(std::pow(2.0, -k), 3.0 + k); // t = 3 + log2(1/eps)
    ScalingFit fit = fit_scaling_points(pts);
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.rms_residual < 1e-12);

    std::vector<std::pair<double, double>> few(pts.begin(), pts.begin() + 4);
    CHECK_THROWS_AS(fit_scaling_points(few), InsufficientDataError);
    std::vector<std::pair<double, double>> narrow{
        {0.1, 1}, {0.09, 1}, {0.08, 1}, {0.07, 1}, {0.06, 1}};
    CHECK_THROWS_AS(fit_scaling_points(narrow), InsufficientDataError);
}

TEST_CASE("soft indicators carry unit mass off the aligned lattice") {
    BernoulliMap intro = preset_map("intro3");
    GridDensity f = indicator_density_soft(intro, Tuple({1, 2}), 1000);
    CHECK(std::fabs(f.mean() - 1.0) < 1e-12);
    // support is contained in the cylinder box, up to one boundary cell
    CylinderSet c = intro.cylinder(Tuple({1, 2}));
    const double lo = to_double(c.origin[0]), hi = lo + to_double(c.sides[0]);
    for (int j = 0; j < 1000; ++j) {
        if (f.v[static_cast<std::size_t>(j)] > 0.0) {
            CHECK((j + 1) / 1000.0 >= lo - 1e-12);
            CHECK(j / 1000.0 <= hi + 1e-12);
        }
    }
}
