#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tmix/spectral.hpp"

using namespace tmix;

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;
}

TEST_CASE("single-step damping factor") {
    // n=1, k=1, eps=0.1, N=2: exp(-2 pi^2 0.01)
    CHECK(std::exp(log_opnorm(2, 0.1, 1)) ==
          doctest::Approx(std::exp(-2.0 * kPi * kPi * 0.01)).epsilon(1e-14));
}

TEST_CASE("accumulated exponents match the geometric-sum oracle exactly") {
    for (int N : {2, 3, 5}) {
        for (int n : {1, 2, 3, 7, 20}) {
            // per-step sum built term by term
            BigInt sum = 0, pw = 1;
            for (int j = 0; j < n; ++j) {
                sum += pw * pw;
                pw *= N;
            }
            CHECK(damping_units(N, n, 1) == sum);
        }
    }
    // n=3, k=1, eps=0.01, N=2: exponent -2 pi^2 1e-4 * 21
    const double expo = -2.0 * kPi * kPi * 1e-4 * 21.0;
    CHECK(log_opnorm(2, 0.01, 3) == doctest::Approx(expo).epsilon(1e-14));
    CHECK(std::exp(expo) == doctest::Approx(0.9594).epsilon(1e-4));
}

TEST_CASE("ledger evolution: support divisibility and mean invariance") {
    ModeLedger g(2, 1, 0.01);
    g.seed({0}, {0.3, 0.0});
    g.seed({1}, {1.0, 0.0});
    g.seed({5}, {0.25, -0.5});
    for (int n = 1; n <= 6; ++n) {
        g.step();
        CHECK(g.support_divisible());
    }
    // the k=0 mode carries no damping
    CHECK(g.log_coefficient({0}) == doctest::Approx(std::log(0.3)).epsilon(1e-14));
    // mode (1): exponent = 2 pi^2 eps^2 (4^6-1)/3
    const double want = -2.0 * kPi * kPi * 1e-4 * ((4096.0 - 1.0) / 3.0);
    CHECK(g.log_coefficient({1}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("iterate_spectrum composes steps") {
    ModeLedger g(3, 2, 0.05);
    g.seed({1, -2}, {0.5, 0.5});
    ModeLedger h = iterate_spectrum(3, 2, 0.05, g, 4);
    CHECK(h.steps() == 4);
    // |k0|^2 = 5; exponent units 5 * (9^4 - 1)/8
    const double want = std::log(std::hypot(0.5, 0.5)) -
                        2.0 * kPi * kPi * 0.0025 * 5.0 * ((6561.0 - 1.0) / 8.0);
    CHECK(h.log_coefficient({1, -2}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("dissipation time from exact mode arithmetic") {
    // eps = 2^-8, delta = 1/2: within 2 steps of log2(1/eps) = 8
    const int t = spectral_tdis(2, 1, 1.0 / 256.0, 0.5);
    CHECK(t >= 6);
    CHECK(t <= 10);
    // exact crossing: smallest n with 2 pi^2 eps^2 (4^n-1)/3 >= ln 2
    int oracle = 0;
    for (int n = 1;; ++n) {
        const double e = 2.0 * kPi * kPi * std::pow(2.0, -16) * (std::pow(4.0, n) - 1.0) / 3.0;
        if (e >= std::log(2.0)) {
            oracle = n;
            break;
        }
    }
    CHECK(t == oracle);
}

TEST_CASE("decay report: envelope doubling and the closed-form time") {
    for (double eps : {1.0 / 64.0, 1.0 / 256.0, 1.0 / 1024.0}) {
        DecayReport rep = decay_check(2, 1, eps, 0.5);
        CHECK(rep.envelope_doubling);
        // |log norm| multiplies by at least N^2 per step (checked exactly)
        for (std::size_t i = 1; i < rep.rows.size(); ++i)
            CHECK(rep.rows[i].log_norm <= 4.0 * rep.rows[i - 1].log_norm * (1.0 - 1e-12) + 1e-9);
        // the exact time sits within a 2-step collar of the closed form
        CHECK(std::fabs(rep.tdis - rep.closed_form) <= 2.0);
        // the (N-1) variant over-damps: more negative exponents
        for (const auto& row : rep.rows) CHECK(row.alt_exponent <= row.log_norm + 1e-12);
    }
}

TEST_CASE("mean-zero norm from the ledger combines the surviving modes") {
    ModeLedger g(2, 1, 0.02);
    g.seed({1}, {1.0, 0.0});
    g.seed({3}, {0.5, 0.0});
    g.advance(3);
    const double a = g.log_coefficient({1});
    const double b = g.log_coefficient({3});
    const double want = 0.5 * std::log(std::exp(2.0 * a) + std::exp(2.0 * b));
    CHECK(g.log_l2_norm() == doctest::Approx(want).epsilon(1e-12));
    // and far out the small mode is gone entirely
    g.advance(4);
    CHECK(g.log_l2_norm() == doctest::Approx(g.log_coefficient({1})).epsilon(1e-9));
}
