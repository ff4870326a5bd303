#pragma once

// Bump families supported on cylinder sets.
//
// The base profile F_0 is a separable unit-mass bump on (0,1)^d, either
// prod (pi/2) sin(pi x_a) or prod 4 tent(x_a).  The cylinder bump F_s is
// F_0 composed with the word map of s, scaled to unit mass:
//
//     F_s = (1/pi(C_s)) 1_{C_s} F_0 o phi^{|s|} .
//
// On cube-cylinder maps the word map restricted to C_s is a single affine
// map (signed permutation, scalar expansion lambda_s, shift), so F_s factors
// per axis and cell averages are antiderivative differences: grid renderings
// here are quadrature-free, and the analytic pushforward rendering of U* F_s
// makes the shift law testable at machine precision.
//
// The convolution inequality being certified:  K_eps * F_0 >= (1 - a eps^gamma) F_0
// with gamma = 2, a = pi^2 d / 2 for the standard Gaussian + sine profile,
// and gamma = 1, a = 4 * sum_axes int |y| k_axis(y) dy for tent profiles with
// tensor-factor kernels.

#include <optional>
#include <vector>

#include "tmix/kernels.hpp"
#include "tmix/maps.hpp"
#include "tmix/transfer.hpp"

namespace tmix {

enum class BumpKind { SineProduct, TentProduct };

// Theoretical (a, gamma) for the profile/kernel pair; throws UnsupportedError
// for pairs without an explicit constant.
struct EigenTheory {
    double a = 0.0;
    double gamma = 0.0;
    double eta() const { return std::pow(2.0 * a, 1.0 / gamma); }
};
EigenTheory eigen_theory(const NoiseKernel& kernel, BumpKind kind);

// exp(-2 ln 2 / (2a (1 - p_max^{gamma/d})))
double envelope_beta(const BernoulliMap& map, const EigenTheory& th);

GridDensity build_F0(BumpKind kind, int d, int m);
GridDensity build_Fs(const BernoulliMap& map, const Tuple& s, BumpKind kind, int m);
// Exact cell averages of U* F_s (analytic branch-preimage integration).
GridDensity pushforward_Fs_exact(const BernoulliMap& map, const Tuple& s, BumpKind kind, int m);

struct EigenCertificate {
    double a = 0.0, gamma = 0.0, eta = 0.0;
    std::optional<double> beta; // filled when a map is supplied
    struct Entry {
        double eps = 0.0;
        double bound = 0.0;     // 1 - a eps^gamma
        double min_ratio = 0.0; // min over supp of (K*F0)/F0
        double margin = 0.0;    // min_ratio - bound
        std::size_t worst_cell = 0;
        bool ok = false;
    };
    std::vector<Entry> entries;
    bool all_ok = true;
};

// Certifies the convolution inequality on a grid of size m; cells with
// F0 below `support_threshold` times the peak are excluded from the ratio.
EigenCertificate verify_eigen_inequality(const NoiseKernel& kernel, BumpKind kind,
                                         const std::vector<double>& eps_list, int m,
                                         const BernoulliMap* map = nullptr,
                                         double tolerance = 1e-3,
                                         double support_threshold = 1e-6);

struct PersistenceReport {
    double beta = 0.0;
    double eta_eps = 0.0;  // eta * eps (hypothesis needs ell_s >= this)
    double ell_s = 0.0;
    bool hypothesis_ok = false;
    struct Step {
        int n = 0;
        double min_ratio = 0.0;   // vs F_{sigma^n s}, for n <= |s|
        double product_bound = 0.0;
        double min_value = 0.0;   // global min, for n > |s|
        bool ok = false;
    };
    std::vector<Step> steps;
    double beta_prime_measured = 0.0; // min after step |s|+1
    bool all_ok = true;
};

PersistenceReport verify_envelope_persistence(const BernoulliMap& map, const NoiseKernel& kernel,
                                              const Tuple& s, BumpKind kind, int m,
                                              double tolerance = 2e-2,
                                              double support_threshold = 1e-6);

} // namespace tmix
