#pragma once

// Explicit constants and theoretical time bounds for a (map, kernel, eps,
// delta) tuple.  Everything here is closed-form arithmetic on map data:
//
//   C1            = 2d (2 + p_min^{-1/d})^{d-1}
//   Lambda_{p,d}  = 2d C1^{p-1} / (delta^p p_min^{1/d} (1 - p_max^{1/(pd)})^p)
//   B_{p,delta}   = delta / (4 Lambda_{p,delta/4} sqrt(d))
//   eta           = (2a)^{1/gamma}
//   N_mix         = ceil( d ln(eps eta) / ln p_max )
//
// plus the explicit witness integers for the mixing-time lower bound and the
// N/N1 pair of the dissipation upper bound.  Constants the source theory
// leaves non-explicit (the global C of the slope-form bounds, beta', the
// floor chi) are surfaced as measured/fit quantities, never hard-coded.

#include <optional>
#include <vector>

#include "tmix/bump.hpp"
#include "tmix/kernels.hpp"
#include "tmix/maps.hpp"

namespace tmix {

double constant_C1(const BernoulliMap& map);
double constant_Lambda(const BernoulliMap& map, int p, double delta);
double constant_B(const BernoulliMap& map, int p, double delta);
int mixing_depth_N(const BernoulliMap& map, double eps, double eta);

struct BoundReport {
    int d = 1;
    int p = 1;
    double delta = 0.5;
    double eps = 0.0;
    double p_min = 0.0, p_max = 0.0;

    double C1 = 0.0;
    double Lambda = 0.0;
    double B = 0.0;
    double a = 0.0, gamma = 0.0, eta = 0.0;
    int N_mix = 0;

    // slope of t vs ln(1/eps) (natural log); base-2 slopes are ln2 times these
    double tmix_slope = 0.0;       // d / |ln p_max|
    double tdis_lower_slope = 0.0; // d / |ln p_min|
    double tdis_upper_slope = 0.0; // d / |ln p_max|

    // explicit mixing-time witness: s = (argmax p)^N, tv >= delta at N - N1
    int witness_N = 0;
    int witness_N1 = 0;

    // explicit dissipation lower bound: min |s| over the Lambda_{2,1-delta} partition
    int tdis_lower_explicit = 0;

    // dissipation upper bound N + N1 + 1 from the frequency-splitting proof
    int dis_N = 0;
    int dis_N1 = 0;
    double chi = 0.0;          // sup_{|k| >= B/(2 pi eps)} |K^(k)|
    bool chi_condition_ok = false;
    std::optional<int> tdis_upper_explicit;

    // double-exponential regime formulas (uniformly expanding maps), C = 0 part
    std::optional<double> appendix_tmix;
    std::optional<double> appendix_tdis;
};

BoundReport structural_constants(const BernoulliMap& map, int p, double delta, double a,
                                 double gamma);

// Full report; kernel is used for chi and the eigen constants (a, gamma).
BoundReport theoretical_time_bounds(const BernoulliMap& map, const NoiseKernel& kernel,
                                    double eps, double delta);

struct DualityRow {
    double eps = 0.0;
    int tdis = 0;          // t_dis(delta)
    int tmix_quarter = 0;  // t_mix(delta^2/4)
    bool holds_forward = false; // tdis <= tmix_quarter + slack
    int tmix_dprime = 0;   // t_mix(delta')
    double rhs_backward = 0.0; // 2 + log_delta(delta' eps^{d/2} / K) * tdis
    bool holds_backward = false;
};

struct DualityReport {
    double delta = 0.5, delta_prime = 0.5;
    int slack_steps = 1;
    std::vector<DualityRow> rows;
    int violations = 0;
};

// Pointwise check of the two mixing/dissipation comparison inequalities on
// measured curves (same eps grid, in the same order).
DualityReport relate_tmix_tdis(const std::vector<double>& eps_grid,
                               const std::vector<int>& tdis_delta,
                               const std::vector<int>& tmix_quarter,
                               const std::vector<int>& tmix_dprime, double delta,
                               double delta_prime, double bold_K, int d, int slack_steps = 1);

} // namespace tmix
