#pragma once

// Mixing- and dissipation-time measurement.
//
// t_mix(delta): evolve a family of initial densities (single-cell deltas on
// an even lattice of start points, plus the repeated-heaviest-branch cylinder
// indicator) with T* and return the first step at which the worst total
// variation distance drops to delta.  The family maximum is a lower estimate
// of the true sup over initial laws and is labelled that way.
//
// t_dis(delta): power iteration for ||T*^n|| on mean-zero L2 (v <- T^n T*^n v),
// increasing n until the norm crosses delta.  The two-level piecewise witness
// provides the matching lower-bound check.

#include <cstdint>
#include <optional>
#include <vector>

#include "tmix/bounds.hpp"
#include "tmix/kernels.hpp"
#include "tmix/maps.hpp"
#include "tmix/transfer.hpp"

namespace tmix {

enum class Method { DensityWorstCase, PowerIteration, WitnessIs, WitnessF0, MonteCarlo };
const char* method_name(Method m);

struct TimeMeasurement {
    double eps = 0.0;
    double delta = 0.5;
    int t = 0;
    Method method = Method::DensityWorstCase;
    std::vector<double> residuals; // worst-case residual per step (index 0 = step 0)
    bool converged = true;
};

struct MixOptions {
    int n_starts = 32;
    bool include_witness = true;
    int horizon = 0; // 0: 8 * N_mix (or an O(1/eps^2) allowance for identity maps)
};

struct MixResult {
    TimeMeasurement worst;
    // Theorem-witness diagnostics (present when Lambda_{1,1-delta} eps < 1)
    std::optional<int> witness_N, witness_N1;
    std::optional<double> witness_tv_at_check; // tv at step N - N1, expected >= delta
    bool witness_ok = true;
};

MixResult measure_tmix(const BernoulliMap& map, const NoiseKernel& kernel, double eps,
                       double delta, int m, const MixOptions& opt = {});

struct DisOptions {
    int max_n = 0;            // 0: derived from the theory slope
    int power_rounds = 100;
    double power_tol = 1e-6;
    int power_seeds = 3;
    std::uint64_t seed = 20240101;
    bool run_witness = true;
};

struct WitnessF0Info {
    int N = 0;                  // min word length of the Lambda_{2,1-delta} partition
    double ratio = 0.0;         // ||T*^N f0|| / ||f0||
    double required = 0.0;      // 1 - delta'
    bool ok = false;
    int decay_time = 0;         // first n with mean-zero part below delta
};

struct DisResult {
    TimeMeasurement meas;       // residuals[n] = ||T*^n|| estimate
    bool stalled = false;       // some power iteration hit the round cap
    std::optional<WitnessF0Info> witness;
};

DisResult measure_tdis(const BernoulliMap& map, const NoiseKernel& kernel, double eps,
                       double delta, int m, const DisOptions& opt = {});

// ||T*^n|| on mean-zero fields by power iteration (max over seeds).
double operator_norm(const EvolutionOps& ops, int n, const DisOptions& opt = {});

// Particle simulation of X_{k+1} = phi(X_k) + eps zeta; returns per-step
// histograms on the m-grid (index 0 = initial histogram).
std::vector<GridDensity> simulate_ensemble(const BernoulliMap& map, const NoiseKernel& kernel,
                                           int n_steps, int n_particles, std::uint64_t seed,
                                           int m, const std::vector<double>& start_point = {});

struct ScalingFit {
    double slope = 0.0;      // steps per octave of 1/eps (t vs log2(1/eps))
    double intercept = 0.0;
    double rms_residual = 0.0;
    int points = 0;
};

ScalingFit fit_scaling(const std::vector<TimeMeasurement>& meas);
ScalingFit fit_scaling_points(const std::vector<std::pair<double, double>>& eps_t);

// Soft cylinder indicator: exact box, boundary cells get their covered
// fraction, so no grid alignment is required (mass is still exactly 1).
GridDensity indicator_density_soft(const BernoulliMap& map, const Tuple& s, int m);

// Two-level dissipation witness: 1 on {phi^N in E_1}, p1/p2 on {phi^N in E_2}.
GridDensity witness_two_level(const BernoulliMap& map, int N, int m);

} // namespace tmix
