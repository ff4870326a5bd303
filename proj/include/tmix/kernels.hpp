#pragma once

// Periodized noise densities K_eps on the torus.
//
// Every kernel is a base density rescaled by eps and periodized,
//
//     K_eps(x) = sum_n (1/eps^d) K((x+n)/eps) .
//
// Kinds:
//   Gaussian       base N(0, diag(cov)); Fourier exp(-2 pi^2 eps^2 k.cov.k)
//   BallUniform    uniform on the unit ball, support B(0, eps)
//   TensorTent     per-axis tent on [-1,1], support [-eps,eps]^d
//   TensorUniform  per-axis uniform on [-1/2,1/2], support [-eps/2,eps/2]^d
//   GridTabulated  arbitrary nonnegative grid, mass normalized
//
// Grids are cell averaged on cells centered at j/m (so symmetry K[j] = K[m-j]
// is bit-exact) and renormalized to exact unit mass.  Only diagonal Gaussian
// covariance is supported: invariance under the branch signed permutations
// already forces per-axis structure, and diagonal factors keep the cell
// averages exact (products of erf differences).

#include <optional>
#include <vector>

#include "tmix/grid.hpp"
#include "tmix/rng.hpp"

namespace tmix {

enum class KernelKind { Gaussian, BallUniform, TensorTent, TensorUniform, GridTabulated };

struct KernelStats {
    double first_moment = 0.0; // integral of d(y,0) K_eps(y)
    double bold_K = 0.0;       // eps^{d/2} ||K_eps||_L2
    double chi_tail = 0.0;     // sup over frequencies beyond c/eps of |K^(k)|
    double A = 0.0;            // per-axis first absolute moment of the base factor
    double A_lower = 0.0;      // per-axis int_0^{1/2} x k(x) dx of the base factor
    double kappa = 0.0;        // inf of the base density over [-eta, eta]^d
    bool tensor_factors = false;
    bool first_moment_leq_eps = false;
    bool chi_lt_1 = false;
};

class NoiseKernel {
public:
    static NoiseKernel gaussian(int d, double eps, std::vector<double> diag_cov = {});
    static NoiseKernel ball_uniform(int d, double eps);
    static NoiseKernel tensor_tent(int d, double eps);
    static NoiseKernel tensor_uniform(int d, double eps);
    static NoiseKernel tabulated(GridDensity values, double eps);

    KernelKind kind() const { return kind_; }
    int dim() const { return d_; }
    double eps() const { return eps_; }
    const std::vector<double>& diag_cov() const { return diag_; }

    // Cell-averaged grid; exact unit mass after averaging.
    GridDensity grid(int m) const;

    // Closed-form Fourier coefficient, when one exists.
    std::optional<double> closed_fourier(const std::vector<int>& k) const;
    // Closed form if available, otherwise a direct DFT of grid(fallback_m).
    double fourier(const std::vector<int>& k, int fallback_m = 0) const;

    // One displacement eps*zeta (unwrapped; callers reduce mod 1).
    std::vector<double> sample(Rng& rng) const;

    KernelStats stats(double c, double eta) const;

    // True when supp(K_eps) is contained in the closed eps-ball.
    bool compact_eps_support() const;

    std::string signature() const;

private:
    KernelKind kind_;
    int d_ = 1;
    double eps_ = 0.0;
    std::vector<double> diag_; // gaussian only
    GridDensity tab_;          // tabulated only
};

} // namespace tmix
