#pragma once

// Exact Fourier-side evolution for the uniformly expanding map phi(x) = Nx.
//
// One backward step sends mode k to mode Nk with Gaussian damping:
//
//     (Tg)^(Nk) = K^_eps(k) g^(k),   K^_eps(k) = exp(-2 pi^2 eps^2 |k|^2),
//
// so after n steps a mode started at k0 sits at N^n k0 and carries the
// accumulated exponent 2 pi^2 eps^2 |k0|^2 (N^{2n}-1)/(N^2-1).  The integer
// part of the exponent is kept exactly (arbitrary-precision sum of N^{2j}
// terms); magnitudes live in log space because the decay is double
// exponential and underflows doubles almost immediately.

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "tmix/rational.hpp"

namespace tmix {

struct ModeEntry {
    std::complex<double> amp;   // initial coefficient g^(k0)
    std::vector<int> origin;    // k0
    BigInt expo_units;          // sum of |N^j k0|^2 over past steps
};

class ModeLedger {
public:
    ModeLedger(int N, int d, double eps);

    int expansion() const { return N_; }
    int dim() const { return d_; }
    int steps() const { return steps_; }
    double eps() const { return eps_; }

    void seed(const std::vector<int>& k, std::complex<double> amp);
    void step();                 // one application of T
    void advance(int n);

    // All current mode indices are divisible by N^steps (exact check).
    bool support_divisible() const;

    // ln of the L2 norm of the mean-zero part.
    double log_l2_norm() const;

    // ln |coefficient| at the current index of the mode started at k0.
    double log_coefficient(const std::vector<int>& k0) const;

    const std::map<std::vector<int>, ModeEntry>& modes() const { return modes_; }

private:
    int N_, d_, steps_ = 0;
    double eps_;
    std::map<std::vector<int>, ModeEntry> modes_; // keyed by current index
};

ModeLedger iterate_spectrum(int N, int d, double eps, const ModeLedger& g, int n);

// Exact accumulated exponent units after n steps for |k0|^2 = k2:
// k2 * (N^{2n} - 1)/(N^2 - 1).
BigInt damping_units(int N, int n, const BigInt& k2);

// ln ||T^n|| on mean-zero L2 (sup over k != 0, attained at |k| = 1).
double log_opnorm(int N, double eps, int n);

// First n with ||T^n|| <= delta.
int spectral_tdis(int N, int d, double eps, double delta, int horizon = 4096);

struct DecayRow {
    int n = 0;
    double log_norm = 0.0;        // ln ||T^n||
    double log_tv_envelope = 0.0; // ln( bold_K eps^{-d/2} ||T^n|| )
    double alt_exponent = 0.0;    // same mode exponent with the (N-1) denominator
};

struct DecayReport {
    int N = 2, d = 1;
    double eps = 0.0, delta = 0.5;
    std::vector<DecayRow> rows;
    int tdis = 0;
    double closed_form = 0.0;   // |log_N eps| + (1/2) log_N |ln delta|
    bool envelope_doubling = false; // |log norm| ratio >= N^2 per step
};

DecayReport decay_check(int N, int d, double eps, double delta, int horizon = 4096);

} // namespace tmix
