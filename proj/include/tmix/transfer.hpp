#pragma once

// Discrete evolution operators on grid densities.
//
// U* is the transfer (pushforward) operator of the map: for cell-average
// fields it is the exact Ulam matrix, with weights
//
//     W[out,in] = vol( phi_i^{-1}(cell_out) /\ cell_in ) / vol(cell_out)
//
// accumulated over branches i.  The weights are computed in exact rational
// arithmetic; rows sum to one exactly, so mass is conserved and evolving a
// field that carries the exact channel reproduces the shift identities
// bit for bit.  The backward (Koopman) operator is the transpose of the same
// matrix, which makes the duality <Tf, g> = <f, T*g> hold to rounding.
//
// The full chain step is  T* f = K_eps * U* f  and  T g = Pull (K_eps * g),
// with the convolution applied through a cached spectral multiplier.

#include <memory>
#include <vector>

#include "tmix/fftops.hpp"
#include "tmix/grid.hpp"
#include "tmix/kernels.hpp"
#include "tmix/maps.hpp"

namespace tmix {

class TransferOperator {
public:
    TransferOperator(const BernoulliMap& map, int m);

    int m() const { return m_; }
    int dim() const { return d_; }
    // False when some branch-cell boundary falls inside a grid cell; mass is
    // still conserved (the Ulam weights are exact), but indicator identities
    // are only meaningful on aligned grids.
    bool aligned() const { return aligned_; }

    GridDensity apply_U(const GridDensity& f) const;    // pushforward
    GridDensity apply_pull(const GridDensity& g) const; // Koopman (transpose)

private:
    void build_exact() const;

    int d_ = 1;
    int m_ = 0;
    bool aligned_ = true;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_;
    std::vector<double> w_;
    std::vector<std::size_t> trow_ptr_;
    std::vector<std::size_t> tcol_;
    std::vector<double> tw_;
    // exact weights, built lazily for fields that carry the exact channel
    mutable bool exact_built_ = false;
    mutable std::vector<Rat> wx_;
    const BernoulliMap* map_;
};

// Shared operator cache keyed by (map signature, m).
std::shared_ptr<const TransferOperator> transfer_for(const BernoulliMap& map, int m);

// Normalized indicator of the cylinder C_s on an aligned grid (exact values).
GridDensity indicator_density(const BernoulliMap& map, const Tuple& s, int m);

GridDensity pushforward_U(const BernoulliMap& map, const GridDensity& f);

// One Markov step on densities / observables.
GridDensity step_T_star(const TransferOperator& op, const SpectralMultiplier& noise,
                        const GridDensity& f);
GridDensity step_T(const TransferOperator& op, const SpectralMultiplier& noise,
                   const GridDensity& g);

// Convenience bundle for repeated stepping with one (map, kernel, m) triple.
struct EvolutionOps {
    std::shared_ptr<const TransferOperator> op;
    SpectralMultiplier noise;

    EvolutionOps(const BernoulliMap& map, const NoiseKernel& kernel, int m)
        : op(transfer_for(map, m)), noise(SpectralMultiplier::from_kernel(kernel.grid(m))) {}
    GridDensity t_star(const GridDensity& f) const { return step_T_star(*op, noise, f); }
    GridDensity t_back(const GridDensity& g) const { return step_T(*op, noise, g); }
};

} // namespace tmix
