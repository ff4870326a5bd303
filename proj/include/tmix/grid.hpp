#pragma once

// Densities on the torus T^d, stored as cell averages on a uniform m^d grid.
//
// Cells are half-open boxes [j/m,(j+1)/m) per axis.  A probability density
// has mean 1 (cell volume * sum of values = 1).  Signed fields reuse the same
// type; operations that need probability semantics assert them explicitly.
//
// Grids built from rational data optionally carry an exact rational copy of
// the values.  The exact channel is what makes the shift identities
// (U*^n I_s = I_{sigma^n s}) literally bit-exact: both sides are produced by
// the same rational arithmetic and converted to double once.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmix/errors.hpp"
#include "tmix/rational.hpp"

namespace tmix {

struct GridDensity {
    int d = 1;
    int m = 0;                       // cells per axis
    std::vector<double> v;           // m^d cell averages, row-major
    std::optional<RatVec> exact;     // present only on exact-arithmetic paths

    GridDensity() = default;
    GridDensity(int d_, int m_, double fill = 0.0)
        : d(d_), m(m_), v(cells(d_, m_), fill) {}

    static std::size_t cells(int d, int m) {
        std::size_t n = 1;
        for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(m);
        return n;
    }
    std::size_t size() const { return v.size(); }
    double cell_volume() const {
        double vol = 1.0;
        for (int i = 0; i < d; ++i) vol /= m;
        return vol;
    }

    // Flat index of a multi-index (row-major).
    std::size_t index(const std::vector<int>& ix) const {
        std::size_t f = 0;
        for (int a = 0; a < d; ++a) f = f * m + static_cast<std::size_t>(ix[a]);
        return f;
    }

    void drop_exact() { exact.reset(); }
    void sync_from_exact();          // v[i] = double(exact[i])

    double mean() const;             // (1/m^d) sum v
    double l1() const;               // integral of |f|
    double l2() const;               // L2 norm of f
    double tv_to_uniform() const;    // ||f - 1||_L1 / 2
    double l2_to_uniform() const;    // ||f - 1||_L2
    void subtract_mean();
};

// Distances bundle used by reports.
struct Distances {
    double tv = 0.0;
    double l2 = 0.0;
};
Distances distances(const GridDensity& f);

// CSV export: one "index,value" row per cell.  Binary dump: magic, d, m, raw
// little-endian doubles; both are regression-fixture formats.
void write_density_csv(const GridDensity& f, const std::string& path);
void write_density_binary(const GridDensity& f, const std::string& path);
GridDensity read_density_binary(const std::string& path);

} // namespace tmix
