#pragma once

// Piecewise affine expanding Bernoulli maps on the torus [0,1)^d.
//
// A map is a list of branches.  Branch i owns a half-open axis-aligned box
// E_i (an interval when d = 1) and maps it onto the fundamental domain by
//
//     y_r = sign_r * x_{perm_r} / side_{perm_r} + e_r ,
//
// i.e. a signed permutation composed with per-axis scaling and a shift.  For
// the admissible (conformal) maps all sides of a cell are equal, the scaling
// is p_i^{-1/d}, and every cylinder set is a cube.  Rectangular cells are
// still representable so that validation can reject them with a concrete
// witness instead of refusing to parse.
//
// All geometry is exact: origins, sides and offsets are arbitrary-precision
// rationals, so partition identities (sides multiply, measures sum to 1)
// hold exactly and indicator evolution can be tested bit for bit.

#include <optional>
#include <string>
#include <vector>

#include "tmix/rational.hpp"

namespace tmix {

// Signed permutation: output axis r reads input axis perm[r] with sign[r].
struct SignedPerm {
    std::vector<int> perm;
    std::vector<int> sign; // +1 or -1

    static SignedPerm identity(int d);
    // Validates an integer matrix and converts it; throws ConfigError if the
    // matrix is not a signed permutation.
    static SignedPerm from_matrix(const std::vector<std::vector<int>>& mat);
    std::vector<std::vector<int>> to_matrix() const;
};

struct BranchCell {
    RatVec origin;
    RatVec sides;    // all equal for admissible maps
    int index = 0;   // 1-based

    Rat measure() const;
    bool is_cube() const;
};

struct AffineBranch {
    BranchCell cell;
    SignedPerm D;
    RatVec offset;   // the shift e_i

    // Exact image of the cell closure under the branch map, per output axis:
    // [lo_r, hi_r].  A valid branch has lo = 0, hi = 1 on every axis.
    void image_interval(int axis, Rat& lo, Rat& hi) const;
};

// Finite branch-index word; symbols are 1-based.  The empty word is the root
// tuple (whole torus) and is its own shift.
struct Tuple {
    std::vector<int> word;

    Tuple() = default;
    explicit Tuple(std::vector<int> w) : word(std::move(w)) {}
    int length() const { return static_cast<int>(word.size()); }
    bool empty() const { return word.empty(); }
    Tuple shifted(int n = 1) const; // sigma^n: drop n leading symbols
    Tuple prepended(int symbol) const;
    Tuple appended(int symbol) const;
    bool operator==(const Tuple& o) const { return word == o.word; }
    bool operator<(const Tuple& o) const { return word < o.word; }
    std::string str() const;
};

struct CylinderSet {
    Tuple tuple;
    RatVec origin;
    RatVec sides;

    bool is_cube() const;
    Rat measure() const;       // product of sides
    Rat side() const;          // requires cube
    double ell() const { return to_double(side()); }
    double lambda() const { return 1.0 / ell(); }
    // Perimeter / volume; equals 2d/ell for cubes.
    Rat perimeter_over_volume() const;
};

struct ValidationReport {
    bool branches_bijective = false;
    bool cells_disjoint = false;
    bool cells_cover = false;
    bool boundary_covered = false;
    bool cylinders_cubes = false;
    std::optional<Tuple> first_noncube;
    std::string detail;
    int depth = 0;
    double p_min = 0.0, p_max = 0.0;

    bool ok() const {
        return branches_bijective && cells_disjoint && cells_cover && boundary_covered &&
               cylinders_cubes;
    }
    // Rethrows the first failure as its typed error (OverlapError, ...).
    void throw_if_invalid() const;
};

class BernoulliMap {
public:
    BernoulliMap(int d, std::vector<AffineBranch> branches);

    int dim() const { return d_; }
    int branch_count() const { return static_cast<int>(branches_.size()); }
    const AffineBranch& branch(int i1) const; // 1-based, throws IndexError
    const std::vector<AffineBranch>& branches() const { return branches_; }

    const Rat& p(int i1) const;
    const Rat& p_min() const { return p_min_; }
    const Rat& p_max() const { return p_max_; }
    double p_min_d() const { return to_double(p_min_); }
    double p_max_d() const { return to_double(p_max_); }
    // Common denominator of all cell boundaries; grids with m a multiple of
    // this resolve every branch cell exactly.
    const BigInt& cell_denominator() const { return cell_den_; }

    // Branch index (1-based) of the half-open cell containing x in [0,1)^d.
    int branch_of(const std::vector<double>& x) const;
    // One application of the map; x is wrapped into [0,1)^d first.
    std::vector<double> apply(const std::vector<double>& x) const;

    CylinderSet cylinder(const Tuple& s) const;

    // The unique antichain partition { s : ell_s <= lam_eps < ell_{sigma s} },
    // built by refining C_t into { C_{(j) t} : j } while ell_t > lam_eps.
    std::vector<CylinderSet> enumerate_partition(double lam_eps, int max_depth = 64) const;

    ValidationReport validate(int depth) const;

    // Stable content string, used as a cache key by the transfer operators.
    const std::string& signature() const { return signature_; }

private:
    int d_;
    std::vector<AffineBranch> branches_;
    std::vector<Rat> p_;
    Rat p_min_, p_max_;
    BigInt cell_den_;
    std::string signature_;
    // double shadows of the cell bounds and branch coefficients for hot paths
    struct FastBranch {
        std::vector<double> lo, hi, scale, shift;
        std::vector<int> perm, sign;
    };
    std::vector<FastBranch> fast_;
};

// Max over non-root cylinders of Per(C_s)/pi(C_s); 0 for { root }.
double perimeter_volume_H(const std::vector<CylinderSet>& partition);

// Applies sigma^n to every tuple of a partition and dedupes; used for the
// H(sigma^n S) sums in the leakage bounds.
std::vector<Tuple> shifted_tuples(const std::vector<CylinderSet>& partition, int n);
double perimeter_volume_H(const BernoulliMap& map, const std::vector<Tuple>& tuples);

} // namespace tmix
