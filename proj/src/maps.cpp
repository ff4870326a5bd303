#include "tmix/maps.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "tmix/errors.hpp"

namespace tmix {

SignedPerm SignedPerm::identity(int d) {
    SignedPerm sp;
    sp.perm.resize(d);
    sp.sign.assign(d, 1);
    for (int i = 0; i < d; ++i) sp.perm[i] = i;
    return sp;
}

SignedPerm SignedPerm::from_matrix(const std::vector<std::vector<int>>& mat) {
    const int d = static_cast<int>(mat.size());
    SignedPerm sp;
    sp.perm.assign(d, -1);
    sp.sign.assign(d, 0);
    std::vector<int> col_used(d, 0);
    for (int r = 0; r < d; ++r) {
        if (static_cast<int>(mat[r].size()) != d)
            throw ConfigError("branch matrix D is not square");
        for (int c = 0; c < d; ++c) {
            int e = mat[r][c];
            if (e == 0) continue;
            if (e != 1 && e != -1)
                throw ConfigError("branch matrix D has an entry outside {-1,0,1}");
            if (sp.perm[r] != -1)
                throw ConfigError("branch matrix D has two nonzeros in a row");
            sp.perm[r] = c;
            sp.sign[r] = e;
            col_used[c]++;
        }
        if (sp.perm[r] == -1) throw ConfigError("branch matrix D has an all-zero row");
    }
    for (int c = 0; c < d; ++c)
        if (col_used[c] != 1) throw ConfigError("branch matrix D is not a signed permutation");
    return sp;
}

std::vector<std::vector<int>> SignedPerm::to_matrix() const {
    const int d = static_cast<int>(perm.size());
    std::vector<std::vector<int>> mat(d, std::vector<int>(d, 0));
    for (int r = 0; r < d; ++r) mat[r][perm[r]] = sign[r];
    return mat;
}

Rat BranchCell::measure() const {
    Rat v = 1;
    for (const Rat& s : sides) v *= s;
    return v;
}

bool BranchCell::is_cube() const {
    for (std::size_t i = 1; i < sides.size(); ++i)
        if (sides[i] != sides[0]) return false;
    return true;
}

void AffineBranch::image_interval(int axis, Rat& lo, Rat& hi) const {
    const int c = D.perm[axis];
    const Rat a = cell.origin[c] / cell.sides[c];
    const Rat b = a + 1; // (origin + side) / side
    if (D.sign[axis] > 0) {
        lo = a + offset[axis];
        hi = b + offset[axis];
    } else {
        lo = offset[axis] - b;
        hi = offset[axis] - a;
    }
}

Tuple Tuple::shifted(int n) const {
    if (n >= length()) return Tuple{};
    return Tuple(std::vector<int>(word.begin() + n, word.end()));
}

Tuple Tuple::prepended(int symbol) const {
    std::vector<int> w;
    w.reserve(word.size() + 1);
    w.push_back(symbol);
    w.insert(w.end(), word.begin(), word.end());
    return Tuple(std::move(w));
}

Tuple Tuple::appended(int symbol) const {
    std::vector<int> w = word;
    w.push_back(symbol);
    return Tuple(std::move(w));
}

std::string Tuple::str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) os << ",";
        os << word[i];
    }
    os << ")";
    return os.str();
}

bool CylinderSet::is_cube() const {
    for (std::size_t i = 1; i < sides.size(); ++i)
        if (sides[i] != sides[0]) return false;
    return true;
}

Rat CylinderSet::measure() const {
    Rat v = 1;
    for (const Rat& s : sides) v *= s;
    return v;
}

Rat CylinderSet::side() const {
    if (!is_cube()) throw NonCubeError("cylinder " + tuple.str() + " is not a cube");
    return sides[0];
}

Rat CylinderSet::perimeter_over_volume() const {
    // Per(box) = 2 * sum_i prod_{j != i} side_j, so Per/vol = 2 * sum_i 1/side_i.
    Rat s = 0;
    for (const Rat& side : sides) s += 1 / side;
    return 2 * s;
}

void ValidationReport::throw_if_invalid() const {
    if (!cells_disjoint) throw OverlapError("branch cells overlap: " + detail);
    if (!cells_cover) throw CoverageError("branch cells do not tile [0,1)^d: " + detail);
    if (!branches_bijective)
        throw CoverageError("a branch is not a bijection onto [0,1)^d: " + detail);
    if (!boundary_covered) throw BoundaryError("torus boundary has no interior preimage");
    if (!cylinders_cubes)
        throw NonCubeError("cylinder " + (first_noncube ? first_noncube->str() : "?") +
                           " is not an axis-aligned cube");
}

BernoulliMap::BernoulliMap(int d, std::vector<AffineBranch> branches)
    : d_(d), branches_(std::move(branches)) {
    if (d_ < 1) throw ConfigError("map dimension must be >= 1");
    if (branches_.empty()) throw ConfigError("map needs at least one branch");
    cell_den_ = 1;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        AffineBranch& b = branches_[i];
        b.cell.index = static_cast<int>(i) + 1;
        auto check_dim = [&](std::size_t n, const char* what) {
            if (static_cast<int>(n) != d_)
                throw ConfigError(std::string("branch ") + std::to_string(i + 1) + ": " + what +
                                  " has wrong dimension");
        };
        check_dim(b.cell.origin.size(), "origin");
        check_dim(b.cell.sides.size(), "side");
        check_dim(b.offset.size(), "offset");
        check_dim(b.D.perm.size(), "D");
        for (int a = 0; a < d_; ++a) {
            if (b.cell.sides[a] <= 0) throw ConfigError("branch cell side must be positive");
            if (b.cell.origin[a] < 0 || b.cell.origin[a] + b.cell.sides[a] > 1)
                throw ConfigError("branch cell must lie inside [0,1)^d");
            cell_den_ = lcm(cell_den_, denominator(b.cell.origin[a]));
            cell_den_ = lcm(cell_den_, denominator(b.cell.origin[a] + b.cell.sides[a]));
        }
        p_.push_back(b.cell.measure());
    }
    p_min_ = p_[0];
    p_max_ = p_[0];
    for (const Rat& pi : p_) {
        p_min_ = std::min(p_min_, pi);
        p_max_ = std::max(p_max_, pi);
    }

    std::ostringstream sig;
    sig << "d=" << d_ << ";";
    for (const AffineBranch& b : branches_) {
        sig << "[";
        for (int a = 0; a < d_; ++a)
            sig << rat_to_string(b.cell.origin[a]) << "+" << rat_to_string(b.cell.sides[a]) << ",";
        sig << "|";
        for (int a = 0; a < d_; ++a) sig << b.D.perm[a] * b.D.sign[a] << ",";
        sig << "|";
        for (int a = 0; a < d_; ++a) sig << rat_to_string(b.offset[a]) << ",";
        sig << "]";
    }
    signature_ = sig.str();

    fast_.resize(branches_.size());
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const AffineBranch& b = branches_[i];
        FastBranch& f = fast_[i];
        f.lo.resize(d_);
        f.hi.resize(d_);
        f.scale.resize(d_);
        f.shift.resize(d_);
        f.perm = b.D.perm;
        f.sign = b.D.sign;
        for (int a = 0; a < d_; ++a) {
            f.lo[a] = to_double(b.cell.origin[a]);
            f.hi[a] = to_double(b.cell.origin[a] + b.cell.sides[a]);
            f.scale[a] = b.D.sign[a] / to_double(b.cell.sides[b.D.perm[a]]);
            f.shift[a] = to_double(b.offset[a]);
        }
    }
}

const AffineBranch& BernoulliMap::branch(int i1) const {
    if (i1 < 1 || i1 > branch_count())
        throw IndexError("branch index " + std::to_string(i1) + " out of range");
    return branches_[static_cast<std::size_t>(i1 - 1)];
}

const Rat& BernoulliMap::p(int i1) const {
    if (i1 < 1 || i1 > branch_count())
        throw IndexError("branch index " + std::to_string(i1) + " out of range");
    return p_[static_cast<std::size_t>(i1 - 1)];
}

int BernoulliMap::branch_of(const std::vector<double>& x) const {
    for (std::size_t i = 0; i < fast_.size(); ++i) {
        const FastBranch& f = fast_[i];
        bool in = true;
        for (int a = 0; a < d_; ++a) {
            if (x[a] < f.lo[a] || x[a] >= f.hi[a]) {
                in = false;
                break;
            }
        }
        if (in) return static_cast<int>(i) + 1;
    }
    // Rounding of rational bounds can strand a point exactly on a seam; snap
    // to the nearest cell by ignoring the upper bound once.
    for (std::size_t i = 0; i < fast_.size(); ++i) {
        const FastBranch& f = fast_[i];
        bool in = true;
        for (int a = 0; a < d_; ++a)
            if (x[a] < f.lo[a] || x[a] > f.hi[a]) { in = false; break; }
        if (in) return static_cast<int>(i) + 1;
    }
    throw DomainError("point not covered by any branch cell");
}

std::vector<double> BernoulliMap::apply(const std::vector<double>& x) const {
    std::vector<double> xw(x);
    for (int a = 0; a < d_; ++a) xw[a] -= std::floor(xw[a]);
    const FastBranch& f = fast_[static_cast<std::size_t>(branch_of(xw) - 1)];
    std::vector<double> y(d_);
    for (int a = 0; a < d_; ++a) {
        double t = xw[f.perm[a]] * f.scale[a] + f.shift[a];
        t -= std::floor(t);
        if (t >= 1.0) t = 0.0; // floor rounding guard
        y[a] = t;
    }
    return y;
}

namespace {

struct Box {
    RatVec lo, hi;
};

// Exact preimage of an axis-aligned box under one branch, intersected with
// the branch cell.  Empty result is signalled by lo >= hi on some axis.
Box branch_preimage(const AffineBranch& b, const Box& box, int d) {
    Box pre;
    pre.lo.resize(d);
    pre.hi.resize(d);
    for (int r = 0; r < d; ++r) {
        const int c = b.D.perm[r];
        const Rat& s = b.cell.sides[c];
        Rat a1 = (box.lo[r] - b.offset[r]) * s;
        Rat a2 = (box.hi[r] - b.offset[r]) * s;
        if (b.D.sign[r] < 0) {
            a1 = -a1;
            a2 = -a2;
            std::swap(a1, a2);
        }
        pre.lo[c] = std::max(a1, b.cell.origin[c]);
        pre.hi[c] = std::min(a2, b.cell.origin[c] + s);
    }
    return pre;
}

bool box_empty(const Box& b) {
    for (std::size_t a = 0; a < b.lo.size(); ++a)
        if (b.lo[a] >= b.hi[a]) return true;
    return false;
}

} // namespace

CylinderSet BernoulliMap::cylinder(const Tuple& s) const {
    Box box;
    box.lo.assign(d_, Rat(0));
    box.hi.assign(d_, Rat(1));
    for (int k = s.length() - 1; k >= 0; --k) {
        const AffineBranch& b = branch(s.word[static_cast<std::size_t>(k)]);
        box = branch_preimage(b, box, d_);
        if (box_empty(box)) throw DomainError("cylinder " + s.str() + " is empty");
    }
    CylinderSet c;
    c.tuple = s;
    c.origin = box.lo;
    c.sides.resize(d_);
    for (int a = 0; a < d_; ++a) c.sides[a] = box.hi[a] - box.lo[a];
    return c;
}

std::vector<CylinderSet> BernoulliMap::enumerate_partition(double lam_eps, int max_depth) const {
    if (!(lam_eps > 0.0 && lam_eps < 1.0))
        throw DomainError("enumerate_partition: lam_eps must be in (0,1)");
    if (p_max_ >= 1) throw DomainError("enumerate_partition: map is not expanding");

    std::vector<CylinderSet> out;
    // Refine C_t into { C_{(j) t} } while ell_t > lam_eps; every kept cylinder
    // then satisfies ell_s <= lam_eps < ell_{sigma s}.
    struct Node {
        CylinderSet cyl;
    };
    std::deque<Node> work;
    CylinderSet root;
    root.origin.assign(d_, Rat(0));
    root.sides.assign(d_, Rat(1));
    work.push_back({root});
    while (!work.empty()) {
        Node n = std::move(work.front());
        work.pop_front();
        if (n.cyl.tuple.length() > max_depth)
            throw DepthError("enumerate_partition exceeded safety depth " +
                             std::to_string(max_depth));
        for (int j = 1; j <= branch_count(); ++j) {
            Tuple child = n.cyl.tuple.prepended(j);
            CylinderSet c = cylinder(child);
            if (to_double(c.side()) <= lam_eps) out.push_back(std::move(c));
            else work.push_back({std::move(c)});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const CylinderSet& a, const CylinderSet& b) { return a.tuple < b.tuple; });
    return out;
}

ValidationReport BernoulliMap::validate(int depth) const {
    ValidationReport rep;
    rep.depth = depth;
    rep.p_min = p_min_d();
    rep.p_max = p_max_d();

    // (1) each branch maps its cell exactly onto [0,1]^d
    rep.branches_bijective = true;
    for (const AffineBranch& b : branches_) {
        for (int r = 0; r < d_; ++r) {
            Rat lo, hi;
            b.image_interval(r, lo, hi);
            if (lo != 0 || hi != 1) {
                rep.branches_bijective = false;
                rep.detail = "branch " + std::to_string(b.cell.index) + " image on axis " +
                             std::to_string(r) + " is [" + rat_to_string(lo) + "," +
                             rat_to_string(hi) + "]";
            }
        }
    }

    // cells pairwise disjoint and total measure 1
    rep.cells_disjoint = true;
    for (std::size_t i = 0; i < branches_.size() && rep.cells_disjoint; ++i) {
        for (std::size_t j = i + 1; j < branches_.size(); ++j) {
            bool overlap = true;
            for (int a = 0; a < d_; ++a) {
                const Rat lo = std::max(branches_[i].cell.origin[a], branches_[j].cell.origin[a]);
                const Rat hi =
                    std::min(branches_[i].cell.origin[a] + branches_[i].cell.sides[a],
                             branches_[j].cell.origin[a] + branches_[j].cell.sides[a]);
                if (lo >= hi) {
                    overlap = false;
                    break;
                }
            }
            if (overlap) {
                rep.cells_disjoint = false;
                rep.detail = "cells " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                             " overlap";
                break;
            }
        }
    }
    Rat total = 0;
    for (const Rat& pi : p_) total += pi;
    rep.cells_cover = rep.cells_disjoint && (total == 1);
    if (total != 1) rep.detail = "cell measures sum to " + rat_to_string(total);

    // (2) every torus boundary face (of every codimension) has an interior
    // preimage under some branch.  Branch i provides one for the face set Q
    // iff for each axis q in Q the cell face on input axis perm[q] sits
    // strictly inside (0,1).
    rep.boundary_covered = true;
    for (unsigned mask = 1; mask < (1u << d_); ++mask) {
        bool covered = false;
        for (const AffineBranch& b : branches_) {
            bool all_ok = true;
            for (int q = 0; q < d_; ++q) {
                if (!(mask & (1u << q))) continue;
                const int c = b.D.perm[q];
                const bool lo_interior = b.cell.origin[c] > 0;
                const bool hi_interior = b.cell.origin[c] + b.cell.sides[c] < 1;
                if (!lo_interior && !hi_interior) {
                    all_ok = false;
                    break;
                }
            }
            if (all_ok) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            rep.boundary_covered = false;
            break;
        }
    }

    // (3) cylinders up to the requested depth are cubes.  Levels are built by
    // prepending symbols, so each box is one exact preimage of its parent.
    rep.cylinders_cubes = true;
    if (rep.branches_bijective && rep.cells_cover) {
        std::vector<CylinderSet> level;
        CylinderSet root;
        root.origin.assign(d_, Rat(0));
        root.sides.assign(d_, Rat(1));
        level.push_back(root);
        for (int L = 1; L <= depth && rep.cylinders_cubes; ++L) {
            std::vector<CylinderSet> next;
            next.reserve(level.size() * branches_.size());
            for (const CylinderSet& parent : level) {
                for (int j = 1; j <= branch_count(); ++j) {
                    CylinderSet c = cylinder(parent.tuple.prepended(j));
                    if (!c.is_cube()) {
                        rep.cylinders_cubes = false;
                        rep.first_noncube = c.tuple;
                        break;
                    }
                    next.push_back(std::move(c));
                }
                if (!rep.cylinders_cubes) break;
            }
            level = std::move(next);
        }
    } else {
        rep.cylinders_cubes = false;
    }
    return rep;
}

double perimeter_volume_H(const std::vector<CylinderSet>& partition) {
    double h = 0.0;
    for (const CylinderSet& c : partition) {
        if (c.tuple.empty()) continue;
        h = std::max(h, to_double(c.perimeter_over_volume()));
    }
    return h;
}

std::vector<Tuple> shifted_tuples(const std::vector<CylinderSet>& partition, int n) {
    std::set<Tuple> seen;
    for (const CylinderSet& c : partition) seen.insert(c.tuple.shifted(n));
    return std::vector<Tuple>(seen.begin(), seen.end());
}

double perimeter_volume_H(const BernoulliMap& map, const std::vector<Tuple>& tuples) {
    double h = 0.0;
    for (const Tuple& t : tuples) {
        if (t.empty()) continue;
        h = std::max(h, to_double(map.cylinder(t).perimeter_over_volume()));
    }
    return h;
}

} // namespace tmix
