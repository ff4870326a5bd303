#include "tmix/transfer.hpp"

#include <map>
#include <mutex>

#include "tmix/errors.hpp"

namespace tmix {

namespace {

// Per-axis exact overlap of an interval [lo,hi] with the grid cells of width
// 1/m: invokes cb(j, overlap_length) for every cell j with positive overlap.
template <class Cb>
void axis_overlaps(const Rat& lo, const Rat& hi, int m, Cb cb) {
    const Rat lom = lo * m, him = hi * m;
    long long jlo = rat_floor(lom).convert_to<long long>();
    for (long long j = jlo;; ++j) {
        Rat cell_lo = Rat(j, m), cell_hi = Rat(j + 1, m);
        Rat a = std::max(lo, cell_lo), b = std::min(hi, cell_hi);
        if (b <= a) {
            if (Rat(j, 1) >= him) break;
            continue;
        }
        cb(static_cast<int>(j), b - a);
        if (cell_hi >= hi) break;
    }
}

// Enumerates the exact Ulam entries: cb(out_flat, in_flat, weight) with
// weight = vol(branch preimage of cell_out /\ cell_in) / vol(cell_out).
template <class Cb>
void for_each_entry(const BernoulliMap& map, int m, Cb cb) {
    const int d = map.dim();
    const std::size_t cells = GridDensity::cells(d, m);
    std::vector<int> out_ix(static_cast<std::size_t>(d), 0);
    // per-axis overlap lists, rebuilt per output cell and branch
    struct Hit {
        int j;
        Rat len;
    };
    std::vector<std::vector<Hit>> hits(static_cast<std::size_t>(d));

    for (std::size_t out = 0; out < cells; ++out) {
        // decode multi-index
        std::size_t rem = out;
        for (int a = d - 1; a >= 0; --a) {
            out_ix[static_cast<std::size_t>(a)] = static_cast<int>(rem % m);
            rem /= m;
        }
        for (int bi = 1; bi <= map.branch_count(); ++bi) {
            const AffineBranch& b = map.branch(bi);
            bool empty = false;
            for (int r = 0; r < d && !empty; ++r) {
                const int c = b.D.perm[r];
                const Rat& s = b.cell.sides[c];
                Rat ylo = Rat(out_ix[static_cast<std::size_t>(r)], m);
                Rat yhi = Rat(out_ix[static_cast<std::size_t>(r)] + 1, m);
                Rat a1 = (ylo - b.offset[r]) * s;
                Rat a2 = (yhi - b.offset[r]) * s;
                if (b.D.sign[r] < 0) {
                    a1 = -a1;
                    a2 = -a2;
                    std::swap(a1, a2);
                }
                // clamp to the branch cell
                Rat lo = std::max(a1, b.cell.origin[c]);
                Rat hi = std::min(a2, b.cell.origin[c] + s);
                if (hi <= lo) {
                    empty = true;
                    break;
                }
                hits[static_cast<std::size_t>(c)].clear();
                axis_overlaps(lo, hi, m, [&](int j, const Rat& len) {
                    hits[static_cast<std::size_t>(c)].push_back({j, len});
                });
            }
            if (empty) continue;
            // tensor product of the per-axis hit lists
            std::vector<std::size_t> pick(static_cast<std::size_t>(d), 0);
            for (;;) {
                Rat w = 1;
                std::size_t in = 0;
                for (int a = 0; a < d; ++a) {
                    const Hit& h = hits[static_cast<std::size_t>(a)][pick[static_cast<std::size_t>(a)]];
                    w *= h.len;
                    in = in * static_cast<std::size_t>(m) + static_cast<std::size_t>(h.j);
                }
                // divide by vol(cell_out) = m^-d
                for (int a = 0; a < d; ++a) w *= m;
                cb(out, in, w);
                int a = d - 1;
                for (; a >= 0; --a) {
                    if (++pick[static_cast<std::size_t>(a)] <
                        hits[static_cast<std::size_t>(a)].size())
                        break;
                    pick[static_cast<std::size_t>(a)] = 0;
                }
                if (a < 0) break;
            }
        }
    }
}

} // namespace

TransferOperator::TransferOperator(const BernoulliMap& map, int m) : d_(map.dim()), m_(m), map_(&map) {
    const std::size_t cells = GridDensity::cells(d_, m_);
    // alignment: every branch-cell boundary must be a grid line
    for (const AffineBranch& b : map.branches()) {
        for (int a = 0; a < d_; ++a) {
            if (!is_integer(b.cell.origin[a] * m_) ||
                !is_integer((b.cell.origin[a] + b.cell.sides[a]) * m_))
                aligned_ = false;
        }
    }
    row_ptr_.assign(cells + 1, 0);
    std::vector<std::pair<std::size_t, double>> tmp; // (in, w) per row batch
    std::vector<std::size_t> counts(cells, 0);
    for_each_entry(map, m_, [&](std::size_t out, std::size_t, const Rat&) { counts[out]++; });
    for (std::size_t i = 0; i < cells; ++i) row_ptr_[i + 1] = row_ptr_[i] + counts[i];
    col_.resize(row_ptr_[cells]);
    w_.resize(row_ptr_[cells]);
    std::vector<std::size_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
    for_each_entry(map, m_, [&](std::size_t out, std::size_t in, const Rat& w) {
        col_[cursor[out]] = in;
        w_[cursor[out]] = to_double(w);
        cursor[out]++;
    });
    // transpose for the Koopman side
    trow_ptr_.assign(cells + 1, 0);
    for (std::size_t e = 0; e < col_.size(); ++e) trow_ptr_[col_[e] + 1]++;
    for (std::size_t i = 0; i < cells; ++i) trow_ptr_[i + 1] += trow_ptr_[i];
    tcol_.resize(col_.size());
    tw_.resize(col_.size());
    std::vector<std::size_t> tcursor(trow_ptr_.begin(), trow_ptr_.end() - 1);
    for (std::size_t out = 0; out < cells; ++out) {
        for (std::size_t e = row_ptr_[out]; e < row_ptr_[out + 1]; ++e) {
            std::size_t in = col_[e];
            tcol_[tcursor[in]] = out;
            tw_[tcursor[in]] = w_[e];
            tcursor[in]++;
        }
    }
}

void TransferOperator::build_exact() const {
    if (exact_built_) return;
    wx_.resize(w_.size());
    std::vector<std::size_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
    for_each_entry(*map_, m_, [&](std::size_t out, std::size_t, const Rat& w) {
        wx_[cursor[out]++] = w;
    });
    exact_built_ = true;
}

GridDensity TransferOperator::apply_U(const GridDensity& f) const {
    if (f.d != d_ || f.m != m_) throw SizeMismatchError("apply_U: grid shape mismatch");
    GridDensity out(d_, m_);
    if (f.exact) {
        build_exact();
        RatVec ox(out.size(), Rat(0));
        const RatVec& fx = *f.exact;
        for (std::size_t r = 0; r < out.size(); ++r) {
            Rat acc = 0;
            for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
                const Rat& val = fx[col_[e]];
                if (!val.is_zero()) acc += wx_[e] * val;
            }
            ox[r] = std::move(acc);
        }
        out.exact = std::move(ox);
        out.sync_from_exact();
        return out;
    }
    for (std::size_t r = 0; r < out.size(); ++r) {
        double acc = 0.0;
        for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) acc += w_[e] * f.v[col_[e]];
        out.v[r] = acc;
    }
    return out;
}

GridDensity TransferOperator::apply_pull(const GridDensity& g) const {
    if (g.d != d_ || g.m != m_) throw SizeMismatchError("apply_pull: grid shape mismatch");
    GridDensity out(d_, m_);
    for (std::size_t r = 0; r < out.size(); ++r) {
        double acc = 0.0;
        for (std::size_t e = trow_ptr_[r]; e < trow_ptr_[r + 1]; ++e) acc += tw_[e] * g.v[tcol_[e]];
        out.v[r] = acc;
    }
    return out;
}

std::shared_ptr<const TransferOperator> transfer_for(const BernoulliMap& map, int m) {
    // Operators are kept alive for the process: a laboratory run touches only
    // a handful of (map, m) pairs and rebuilding the exact Ulam weights is
    // far more expensive than holding them.
    static std::mutex mtx;
    static std::map<std::pair<std::string, int>, std::shared_ptr<const TransferOperator>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(map.signature(), m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    auto sp = std::make_shared<const TransferOperator>(map, m);
    cache[key] = sp;
    return sp;
}

GridDensity indicator_density(const BernoulliMap& map, const Tuple& s, int m) {
    CylinderSet c = map.cylinder(s);
    const int d = map.dim();
    std::vector<long long> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        Rat flo = c.origin[a] * m, fhi = (c.origin[a] + c.sides[a]) * m;
        if (!is_integer(flo) || !is_integer(fhi))
            throw AlignmentError("cylinder " + s.str() + " is not grid aligned at m = " +
                                 std::to_string(m));
        lo[static_cast<std::size_t>(a)] = numerator(flo).convert_to<long long>();
        hi[static_cast<std::size_t>(a)] = numerator(fhi).convert_to<long long>();
    }
    GridDensity f(d, m);
    RatVec fx(f.size(), Rat(0));
    const Rat value = 1 / c.measure();
    const double dval = to_double(value);
    // iterate the covered sub-box
    std::vector<long long> ix(lo);
    for (;;) {
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a)
            flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(ix[static_cast<std::size_t>(a)]);
        fx[flat] = value;
        f.v[flat] = dval;
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++ix[static_cast<std::size_t>(a)] < hi[static_cast<std::size_t>(a)]) break;
            ix[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)];
        }
        if (a < 0) break;
    }
    f.exact = std::move(fx);
    return f;
}

GridDensity pushforward_U(const BernoulliMap& map, const GridDensity& f) {
    return transfer_for(map, f.m)->apply_U(f);
}

GridDensity step_T_star(const TransferOperator& op, const SpectralMultiplier& noise,
                        const GridDensity& f) {
    GridDensity g = op.apply_U(f);
    g.drop_exact();
    noise.apply(g);
    return g;
}

GridDensity step_T(const TransferOperator& op, const SpectralMultiplier& noise,
                   const GridDensity& g) {
    GridDensity h = g;
    h.drop_exact();
    noise.apply(h);
    return op.apply_pull(h);
}

} // namespace tmix
