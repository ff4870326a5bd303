#include "tmix/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tmix/errors.hpp"
#include "tmix/rng.hpp"

namespace tmix {

const char* method_name(Method m) {
    switch (m) {
        case Method::DensityWorstCase: return "density_worst_case";
        case Method::PowerIteration: return "power_iteration";
        case Method::WitnessIs: return "witness_I_s";
        case Method::WitnessF0: return "witness_f0";
        case Method::MonteCarlo: return "monte_carlo";
    }
    return "?";
}

namespace {

// Paints `value` over the exact rational box, splitting boundary cells by
// their covered fraction.
void paint_box(GridDensity& f, const RatVec& lo_r, const RatVec& hi_r, const Rat& value) {
    const int d = f.d, m = f.m;
    struct Hit {
        long long j;
        double frac;
    };
    std::vector<std::vector<Hit>> hits(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        long long jlo = rat_floor(lo_r[static_cast<std::size_t>(a)] * m).convert_to<long long>();
        for (long long j = jlo;; ++j) {
            Rat cl(j, m), ch(j + 1, m);
            Rat ov_lo = std::max(lo_r[static_cast<std::size_t>(a)], cl);
            Rat ov_hi = std::min(hi_r[static_cast<std::size_t>(a)], ch);
            if (ov_hi > ov_lo)
                hits[static_cast<std::size_t>(a)].push_back(
                    {j, to_double(Rat(ov_hi - ov_lo) * m)});
            if (ch >= hi_r[static_cast<std::size_t>(a)]) break;
        }
    }
    const double dval = to_double(value);
    std::vector<std::size_t> pick(static_cast<std::size_t>(d), 0);
    for (;;) {
        double frac = 1.0;
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) {
            const Hit& h = hits[static_cast<std::size_t>(a)][pick[static_cast<std::size_t>(a)]];
            frac *= h.frac;
            flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(h.j % m);
        }
        f.v[flat] += dval * frac;
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++pick[static_cast<std::size_t>(a)] < hits[static_cast<std::size_t>(a)].size())
                break;
            pick[static_cast<std::size_t>(a)] = 0;
        }
        if (a < 0) break;
    }
}

int default_mix_horizon(const BernoulliMap& map, const NoiseKernel& kernel, double eps) {
    if (map.p_max_d() >= 1.0) {
        // no expansion: random-walk regime, t ~ 1/eps^2
        return static_cast<int>(std::ceil(80.0 / (eps * eps))) + 200;
    }
    double a = 1.0, gamma = 1.0;
    try {
        EigenTheory th = eigen_theory(
            kernel, kernel.kind() == KernelKind::Gaussian ? BumpKind::SineProduct
                                                          : BumpKind::TentProduct);
        a = th.a;
        gamma = th.gamma;
    } catch (const UnsupportedError&) {
        a = 1.0;
    }
    const double eta = std::pow(2.0 * a, 1.0 / gamma);
    const int N = std::max(1, mixing_depth_N(map, eps, eta));
    return 8 * (N + 2);
}

} // namespace

GridDensity indicator_density_soft(const BernoulliMap& map, const Tuple& s, int m) {
    CylinderSet c = map.cylinder(s);
    GridDensity f(map.dim(), m);
    RatVec hi(c.origin);
    for (int a = 0; a < map.dim(); ++a) hi[static_cast<std::size_t>(a)] += c.sides[static_cast<std::size_t>(a)];
    paint_box(f, c.origin, hi, 1 / c.measure());
    return f;
}

GridDensity witness_two_level(const BernoulliMap& map, int N, int m) {
    if (map.branch_count() < 2) throw DomainError("two-level witness needs M >= 2");
    GridDensity f(map.dim(), m);
    const Rat level2 = map.p(1) / map.p(2);
    // enumerate all words of length N+1; the level is set by the last symbol
    std::vector<Tuple> level{Tuple{}};
    for (int depth = 0; depth <= N; ++depth) {
        std::vector<Tuple> next;
        next.reserve(level.size() * static_cast<std::size_t>(map.branch_count()));
        for (const Tuple& t : level)
            for (int j = 1; j <= map.branch_count(); ++j) next.push_back(t.prepended(j));
        level = std::move(next);
    }
    for (const Tuple& t : level) {
        const int last = t.word.back();
        if (last > 2) continue;
        CylinderSet c = map.cylinder(t);
        RatVec hi(c.origin);
        for (int a = 0; a < map.dim(); ++a)
            hi[static_cast<std::size_t>(a)] += c.sides[static_cast<std::size_t>(a)];
        paint_box(f, c.origin, hi, last == 1 ? Rat(1) : level2);
    }
    return f;
}

MixResult measure_tmix(const BernoulliMap& map, const NoiseKernel& kernel, double eps,
                       double delta, int m, const MixOptions& opt) {
    if (!(delta > 0 && delta < 1)) throw DomainError("measure_tmix: delta must be in (0,1)");
    EvolutionOps ops(map, kernel, m);
    const int horizon = opt.horizon > 0 ? opt.horizon : default_mix_horizon(map, kernel, eps);
    const int d = map.dim();

    // family of initial densities
    std::vector<GridDensity> family;
    const int n_axis = std::max(1, static_cast<int>(std::ceil(
                                       std::pow(static_cast<double>(opt.n_starts), 1.0 / d))));
    const int total = static_cast<int>(std::pow(n_axis, d));
    for (int i = 0; i < total; ++i) {
        GridDensity delta_f(d, m);
        int rem = i;
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a) {
            const int pos = rem % n_axis;
            rem /= n_axis;
            const int cell = static_cast<int>((static_cast<double>(pos) + 0.5) / n_axis * m);
            flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(cell % m);
        }
        delta_f.v[flat] = static_cast<double>(delta_f.size()); // unit mass in one cell
        family.push_back(std::move(delta_f));
    }

    MixResult res;
    // theorem witness: heaviest-branch word, checked at step N - N1
    int witness_index = -1;
    if (opt.include_witness && map.p_max_d() < 1.0) {
        const double lam1 = constant_Lambda(map, 1, 1.0 - delta);
        if (lam1 * eps < 1.0) {
            const double lp = std::log(map.p_max_d());
            const int N = std::max(1, static_cast<int>(std::ceil(
                                           d * std::log(eps * lam1) / lp - 1e-12)));
            const int N1 =
                std::max(0, static_cast<int>(std::ceil(std::log((1.0 - delta) / 2.0) / lp - 1e-12)));
            int heavy = 1;
            for (int i = 1; i <= map.branch_count(); ++i)
                if (map.p(i) == map.p_max()) heavy = i;
            Tuple s(std::vector<int>(static_cast<std::size_t>(N), heavy));
            family.push_back(indicator_density_soft(map, s, m));
            witness_index = static_cast<int>(family.size()) - 1;
            res.witness_N = N;
            res.witness_N1 = N1;
        }
    }

    std::vector<double> envelope;
    int worst_t = 0;
    bool converged = true;
    for (std::size_t fi = 0; fi < family.size(); ++fi) {
        GridDensity g = family[fi];
        double tv = g.tv_to_uniform();
        int t = 0;
        std::size_t step = 0;
        auto record = [&](double val) {
            if (envelope.size() <= step) envelope.resize(step + 1, 0.0);
            envelope[step] = std::max(envelope[step], val);
        };
        record(tv);
        // the theorem witness is evolved at least to its check step
        int check_step = 0;
        if (static_cast<int>(fi) == witness_index && res.witness_N)
            check_step = std::max(0, *res.witness_N - *res.witness_N1);
        int stop_t = -1;
        while ((tv > delta || t < check_step) && t < horizon) {
            g = ops.t_star(g);
            ++t;
            ++step;
            tv = g.tv_to_uniform();
            record(tv);
            if (stop_t < 0 && tv <= delta) stop_t = t;
            if (t == check_step && check_step > 0) res.witness_tv_at_check = tv;
        }
        if (tv > delta && stop_t < 0) converged = false;
        worst_t = std::max(worst_t, stop_t < 0 ? t : stop_t);
    }
    if (!converged)
        throw NonConvergenceError("measure_tmix: tv above delta after horizon " +
                                  std::to_string(horizon));
    if (res.witness_tv_at_check) res.witness_ok = *res.witness_tv_at_check >= delta - 1e-9;

    res.worst.eps = eps;
    res.worst.delta = delta;
    res.worst.t = worst_t;
    res.worst.method = Method::DensityWorstCase;
    res.worst.residuals = std::move(envelope);
    res.worst.converged = converged;
    return res;
}

double operator_norm(const EvolutionOps& ops, int n, const DisOptions& opt) {
    double best = 0.0;
    for (int sd = 0; sd < opt.power_seeds; ++sd) {
        Rng rng = Rng::substream(opt.seed, static_cast<std::uint64_t>(sd));
        GridDensity v(ops.op->dim(), ops.op->m());
        for (double& x : v.v) x = rng.unif() - 0.5;
        v.subtract_mean();
        double nv = v.l2();
        for (double& x : v.v) x /= nv;
        double lambda = 0.0, prev = -1.0;
        for (int round = 0; round < opt.power_rounds; ++round) {
            GridDensity w = v;
            for (int k = 0; k < n; ++k) w = ops.t_star(w);
            lambda = w.l2() * w.l2(); // Rayleigh quotient of T^n T*^n at unit v
            GridDensity u = w;
            for (int k = 0; k < n; ++k) u = ops.t_back(u);
            u.subtract_mean();
            const double nu = u.l2();
            if (nu == 0.0) break;
            for (double& x : u.v) x /= nu;
            v = std::move(u);
            if (prev >= 0.0 && std::fabs(lambda - prev) <= opt.power_tol * lambda) break;
            prev = lambda;
        }
        best = std::max(best, std::sqrt(lambda));
    }
    return best;
}

DisResult measure_tdis(const BernoulliMap& map, const NoiseKernel& kernel, double eps,
                       double delta, int m, const DisOptions& opt) {
    if (!(delta > 0 && delta < 1)) throw DomainError("measure_tdis: delta must be in (0,1)");
    EvolutionOps ops(map, kernel, m);
    int max_n = opt.max_n;
    if (max_n == 0) {
        const double slope =
            map.p_min_d() < 1.0 ? map.dim() / std::fabs(std::log(map.p_min_d())) : 8.0;
        max_n = static_cast<int>(4.0 * (slope * std::fabs(std::log(eps)) + 8.0));
    }

    DisResult res;
    res.meas.eps = eps;
    res.meas.delta = delta;
    res.meas.method = Method::PowerIteration;
    res.meas.residuals.push_back(1.0); // ||T*^0||
    int t = -1;
    for (int n = 1; n <= max_n; ++n) {
        const double norm_n = operator_norm(ops, n, opt);
        res.meas.residuals.push_back(norm_n);
        if (norm_n <= delta) {
            t = n;
            break;
        }
    }
    if (t < 0)
        throw NonConvergenceError("measure_tdis: norm above delta after n = " +
                                  std::to_string(max_n));
    res.meas.t = t;

    if (opt.run_witness && map.branch_count() >= 2 && map.p_max_d() < 1.0) {
        const double delta_p = 1.0 - delta;
        const double lam2 = constant_Lambda(map, 2, delta_p);
        if (lam2 * eps < 1.0) {
            auto part = map.enumerate_partition(lam2 * eps);
            int N = 1 << 30;
            for (const auto& c : part) N = std::min(N, c.tuple.length());
            WitnessF0Info wi;
            wi.N = N;
            GridDensity f0 = witness_two_level(map, N, m);
            const double norm0 = f0.l2();
            GridDensity g = f0;
            for (int k = 0; k < N; ++k) g = ops.t_star(g);
            wi.ratio = g.l2() / norm0;
            wi.required = delta; // = 1 - delta'
            wi.ok = wi.ratio >= wi.required - 1e-9;
            // decay time of the mean-zero part
            GridDensity h = f0;
            h.subtract_mean();
            const double h0 = h.l2();
            int n = 0;
            while (h.l2() > delta * h0 && n < max_n) {
                h = ops.t_star(h);
                ++n;
            }
            wi.decay_time = n;
            res.witness = wi;
        }
    }
    return res;
}

std::vector<GridDensity> simulate_ensemble(const BernoulliMap& map, const NoiseKernel& kernel,
                                           int n_steps, int n_particles, std::uint64_t seed,
                                           int m, const std::vector<double>& start_point) {
    const int d = map.dim();
    Rng rng(seed);
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(n_particles));
    for (auto& x : xs) {
        if (!start_point.empty()) {
            x = start_point;
        } else {
            x.resize(static_cast<std::size_t>(d));
            for (double& c : x) c = rng.unif();
        }
    }
    auto histogram = [&]() {
        GridDensity h(d, m);
        const double w = static_cast<double>(h.size()) / n_particles; // density units
        for (const auto& x : xs) {
            std::size_t flat = 0;
            for (int a = 0; a < d; ++a) {
                int j = static_cast<int>(x[static_cast<std::size_t>(a)] * m);
                if (j >= m) j = m - 1;
                flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(j);
            }
            h.v[flat] += w;
        }
        return h;
    };
    std::vector<GridDensity> trace;
    trace.push_back(histogram());
    for (int step = 0; step < n_steps; ++step) {
        for (auto& x : xs) {
            x = map.apply(x);
            std::vector<double> z = kernel.sample(rng);
            for (int a = 0; a < d; ++a) {
                double t = x[static_cast<std::size_t>(a)] + z[static_cast<std::size_t>(a)];
                t -= std::floor(t);
                if (t >= 1.0) t = 0.0;
                x[static_cast<std::size_t>(a)] = t;
            }
        }
        trace.push_back(histogram());
    }
    return trace;
}

ScalingFit fit_scaling_points(const std::vector<std::pair<double, double>>& eps_t) {
    if (eps_t.size() < 5)
        throw InsufficientDataError("scaling fit needs at least 5 eps values");
    double emin = 1e300, emax = 0.0;
    for (const auto& [e, t] : eps_t) {
        emin = std::min(emin, e);
        emax = std::max(emax, e);
    }
    if (emax / emin < 16.0 * (1.0 - 1e-9))
        throw InsufficientDataError("scaling fit needs at least 4 octaves of eps");
    // least squares of t against log2(1/eps)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(eps_t.size());
    for (const auto& [e, t] : eps_t) {
        const double x = std::log2(1.0 / e);
        sx += x;
        sy += t;
        sxx += x * x;
        sxy += x * t;
    }
    ScalingFit fit;
    fit.points = static_cast<int>(eps_t.size());
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (const auto& [e, t] : eps_t) {
        const double r = t - (fit.intercept + fit.slope * std::log2(1.0 / e));
        rss += r * r;
    }
    fit.rms_residual = std::sqrt(rss / n);
    return fit;
}

ScalingFit fit_scaling(const std::vector<TimeMeasurement>& meas) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(meas.size());
    for (const TimeMeasurement& m : meas) pts.emplace_back(m.eps, static_cast<double>(m.t));
    return fit_scaling_points(pts);
}

} // namespace tmix
