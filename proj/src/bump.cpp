#include "tmix/bump.hpp"

#include <cmath>

#include "tmix/errors.hpp"

namespace tmix {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// Antiderivative of the normalized 1d profile on [0,1] (zero outside).
// sine:  f(u) = (pi/2) sin(pi u),  F(u) = (1 - cos(pi u)) / 2
// tent:  f(u) = 4 tent(u),        F(u) piecewise quadratic
double profile_antiderivative(BumpKind kind, double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    if (kind == BumpKind::SineProduct) return 0.5 * (1.0 - std::cos(kPi * u));
    if (u <= 0.5) return 2.0 * u * u;
    const double t = 1.0 - u;
    return 1.0 - 2.0 * t * t;
}

double profile_value(BumpKind kind, double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    if (kind == BumpKind::SineProduct) return 0.5 * kPi * std::sin(kPi * u);
    return 4.0 * (u <= 0.5 ? u : 1.0 - u);
}

// Word map phi^{|s|} restricted to C_s: out_q = sign_q * lambda * x_{perm_q} + off_q.
struct WordMap {
    int d = 1;
    std::vector<int> perm, sign;
    Rat lambda = 1;
    RatVec off;

    static WordMap identity(int d) {
        WordMap w;
        w.d = d;
        w.perm.resize(static_cast<std::size_t>(d));
        w.sign.assign(static_cast<std::size_t>(d), 1);
        w.off.assign(static_cast<std::size_t>(d), Rat(0));
        for (int i = 0; i < d; ++i) w.perm[static_cast<std::size_t>(i)] = i;
        return w;
    }

    // Post-compose with one branch map b: w <- b o w.
    void compose(const AffineBranch& b) {
        if (!b.cell.is_cube())
            throw NonCubeError("bump construction needs cube branch cells");
        const Rat scale = 1 / b.cell.sides[0];
        std::vector<int> nperm(perm.size()), nsign(perm.size());
        RatVec noff(off.size());
        for (int q = 0; q < d; ++q) {
            const int mid = b.D.perm[static_cast<std::size_t>(q)]; // intermediate axis
            nperm[static_cast<std::size_t>(q)] = perm[static_cast<std::size_t>(mid)];
            nsign[static_cast<std::size_t>(q)] =
                b.D.sign[static_cast<std::size_t>(q)] * sign[static_cast<std::size_t>(mid)];
            noff[static_cast<std::size_t>(q)] =
                b.D.sign[static_cast<std::size_t>(q)] * scale * off[static_cast<std::size_t>(mid)] +
                b.offset[static_cast<std::size_t>(q)];
        }
        perm = std::move(nperm);
        sign = std::move(nsign);
        off = std::move(noff);
        lambda *= scale;
    }
};

struct AnalyticBump {
    BumpKind kind;
    int d = 1;
    WordMap w;
    double norm = 1.0;      // 1 / pi(C_s) = lambda^d
    std::vector<double> a_coef, b_coef; // per input axis: u = a x + b on profile axis

    AnalyticBump(const BernoulliMap& map, const Tuple& s, BumpKind k) : kind(k), d(map.dim()) {
        // phi^{|s|} on C_s applies branch s_0 first, then s_1, ...
        w = WordMap::identity(d);
        for (int i = 0; i < s.length(); ++i)
            w.compose(map.branch(s.word[static_cast<std::size_t>(i)]));
        // profile axis q reads input axis w.perm[q]; invert to per-input form
        a_coef.assign(static_cast<std::size_t>(d), 1.0);
        b_coef.assign(static_cast<std::size_t>(d), 0.0);
        const double lam = to_double(w.lambda);
        for (int q = 0; q < d; ++q) {
            const int in = w.perm[static_cast<std::size_t>(q)];
            a_coef[static_cast<std::size_t>(in)] = w.sign[static_cast<std::size_t>(q)] * lam;
            b_coef[static_cast<std::size_t>(in)] = to_double(w.off[static_cast<std::size_t>(q)]);
        }
        norm = std::pow(lam, d);
    }

    // Exact integral of the 1d factor over [u, v] on input axis a.
    double axis_integral(int a, double u, double v) const {
        const double aa = a_coef[static_cast<std::size_t>(a)];
        const double bb = b_coef[static_cast<std::size_t>(a)];
        double w1 = aa * u + bb, w2 = aa * v + bb;
        if (w1 > w2) std::swap(w1, w2);
        return (profile_antiderivative(kind, w2) - profile_antiderivative(kind, w1)) /
               std::fabs(aa);
    }

    // Average over an axis-aligned box given per-axis [lo, hi].
    double box_average(const std::vector<double>& lo, const std::vector<double>& hi) const {
        double val = norm;
        for (int a = 0; a < d; ++a) {
            const double len = hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)];
            if (len <= 0.0) return 0.0;
            val *= axis_integral(a, lo[static_cast<std::size_t>(a)],
                                 hi[static_cast<std::size_t>(a)]) /
                   len;
        }
        return val;
    }
};

GridDensity render(const AnalyticBump& bump, int m) {
    GridDensity f(bump.d, m);
    const double h = 1.0 / m;
    std::vector<double> lo(static_cast<std::size_t>(bump.d)), hi(lo);
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        std::size_t rem = flat;
        for (int a = bump.d - 1; a >= 0; --a) {
            const int j = static_cast<int>(rem % m);
            rem /= m;
            lo[static_cast<std::size_t>(a)] = j * h;
            hi[static_cast<std::size_t>(a)] = (j + 1) * h;
        }
        f.v[flat] = bump.box_average(lo, hi);
    }
    return f;
}

} // namespace

EigenTheory eigen_theory(const NoiseKernel& kernel, BumpKind kind) {
    EigenTheory th;
    if (kind == BumpKind::SineProduct) {
        if (kernel.kind() != KernelKind::Gaussian)
            throw UnsupportedError("sine profile is certified for Gaussian noise only");
        for (double v : kernel.diag_cov())
            if (v != 1.0)
                throw UnsupportedError("sine profile needs the standard Gaussian");
        th.a = 0.5 * kPi * kPi * kernel.dim();
        th.gamma = 2.0;
        return th;
    }
    // tent profile: a = 4 * sum over axes of the base factor's first absolute
    // moment; valid for kernels that factor per axis.
    th.gamma = 1.0;
    switch (kernel.kind()) {
        case KernelKind::Gaussian: {
            double s = 0.0;
            for (double v : kernel.diag_cov()) s += std::sqrt(v) * std::sqrt(2.0 / kPi);
            th.a = 4.0 * s;
            return th;
        }
        case KernelKind::BallUniform:
            if (kernel.dim() != 1)
                throw UnsupportedError("ball kernel has no tensor factors for d >= 2");
            th.a = 4.0 * 0.5;
            return th;
        case KernelKind::TensorTent:
            th.a = 4.0 * kernel.dim() / 3.0;
            return th;
        case KernelKind::TensorUniform:
            th.a = 4.0 * kernel.dim() * 0.25;
            return th;
        default: throw UnsupportedError("no explicit eigen constant for this kernel");
    }
}

double envelope_beta(const BernoulliMap& map, const EigenTheory& th) {
    const double pmax = map.p_max_d();
    return std::exp(-2.0 * std::log(2.0) /
                    (2.0 * th.a * (1.0 - std::pow(pmax, th.gamma / map.dim()))));
}

GridDensity build_F0(BumpKind kind, int d, int m) {
    if (m < 16) throw ResolutionError("build_F0 needs m >= 16");
    // F_0 is F_s with the empty word; any map of the right dimension works.
    AffineBranch b;
    b.cell.origin.assign(static_cast<std::size_t>(d), Rat(0));
    b.cell.sides.assign(static_cast<std::size_t>(d), Rat(1));
    b.D = SignedPerm::identity(d);
    b.offset.assign(static_cast<std::size_t>(d), Rat(0));
    BernoulliMap idmap(d, {b});
    return build_Fs(idmap, Tuple{}, kind, m);
}

GridDensity build_Fs(const BernoulliMap& map, const Tuple& s, BumpKind kind, int m) {
    CylinderSet c = map.cylinder(s);
    if (to_double(c.side()) * m < 8.0)
        throw ResolutionError("cylinder " + s.str() + " unresolved at m = " + std::to_string(m));
    AnalyticBump bump(map, s, kind);
    return render(bump, m);
}

GridDensity pushforward_Fs_exact(const BernoulliMap& map, const Tuple& s, BumpKind kind, int m) {
    AnalyticBump bump(map, s, kind);
    const int d = map.dim();
    GridDensity f(d, m);
    const double h = 1.0 / m;
    std::vector<double> lo(static_cast<std::size_t>(d)), hi(lo);
    for (std::size_t flat = 0; flat < f.size(); ++flat) {
        double acc = 0.0;
        for (int bi = 1; bi <= map.branch_count(); ++bi) {
            const AffineBranch& b = map.branch(bi);
            // exact preimage box of the output cell under branch bi
            std::size_t rem = flat;
            bool empty = false;
            std::vector<double> plo(static_cast<std::size_t>(d)), phi(static_cast<std::size_t>(d));
            for (int r = d - 1; r >= 0; --r) {
                const int j = static_cast<int>(rem % m);
                rem /= m;
                const int cax = b.D.perm[static_cast<std::size_t>(r)];
                const Rat& sd = b.cell.sides[static_cast<std::size_t>(cax)];
                Rat a1 = (Rat(j, m) - b.offset[static_cast<std::size_t>(r)]) * sd;
                Rat a2 = (Rat(j + 1, m) - b.offset[static_cast<std::size_t>(r)]) * sd;
                if (b.D.sign[static_cast<std::size_t>(r)] < 0) {
                    a1 = -a1;
                    a2 = -a2;
                    std::swap(a1, a2);
                }
                Rat blo = std::max(a1, b.cell.origin[static_cast<std::size_t>(cax)]);
                Rat bhi = std::min(a2, b.cell.origin[static_cast<std::size_t>(cax)] + sd);
                if (bhi <= blo) {
                    empty = true;
                    break;
                }
                plo[static_cast<std::size_t>(cax)] = to_double(blo);
                phi[static_cast<std::size_t>(cax)] = to_double(bhi);
            }
            if (empty) continue;
            // (1/vol_cell) * integral of F_s over the preimage box
            double integral = bump.norm;
            for (int a = 0; a < d; ++a)
                integral *= bump.axis_integral(a, plo[static_cast<std::size_t>(a)],
                                               phi[static_cast<std::size_t>(a)]);
            acc += integral / std::pow(h, d);
        }
        f.v[flat] = acc;
    }
    return f;
}

EigenCertificate verify_eigen_inequality(const NoiseKernel& kernel, BumpKind kind,
                                         const std::vector<double>& eps_list, int m,
                                         const BernoulliMap* map, double tolerance,
                                         double support_threshold) {
    EigenTheory th = eigen_theory(kernel, kind);
    EigenCertificate cert;
    cert.a = th.a;
    cert.gamma = th.gamma;
    cert.eta = th.eta();
    if (map) cert.beta = envelope_beta(*map, th);

    GridDensity F0 = build_F0(kind, kernel.dim(), m);
    double peak = 0.0;
    for (double x : F0.v) peak = std::max(peak, x);
    const double cut = support_threshold * peak;

    for (double eps : eps_list) {
        const double bound = 1.0 - th.a * std::pow(eps, th.gamma);
        if (!(bound > 0.0)) throw DomainError("eps too large: 1 - a eps^gamma <= 0");
        NoiseKernel keps = kernel; // same kind/shape at this eps
        switch (kernel.kind()) {
            case KernelKind::Gaussian:
                keps = NoiseKernel::gaussian(kernel.dim(), eps, kernel.diag_cov());
                break;
            case KernelKind::BallUniform: keps = NoiseKernel::ball_uniform(kernel.dim(), eps); break;
            case KernelKind::TensorTent: keps = NoiseKernel::tensor_tent(kernel.dim(), eps); break;
            case KernelKind::TensorUniform:
                keps = NoiseKernel::tensor_uniform(kernel.dim(), eps);
                break;
            default: throw UnsupportedError("eigen certification needs a parametric kernel");
        }
        GridDensity conv = convolve_noise(keps.grid(m), F0);
        EigenCertificate::Entry e;
        e.eps = eps;
        e.bound = bound;
        e.min_ratio = 1e300;
        for (std::size_t i = 0; i < F0.size(); ++i) {
            if (F0.v[i] < cut) continue;
            const double r = conv.v[i] / F0.v[i];
            if (r < e.min_ratio) {
                e.min_ratio = r;
                e.worst_cell = i;
            }
        }
        e.margin = e.min_ratio - bound;
        e.ok = e.min_ratio >= bound - tolerance;
        cert.all_ok = cert.all_ok && e.ok;
        cert.entries.push_back(e);
    }
    return cert;
}

PersistenceReport verify_envelope_persistence(const BernoulliMap& map, const NoiseKernel& kernel,
                                              const Tuple& s, BumpKind kind, int m,
                                              double tolerance, double support_threshold) {
    EigenTheory th = eigen_theory(kernel, kind);
    PersistenceReport rep;
    rep.beta = envelope_beta(map, th);
    rep.eta_eps = th.eta() * kernel.eps();
    CylinderSet cs = map.cylinder(s);
    rep.ell_s = to_double(cs.side());
    rep.hypothesis_ok = rep.ell_s >= rep.eta_eps;

    EvolutionOps ops(map, kernel, m);
    GridDensity g = build_Fs(map, s, kind, m);
    const int len = s.length();
    for (int n = 1; n <= len + 2; ++n) {
        g = ops.t_star(g);
        PersistenceReport::Step step;
        step.n = n;
        if (n <= len) {
            GridDensity target = build_Fs(map, s.shifted(n), kind, m);
            double peak = 0.0;
            for (double x : target.v) peak = std::max(peak, x);
            const double cut = support_threshold * peak;
            double worst = 1e300;
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (target.v[i] < cut) continue;
                worst = std::min(worst, g.v[i] / target.v[i]);
            }
            step.min_ratio = worst;
            // product lower bound prod_k (1 - a (lambda_{sigma^k s} eps)^gamma)
            double prod = 1.0;
            for (int k = 1; k <= n; ++k) {
                const double lam = map.cylinder(s.shifted(k)).lambda();
                prod *= 1.0 - th.a * std::pow(lam * kernel.eps(), th.gamma);
            }
            step.product_bound = prod;
            step.ok = worst >= rep.beta - tolerance;
        } else {
            double mn = 1e300;
            for (double x : g.v) mn = std::min(mn, x);
            step.min_value = mn;
            step.ok = mn > 0.0;
            if (n == len + 1) rep.beta_prime_measured = mn;
        }
        rep.all_ok = rep.all_ok && step.ok;
        rep.steps.push_back(step);
    }
    return rep;
}

} // namespace tmix
