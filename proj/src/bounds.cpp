#include "tmix/bounds.hpp"

#include <cmath>

#include "tmix/errors.hpp"

namespace tmix {

namespace {

void require_expanding(const BernoulliMap& map) {
    if (map.p_max_d() >= 1.0 || map.p_min_d() <= 0.0)
        throw DomainError("bounds need an expanding map (0 < p_min <= p_max < 1)");
}

int ceil_int(double x) { return static_cast<int>(std::ceil(x - 1e-12)); }

} // namespace

double constant_C1(const BernoulliMap& map) {
    require_expanding(map);
    const int d = map.dim();
    return 2.0 * d * std::pow(2.0 + std::pow(map.p_min_d(), -1.0 / d), d - 1);
}

double constant_Lambda(const BernoulliMap& map, int p, double delta) {
    require_expanding(map);
    if (p < 1) throw DomainError("Lambda needs p >= 1");
    if (!(delta > 0)) throw DomainError("Lambda needs delta > 0");
    const int d = map.dim();
    const double c1 = constant_C1(map);
    const double denom = std::pow(delta, p) * std::pow(map.p_min_d(), 1.0 / d) *
                         std::pow(1.0 - std::pow(map.p_max_d(), 1.0 / (p * d)), p);
    return 2.0 * d * std::pow(c1, p - 1) / denom;
}

double constant_B(const BernoulliMap& map, int p, double delta) {
    return delta / (4.0 * constant_Lambda(map, p, delta / 4.0) * std::sqrt(map.dim()));
}

int mixing_depth_N(const BernoulliMap& map, double eps, double eta) {
    require_expanding(map);
    return ceil_int(map.dim() * std::log(eps * eta) / std::log(map.p_max_d()));
}

BoundReport structural_constants(const BernoulliMap& map, int p, double delta, double a,
                                 double gamma) {
    require_expanding(map);
    if (p != 1 && p != 2) throw DomainError("p must be 1 or 2");
    if (!(delta > 0 && delta < 1)) throw DomainError("delta must be in (0,1)");
    BoundReport r;
    r.d = map.dim();
    r.p = p;
    r.delta = delta;
    r.p_min = map.p_min_d();
    r.p_max = map.p_max_d();
    r.C1 = constant_C1(map);
    r.Lambda = constant_Lambda(map, p, delta);
    r.B = constant_B(map, p, delta);
    r.a = a;
    r.gamma = gamma;
    r.eta = std::pow(2.0 * a, 1.0 / gamma);
    r.tmix_slope = r.d / std::fabs(std::log(r.p_max));
    r.tdis_lower_slope = r.d / std::fabs(std::log(r.p_min));
    r.tdis_upper_slope = r.d / std::fabs(std::log(r.p_max));
    return r;
}

BoundReport theoretical_time_bounds(const BernoulliMap& map, const NoiseKernel& kernel,
                                    double eps, double delta) {
    EigenTheory th;
    try {
        th = eigen_theory(kernel, kernel.kind() == KernelKind::Gaussian ? BumpKind::SineProduct
                                                                        : BumpKind::TentProduct);
    } catch (const UnsupportedError&) {
        th = eigen_theory(kernel, BumpKind::TentProduct);
    }
    BoundReport r = structural_constants(map, 2, delta, th.a, th.gamma);
    r.eps = eps;
    r.N_mix = mixing_depth_N(map, eps, r.eta);

    // mixing-time witness integers: s = i^N with p_i = p_max, distance stays
    // >= delta at step N - N1
    const double lam1 = constant_Lambda(map, 1, 1.0 - delta);
    const double lp = std::log(map.p_max_d());
    if (lam1 * eps < 1.0) {
        r.witness_N = std::max(0, ceil_int(map.dim() * std::log(eps * lam1) / lp));
        r.witness_N1 = std::max(0, ceil_int(std::log((1.0 - delta) / 2.0) / lp));
    }

    // explicit dissipation lower bound: min word length of the
    // Lambda_{2,1-delta} partition
    const double lam2 = constant_Lambda(map, 2, 1.0 - delta);
    if (lam2 * eps < 1.0) {
        auto part = map.enumerate_partition(lam2 * eps);
        int nmin = 1 << 30;
        for (const auto& c : part) nmin = std::min(nmin, c.tuple.length());
        r.tdis_lower_explicit = nmin;
    }

    // dissipation upper bound N + N1 + 1, valid only when the chi condition
    // holds (at laboratory scales chi is usually too close to 1)
    const double lam_q = constant_Lambda(map, 2, delta / 4.0);
    r.dis_N = std::max(0, ceil_int(map.dim() * std::log(eps * lam_q) / lp));
    const double b_const = constant_B(map, 2, delta);
    const double kthresh = b_const / (2.0 * M_PI * eps);
    // sup of |K^| just past the threshold; symbols decay along each axis
    double chi = 0.0;
    int k0 = std::max(1, static_cast<int>(std::ceil(kthresh)));
    for (int k = k0; k < k0 + 64; ++k) {
        std::vector<int> kv(static_cast<std::size_t>(map.dim()), 0);
        kv[0] = k;
        double v = std::fabs(kernel.fourier(kv, 512));
        chi = std::max(chi, v);
        if (v < 1e-14) break;
    }
    r.chi = chi;
    const double om = 1.0 - chi;
    r.chi_condition_ok =
        chi < 1.0 && delta * delta <= 2.0 * om * om / std::max(1e-300, 1.0 - om * om);
    if (r.chi_condition_ok) {
        const double rate = 1.0 - delta * delta * (1.0 - om * om) / (4.0 * om * om);
        r.dis_N1 = std::max(0, ceil_int(std::log(delta) / std::log(rate)));
        r.tdis_upper_explicit = r.dis_N + r.dis_N1 + 1;
    }

    // uniformly expanding closed forms (C = 0 part of the appendix formulas)
    if (map.p_min() == map.p_max()) {
        const double n_real = std::pow(map.p_min_d(), -1.0 / map.dim());
        const double n_round = std::round(n_real);
        if (std::fabs(n_real - n_round) < 1e-9 && n_round >= 2) {
            const double lnN = std::log(n_round);
            const double le = std::fabs(std::log(eps)) / lnN;
            r.appendix_tmix =
                le + 0.5 * std::log(0.5 * map.dim() * std::fabs(std::log(eps)) +
                                    std::fabs(std::log(delta))) /
                         lnN;
            r.appendix_tdis = le + 0.5 * std::log(std::fabs(std::log(delta))) / lnN;
        }
    }
    return r;
}

DualityReport relate_tmix_tdis(const std::vector<double>& eps_grid,
                               const std::vector<int>& tdis_delta,
                               const std::vector<int>& tmix_quarter,
                               const std::vector<int>& tmix_dprime, double delta,
                               double delta_prime, double bold_K, int d, int slack_steps) {
    if (eps_grid.size() != tdis_delta.size() || eps_grid.size() != tmix_quarter.size() ||
        eps_grid.size() != tmix_dprime.size())
        throw SizeMismatchError("relate_tmix_tdis: curves must share the eps grid");
    DualityReport rep;
    rep.delta = delta;
    rep.delta_prime = delta_prime;
    rep.slack_steps = slack_steps;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        DualityRow row;
        row.eps = eps_grid[i];
        row.tdis = tdis_delta[i];
        row.tmix_quarter = tmix_quarter[i];
        row.tmix_dprime = tmix_dprime[i];
        row.holds_forward = row.tdis <= row.tmix_quarter + slack_steps;
        const double arg = delta_prime * std::pow(row.eps, 0.5 * d) / bold_K;
        row.rhs_backward = 2.0 + std::log(arg) / std::log(delta) * row.tdis;
        row.holds_backward = row.tmix_dprime <= row.rhs_backward + 1e-9;
        if (!row.holds_forward || !row.holds_backward) rep.violations++;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace tmix
