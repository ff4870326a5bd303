#include "tmix/spectral.hpp"

#include <cmath>

#include "tmix/errors.hpp"

namespace tmix {

namespace {
constexpr double kTwoPiSq = 2.0 * 3.141592653589793238462643383279503 *
                            3.141592653589793238462643383279503;

BigInt norm2(const std::vector<int>& k) {
    BigInt s = 0;
    for (int ka : k) s += BigInt(ka) * ka;
    return s;
}
} // namespace

ModeLedger::ModeLedger(int N, int d, double eps) : N_(N), d_(d), eps_(eps) {
    if (N < 2) throw DomainError("expansion factor must be >= 2");
}

void ModeLedger::seed(const std::vector<int>& k, std::complex<double> amp) {
    if (static_cast<int>(k.size()) != d_) throw SizeMismatchError("mode dimension mismatch");
    if (steps_ != 0) throw DomainError("seed before stepping");
    ModeEntry e;
    e.amp = amp;
    e.origin = k;
    e.expo_units = 0;
    modes_[k] = e;
}

void ModeLedger::step() {
    std::map<std::vector<int>, ModeEntry> next;
    for (const auto& [k, e] : modes_) {
        ModeEntry ne = e;
        ne.expo_units += norm2(k); // damping acts at the current index
        std::vector<int> nk(k);
        for (int& ka : nk) ka *= N_;
        next[nk] = ne;
    }
    modes_ = std::move(next);
    ++steps_;
}

void ModeLedger::advance(int n) {
    for (int i = 0; i < n; ++i) step();
}

bool ModeLedger::support_divisible() const {
    BigInt pw = 1;
    for (int i = 0; i < steps_; ++i) pw *= N_;
    for (const auto& [k, e] : modes_) {
        (void)e;
        for (int ka : k)
            if (BigInt(ka) % pw != 0) return false;
    }
    return true;
}

double ModeLedger::log_l2_norm() const {
    // factor out the largest term to stay in range
    double best = -1e300;
    for (const auto& [k, e] : modes_) {
        if (norm2(k) == 0) continue;
        double lg = std::log(std::abs(e.amp)) - kTwoPiSq * eps_ * eps_ *
                                                    e.expo_units.convert_to<double>();
        best = std::max(best, lg);
    }
    if (best <= -1e299) return -1e300;
    double s = 0.0;
    for (const auto& [k, e] : modes_) {
        if (norm2(k) == 0) continue;
        double lg = std::log(std::abs(e.amp)) -
                    kTwoPiSq * eps_ * eps_ * e.expo_units.convert_to<double>();
        s += std::exp(2.0 * (lg - best));
    }
    return best + 0.5 * std::log(s);
}

double ModeLedger::log_coefficient(const std::vector<int>& k0) const {
    for (const auto& [k, e] : modes_) {
        if (e.origin == k0)
            return std::log(std::abs(e.amp)) -
                   kTwoPiSq * eps_ * eps_ * e.expo_units.convert_to<double>();
    }
    throw DomainError("mode not present in ledger");
}

ModeLedger iterate_spectrum(int N, int d, double eps, const ModeLedger& g, int n) {
    ModeLedger out = g;
    if (out.expansion() != N || out.dim() != d)
        throw SizeMismatchError("iterate_spectrum: ledger shape mismatch");
    (void)eps;
    out.advance(n);
    return out;
}

BigInt damping_units(int N, int n, const BigInt& k2) {
    BigInt pw = 1;
    for (int i = 0; i < 2 * n; ++i) pw *= N;
    return k2 * (pw - 1) / (BigInt(N) * N - 1);
}

double log_opnorm(int N, double eps, int n) {
    return -kTwoPiSq * eps * eps * damping_units(N, n, 1).convert_to<double>();
}

int spectral_tdis(int N, int d, double eps, double delta, int horizon) {
    (void)d; // the sup over k != 0 is attained at |k| = 1 in any dimension
    const double target = std::log(delta);
    for (int n = 1; n <= horizon; ++n)
        if (log_opnorm(N, eps, n) <= target) return n;
    throw NonConvergenceError("spectral_tdis: horizon reached");
}

DecayReport decay_check(int N, int d, double eps, double delta, int horizon) {
    DecayReport rep;
    rep.N = N;
    rep.d = d;
    rep.eps = eps;
    rep.delta = delta;
    rep.tdis = spectral_tdis(N, d, eps, delta, horizon);
    const double lnN = std::log(static_cast<double>(N));
    rep.closed_form = std::fabs(std::log(eps)) / lnN +
                      0.5 * std::log(std::fabs(std::log(delta))) / lnN;
    // bold_K for the standard Gaussian: eps^{d/2} ||K_eps||_2 -> (4 pi)^{-d/4}
    const double bold_K = std::pow(4.0 * M_PI, -0.25 * d);
    rep.envelope_doubling = true;
    for (int n = 1; n <= rep.tdis + 2; ++n) {
        DecayRow row;
        row.n = n;
        row.log_norm = log_opnorm(N, eps, n);
        row.log_tv_envelope = std::log(bold_K) + 0.5 * d * std::fabs(std::log(eps)) + row.log_norm;
        // the (N-1)-denominator variant of the accumulated exponent
        BigInt pw = 1;
        for (int i = 0; i < 2 * n; ++i) pw *= N;
        row.alt_exponent = -kTwoPiSq * eps * eps *
                           ((pw - 1) / (BigInt(N) - 1)).convert_to<double>();
        if (n >= 2) {
            const double prev = rep.rows.back().log_norm;
            if (row.log_norm > N * N * prev * (1.0 - 1e-12) + 1e-12)
                rep.envelope_doubling = false;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace tmix
