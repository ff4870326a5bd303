#include "tmix/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmix/errors.hpp"

namespace tmix {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

double normal_cdf(double x, double sigma) { return 0.5 * (1.0 + std::erf(x / (sigma * 1.4142135623730951))); }

// Cumulative of the tent density (1/w)(1-|x|/w) on [-w,w].
double tent_cdf(double x, double w) {
    if (x <= -w) return 0.0;
    if (x >= w) return 1.0;
    if (x <= 0.0) {
        double t = x + w;
        return t * t / (2.0 * w * w);
    }
    double t = w - x;
    return 1.0 - t * t / (2.0 * w * w);
}

// Cumulative of the uniform density on [-w,w].
double box_cdf(double x, double w) {
    if (x <= -w) return 0.0;
    if (x >= w) return 1.0;
    return (x + w) / (2.0 * w);
}

// Cell averages of one periodized axis factor with cumulative `cdf`.  Cells
// are centered at j/m; values are computed for j <= m/2 and mirrored so the
// symmetry K[j] = K[m-j] is bit-exact.
template <class Cdf>
std::vector<double> axis_averages(int m, int images, Cdf cdf) {
    const double h = 1.0 / m;
    std::vector<double> av(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j <= m / 2; ++j) {
        const double c = static_cast<double>(j) / m;
        double s = 0.0;
        for (int n = -images; n <= images; ++n)
            s += cdf(c + 0.5 * h + n) - cdf(c - 0.5 * h + n);
        av[static_cast<std::size_t>(j)] = s / h;
        if (j > 0 && j < m - j) av[static_cast<std::size_t>(m - j)] = s / h;
    }
    return av;
}

void normalize_mass(GridDensity& g) {
    double total = 0.0;
    for (double x : g.v) total += x;
    total *= g.cell_volume();
    if (total <= 0.0) throw ResolutionError("kernel grid has no mass");
    for (double& x : g.v) x /= total;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// sup of |f| over [x0, x0 + 2 pi], dense scan; used for the tail suprema of
// oscillatory symbols (the 1/x envelope makes later periods smaller).
template <class F>
double scan_sup(double x0, F f) {
    double best = 0.0;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
        double x = x0 + 2.0 * kPi * i / n;
        best = std::max(best, std::fabs(f(x)));
    }
    return best;
}

double unit_ball_volume(int d) {
    // pi^{d/2} / Gamma(d/2 + 1)
    return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

} // namespace

NoiseKernel NoiseKernel::gaussian(int d, double eps, std::vector<double> diag_cov) {
    NoiseKernel k;
    k.kind_ = KernelKind::Gaussian;
    k.d_ = d;
    k.eps_ = eps;
    if (diag_cov.empty()) diag_cov.assign(static_cast<std::size_t>(d), 1.0);
    if (static_cast<int>(diag_cov.size()) != d)
        throw ConfigError("gaussian covariance diagonal has wrong dimension");
    for (double v : diag_cov)
        if (!(v > 0)) throw ConfigError("gaussian covariance must be positive definite");
    k.diag_ = std::move(diag_cov);
    if (!(eps > 0)) throw DomainError("kernel eps must be positive");
    return k;
}

NoiseKernel NoiseKernel::ball_uniform(int d, double eps) {
    NoiseKernel k;
    k.kind_ = KernelKind::BallUniform;
    k.d_ = d;
    k.eps_ = eps;
    if (!(eps > 0 && eps <= 0.5)) throw DomainError("ball kernel needs eps in (0, 1/2]");
    return k;
}

NoiseKernel NoiseKernel::tensor_tent(int d, double eps) {
    NoiseKernel k;
    k.kind_ = KernelKind::TensorTent;
    k.d_ = d;
    k.eps_ = eps;
    if (!(eps > 0 && eps <= 0.5)) throw DomainError("tent kernel needs eps in (0, 1/2]");
    return k;
}

NoiseKernel NoiseKernel::tensor_uniform(int d, double eps) {
    NoiseKernel k;
    k.kind_ = KernelKind::TensorUniform;
    k.d_ = d;
    k.eps_ = eps;
    if (!(eps > 0 && eps <= 1.0)) throw DomainError("uniform kernel needs eps in (0, 1]");
    return k;
}

NoiseKernel NoiseKernel::tabulated(GridDensity values, double eps) {
    NoiseKernel k;
    k.kind_ = KernelKind::GridTabulated;
    k.d_ = values.d;
    k.eps_ = eps;
    for (double v : values.v)
        if (v < 0) throw DomainError("tabulated kernel must be nonnegative");
    k.tab_ = std::move(values);
    normalize_mass(k.tab_);
    return k;
}

bool NoiseKernel::compact_eps_support() const {
    switch (kind_) {
        case KernelKind::BallUniform: return true;
        case KernelKind::TensorTent: return d_ == 1;
        case KernelKind::TensorUniform: return d_ <= 4; // cube radius eps*sqrt(d)/2
        default: return false;
    }
}

GridDensity NoiseKernel::grid(int m) const {
    if (m < 4) throw ResolutionError("kernel grid needs m >= 4");
    const bool compact = kind_ != KernelKind::Gaussian && kind_ != KernelKind::GridTabulated;
    if (compact && eps_ * m < 2.0)
        throw ResolutionError("kernel support under two cells; raise m or eps");

    GridDensity g(d_, m);
    switch (kind_) {
        case KernelKind::Gaussian: {
            std::vector<std::vector<double>> ax(static_cast<std::size_t>(d_));
            for (int a = 0; a < d_; ++a) {
                const double sigma = eps_ * std::sqrt(diag_[static_cast<std::size_t>(a)]);
                const int images = 1 + static_cast<int>(std::ceil(8.0 * sigma));
                ax[static_cast<std::size_t>(a)] = axis_averages(
                    m, images, [sigma](double x) { return normal_cdf(x, sigma); });
            }
            std::vector<int> ix(static_cast<std::size_t>(d_), 0);
            for (std::size_t f = 0; f < g.size(); ++f) {
                std::size_t rem = f;
                double val = 1.0;
                for (int a = d_ - 1; a >= 0; --a) {
                    val *= ax[static_cast<std::size_t>(a)][rem % m];
                    rem /= m;
                }
                g.v[f] = val;
            }
            break;
        }
        case KernelKind::BallUniform: {
            if (d_ == 1) {
                const double w = eps_;
                g.v = axis_averages(m, 2, [w](double x) { return box_cdf(x, w); });
            } else {
                // subcell quadrature of the ball indicator, canonical octant
                const int q = 4;
                const double h = 1.0 / m;
                const double inv_vol = 1.0 / (unit_ball_volume(d_) * std::pow(eps_, d_));
                std::vector<int> ix(static_cast<std::size_t>(d_), 0);
                for (std::size_t f = 0; f < g.size(); ++f) {
                    std::size_t rem = f;
                    std::vector<double> c(static_cast<std::size_t>(d_));
                    for (int a = d_ - 1; a >= 0; --a) {
                        int j = static_cast<int>(rem % m);
                        rem /= m;
                        c[static_cast<std::size_t>(a)] = (j <= m / 2 ? j : j - m) * h;
                    }
                    double acc = 0.0;
                    std::vector<int> sub(static_cast<std::size_t>(d_), 0);
                    const int subcells = static_cast<int>(std::pow(q, d_));
                    for (int t = 0; t < subcells; ++t) {
                        int r = t;
                        double r2 = 0.0;
                        for (int a = 0; a < d_; ++a) {
                            const double off = ((r % q) + 0.5) / q - 0.5;
                            r /= q;
                            const double x = c[static_cast<std::size_t>(a)] + off * h;
                            r2 += x * x;
                        }
                        if (r2 <= eps_ * eps_) acc += 1.0;
                    }
                    g.v[f] = acc / subcells * inv_vol;
                }
            }
            break;
        }
        case KernelKind::TensorTent:
        case KernelKind::TensorUniform: {
            const double w = kind_ == KernelKind::TensorTent ? eps_ : 0.5 * eps_;
            std::vector<double> ax =
                kind_ == KernelKind::TensorTent
                    ? axis_averages(m, 2, [w](double x) { return tent_cdf(x, w); })
                    : axis_averages(m, 2, [w](double x) { return box_cdf(x, w); });
            for (std::size_t f = 0; f < g.size(); ++f) {
                std::size_t rem = f;
                double val = 1.0;
                for (int a = d_ - 1; a >= 0; --a) {
                    val *= ax[rem % m];
                    rem /= m;
                }
                g.v[f] = val;
            }
            break;
        }
        case KernelKind::GridTabulated: {
            if (tab_.m != m || tab_.d != d_)
                throw UnsupportedError("tabulated kernel is fixed to its own grid");
            g = tab_;
            break;
        }
    }
    normalize_mass(g);
    return g;
}

std::optional<double> NoiseKernel::closed_fourier(const std::vector<int>& k) const {
    if (static_cast<int>(k.size()) != d_) throw SizeMismatchError("fourier: wrong k dimension");
    switch (kind_) {
        case KernelKind::Gaussian: {
            double s = 0.0;
            for (int a = 0; a < d_; ++a)
                s += diag_[static_cast<std::size_t>(a)] * static_cast<double>(k[a]) * k[a];
            return std::exp(-2.0 * kPi * kPi * eps_ * eps_ * s);
        }
        case KernelKind::BallUniform: {
            if (d_ != 1) return std::nullopt;
            return sinc(2.0 * kPi * k[0] * eps_);
        }
        case KernelKind::TensorUniform: {
            double v = 1.0;
            for (int a = 0; a < d_; ++a) v *= sinc(kPi * k[a] * eps_);
            return v;
        }
        case KernelKind::TensorTent: {
            double v = 1.0;
            for (int a = 0; a < d_; ++a) {
                double s = sinc(kPi * k[a] * eps_);
                v *= s * s;
            }
            return v;
        }
        default: return std::nullopt;
    }
}

double NoiseKernel::fourier(const std::vector<int>& k, int fallback_m) const {
    if (auto cf = closed_fourier(k)) return *cf;
    int m = fallback_m;
    if (m == 0 && kind_ == KernelKind::GridTabulated) m = tab_.m;
    if (m == 0) throw UnsupportedError("no closed-form transform; pass a fallback grid size");
    GridDensity g = grid(m);
    // direct sum; symmetry makes the coefficient real
    double acc = 0.0;
    const double vol = g.cell_volume();
    for (std::size_t f = 0; f < g.size(); ++f) {
        std::size_t rem = f;
        double phase = 0.0;
        for (int a = d_ - 1; a >= 0; --a) {
            int j = static_cast<int>(rem % m);
            rem /= m;
            phase += static_cast<double>(k[a]) * j / m;
        }
        acc += g.v[f] * std::cos(2.0 * kPi * phase);
    }
    return acc * vol;
}

std::vector<double> NoiseKernel::sample(Rng& rng) const {
    std::vector<double> z(static_cast<std::size_t>(d_), 0.0);
    switch (kind_) {
        case KernelKind::Gaussian:
            for (int a = 0; a < d_; ++a)
                z[static_cast<std::size_t>(a)] =
                    eps_ * std::sqrt(diag_[static_cast<std::size_t>(a)]) * rng.normal();
            break;
        case KernelKind::BallUniform: {
            if (d_ == 1) {
                z[0] = eps_ * (2.0 * rng.unif() - 1.0);
            } else {
                while (true) {
                    double r2 = 0.0;
                    for (int a = 0; a < d_; ++a) {
                        z[static_cast<std::size_t>(a)] = 2.0 * rng.unif() - 1.0;
                        r2 += z[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(a)];
                    }
                    if (r2 <= 1.0) break;
                }
                for (double& x : z) x *= eps_;
            }
            break;
        }
        case KernelKind::TensorTent:
            // tent on [-1,1] is the sum of two uniforms on [-1/2,1/2]
            for (int a = 0; a < d_; ++a)
                z[static_cast<std::size_t>(a)] = eps_ * ((rng.unif() - 0.5) + (rng.unif() - 0.5));
            break;
        case KernelKind::TensorUniform:
            for (int a = 0; a < d_; ++a) z[static_cast<std::size_t>(a)] = eps_ * (rng.unif() - 0.5);
            break;
        case KernelKind::GridTabulated: {
            // inverse CDF over cells, uniform inside the chosen cell
            const double u = rng.unif();
            double acc = 0.0;
            const double vol = tab_.cell_volume();
            std::size_t pick = tab_.size() - 1;
            for (std::size_t f = 0; f < tab_.size(); ++f) {
                acc += tab_.v[f] * vol;
                if (u < acc) {
                    pick = f;
                    break;
                }
            }
            std::size_t rem = pick;
            const double h = 1.0 / tab_.m;
            for (int a = d_ - 1; a >= 0; --a) {
                int j = static_cast<int>(rem % tab_.m);
                rem /= tab_.m;
                double x = j * h + (rng.unif() - 0.5) * h; // cells centered at j/m
                if (x > 0.5) x -= 1.0;
                z[static_cast<std::size_t>(a)] = x;
            }
            break;
        }
    }
    return z;
}

KernelStats NoiseKernel::stats(double c, double eta) const {
    if (!(c > 0) || !(eta > 0)) throw DomainError("kernel stats need c > 0 and eta > 0");
    KernelStats st;

    // quadrature with refinement until both integrals settle below 1e-6
    int m = 256;
    if (kind_ != KernelKind::Gaussian && kind_ != KernelKind::GridTabulated)
        while (m * eps_ < 8.0) m *= 2;
    if (kind_ == KernelKind::GridTabulated) m = tab_.m;
    const int max_m = d_ == 1 ? (1 << 20) : 2048;
    double fm_prev = 0.0, l2_prev = 0.0;
    for (;;) {
        GridDensity g = grid(m);
        double fm = 0.0, l2 = 0.0;
        const double vol = g.cell_volume();
        for (std::size_t f = 0; f < g.size(); ++f) {
            std::size_t rem = f;
            double dist2 = 0.0;
            for (int a = d_ - 1; a >= 0; --a) {
                int j = static_cast<int>(rem % m);
                rem /= m;
                double w = std::min(static_cast<double>(j), static_cast<double>(m - j)) / m;
                dist2 += w * w;
            }
            fm += g.v[f] * std::sqrt(dist2) * vol;
            l2 += g.v[f] * g.v[f] * vol;
        }
        bool settled = m > 256 && std::fabs(fm - fm_prev) < 1e-6 &&
                       std::fabs(std::sqrt(l2) - l2_prev) < 1e-6;
        fm_prev = fm;
        l2_prev = std::sqrt(l2);
        if (settled || m >= max_m || kind_ == KernelKind::GridTabulated) break;
        m *= 2;
    }
    st.first_moment = fm_prev;
    st.bold_K = std::pow(eps_, 0.5 * d_) * l2_prev;
    st.first_moment_leq_eps = st.first_moment <= eps_ * (1.0 + 1e-12);

    // tail supremum of the symbol beyond frequency c/eps
    switch (kind_) {
        case KernelKind::Gaussian: {
            double dmin = *std::min_element(diag_.begin(), diag_.end());
            st.chi_tail = std::exp(-2.0 * kPi * kPi * c * c * dmin);
            break;
        }
        case KernelKind::BallUniform:
            if (d_ == 1) {
                st.chi_tail = scan_sup(2.0 * kPi * c, [](double x) { return sinc(x); });
                break;
            }
            [[fallthrough]];
        case KernelKind::GridTabulated: {
            // scan lattice frequencies just past the threshold
            double best = 0.0;
            int k0 = static_cast<int>(std::floor(c / eps_)) + 1;
            int mm = kind_ == KernelKind::GridTabulated ? tab_.m : 1024;
            for (int k = k0; k < k0 + 64 && k <= mm / 2; ++k) {
                std::vector<int> kv(static_cast<std::size_t>(d_), 0);
                kv[0] = k;
                best = std::max(best, std::fabs(fourier(kv, mm)));
            }
            st.chi_tail = best;
            break;
        }
        case KernelKind::TensorUniform:
            st.chi_tail = scan_sup(kPi * c, [](double x) { return sinc(x); });
            break;
        case KernelKind::TensorTent:
            st.chi_tail = scan_sup(kPi * c, [](double x) { return sinc(x) * sinc(x); });
            break;
    }
    st.chi_lt_1 = st.chi_tail < 1.0;

    // base-factor moments (tensor kinds only)
    switch (kind_) {
        case KernelKind::Gaussian: {
            double smax = 0.0, smin = 1e300;
            for (double v : diag_) {
                smax = std::max(smax, std::sqrt(v));
                smin = std::min(smin, std::sqrt(v));
            }
            st.tensor_factors = true;
            st.A = smax * std::sqrt(2.0 / kPi);
            st.A_lower = smin / std::sqrt(2.0 * kPi) * (1.0 - std::exp(-0.125 / (smin * smin)));
            break;
        }
        case KernelKind::BallUniform:
            st.tensor_factors = d_ == 1;
            if (d_ == 1) {
                st.A = 0.5;       // int |x|/2 over [-1,1]
                st.A_lower = 1.0 / 16.0;
            }
            break;
        case KernelKind::TensorTent:
            st.tensor_factors = true;
            st.A = 1.0 / 3.0;
            st.A_lower = 1.0 / 12.0; // int_0^{1/2} x (1-x) dx
            break;
        case KernelKind::TensorUniform:
            st.tensor_factors = true;
            st.A = 0.25;
            st.A_lower = 0.125;
            break;
        case KernelKind::GridTabulated: break;
    }

    // kappa: infimum of the base density over differences of [0,eta)^d
    switch (kind_) {
        case KernelKind::Gaussian: {
            double v = 1.0;
            for (double var : diag_)
                v *= std::exp(-eta * eta / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
            st.kappa = v;
            break;
        }
        case KernelKind::BallUniform:
            st.kappa = eta * std::sqrt(static_cast<double>(d_)) <= 1.0
                           ? 1.0 / unit_ball_volume(d_)
                           : 0.0;
            break;
        case KernelKind::TensorTent:
            st.kappa = eta < 1.0 ? std::pow(1.0 - eta, d_) : 0.0;
            break;
        case KernelKind::TensorUniform: st.kappa = eta < 0.5 ? 1.0 : 0.0; break;
        case KernelKind::GridTabulated: st.kappa = 0.0; break;
    }
    return st;
}

std::string NoiseKernel::signature() const {
    std::ostringstream os;
    os << "k" << static_cast<int>(kind_) << ";d" << d_ << ";e";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", eps_);
    os << buf;
    for (double v : diag_) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        os << buf;
    }
    if (kind_ == KernelKind::GridTabulated) os << ";m" << tab_.m;
    return os.str();
}

} // namespace tmix
