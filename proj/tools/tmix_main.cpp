// tmix: numerical laboratory for noisy Bernoulli maps on the torus.
//
// Subcommands:
//   validate       check a map against the admissibility conditions
//   sweep-mix      mixing time t_mix(delta) across the eps list
//   sweep-dis      dissipation time t_dis(delta) across the eps list
//   verify-eigen   certify the convolution eigen-inequality for the kernel
//   verify-pcmix   piecewise-constant leakage bound check
//   verify-duality measured t_mix / t_dis comparison inequalities
//   spectral       exact Fourier decay curves for phi(x) = Nx
//   mc-crosscheck  particle histograms vs density evolution
//   report         collect sweep CSVs into a summary
//
// Every command writes its outputs atomically under --out and records a
// manifest with the config hash; identical config + seed reproduces the
// files byte for byte.  Exit status is nonzero iff a checked inequality
// failed (or I/O / config errors).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "tmix/bounds.hpp"
#include "tmix/bump.hpp"
#include "tmix/config.hpp"
#include "tmix/metrics.hpp"
#include "tmix/report.hpp"
#include "tmix/spectral.hpp"
#include "tmix/transfer.hpp"

using namespace tmix;
using nlohmann::json;

namespace {

struct Cli {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    int grid_exp = 0;
    double delta = 0.0;
};

ExperimentConfig load_config(const Cli& cli) {
    ExperimentConfig cfg;
    if (!cli.config_path.empty()) {
        cfg = config_from_file(cli.config_path);
    } else {
        cfg.map_name = cli.preset.empty() ? "doubling" : cli.preset;
        cfg.kernel.kind = KernelKind::Gaussian;
        cfg.epsilons = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512,
                        1.0 / 1024, 1.0 / 2048, 1.0 / 4096};
        cfg.seed = 20240101;
    }
    if (!cli.preset.empty()) cfg.map_name = cli.preset;
    if (cli.seed_set) cfg.seed = cli.seed;
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    if (cli.workers > 0) cfg.workers = cli.workers;
    if (cli.grid_exp > 0) cfg.grid_exp = cli.grid_exp;
    if (cli.delta > 0.0) cfg.deltas = {cli.delta};
    return cfg;
}

int worker_count(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i < n on a bounded pool; results land in index order.
template <class Fn>
void parallel_indices(int n, int workers, Fn fn) {
    std::vector<std::future<void>> futs;
    int next = 0;
    while (next < n || !futs.empty()) {
        while (next < n && static_cast<int>(futs.size()) < workers) {
            futs.push_back(std::async(std::launch::async, fn, next));
            ++next;
        }
        futs.front().get();
        futs.erase(futs.begin());
    }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

RunManifest manifest_for(const std::string& command, const ExperimentConfig& cfg) {
    RunManifest man;
    man.command = command;
    man.config_hash = fnv1a(cfg.canonical());
    return man;
}

// ---------------------------------------------------------------- validate
int cmd_validate(const ExperimentConfig& cfg, int depth) {
    BernoulliMap map = cfg.make_map();
    ValidationReport rep = map.validate(depth);
    std::printf("map %s: d=%d branches=%d p_min=%.6g p_max=%.6g\n", cfg.map_name.c_str(),
                map.dim(), map.branch_count(), rep.p_min, rep.p_max);
    std::printf("  branch bijections onto [0,1)^d : %s\n", rep.branches_bijective ? "ok" : "FAIL");
    std::printf("  cells disjoint / tile          : %s / %s\n", rep.cells_disjoint ? "ok" : "FAIL",
                rep.cells_cover ? "ok" : "FAIL");
    std::printf("  boundary has interior preimage : %s\n", rep.boundary_covered ? "ok" : "FAIL");
    std::printf("  cylinders to depth %-2d are cubes: %s\n", depth,
                rep.cylinders_cubes ? "ok" : "FAIL");
    if (!rep.detail.empty()) std::printf("  detail: %s\n", rep.detail.c_str());
    if (rep.first_noncube) std::printf("  first non-cube: %s\n", rep.first_noncube->str().c_str());
    return rep.ok() ? 0 : 1;
}

// -------------------------------------------------------------- sweep-mix
int cmd_sweep_mix(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    BernoulliMap map = cfg.make_map();
    const int m = grid_size_for(map, cfg.grid_exp);
    const double delta = cfg.deltas.front();
    const int n = static_cast<int>(cfg.epsilons.size());

    std::vector<MixResult> results(static_cast<std::size_t>(n));
    std::vector<double> wall(static_cast<std::size_t>(n), 0.0);
    parallel_indices(n, worker_count(cfg), [&](int i) {
        auto ti = std::chrono::steady_clock::now();
        const double eps = cfg.epsilons[static_cast<std::size_t>(i)];
        NoiseKernel kern = cfg.kernel.make(map.dim(), eps);
        results[static_cast<std::size_t>(i)] = measure_tmix(map, kern, eps, delta, m);
        wall[static_cast<std::size_t>(i)] = ms_since(ti);
    });

    std::vector<SweepRow> rows;
    std::vector<std::pair<double, double>> pts, plot;
    int witness_failures = 0;
    for (int i = 0; i < n; ++i) {
        const MixResult& r = results[static_cast<std::size_t>(i)];
        SweepRow row;
        row.epsilon = r.worst.eps;
        row.delta = delta;
        row.t_mix = r.worst.t;
        row.method = method_name(r.worst.method);
        if (r.witness_N && r.witness_N1)
            row.theory_lower = static_cast<double>(*r.witness_N - *r.witness_N1);
        row.wall_ms = wall[static_cast<std::size_t>(i)];
        pts.emplace_back(r.worst.eps, static_cast<double>(r.worst.t));
        plot.emplace_back(std::fabs(std::log(r.worst.eps)), static_cast<double>(r.worst.t));
        if (pts.size() >= 5) {
            try {
                row.slope_fit_running = fit_scaling_points(pts).slope;
            } catch (const InsufficientDataError&) {
            }
        }
        if (!r.witness_ok) ++witness_failures;
        rows.push_back(std::move(row));
    }
    // fitted-offset upper curve: slope from theory, offset from the data
    const double slope_e = map.dim() / std::fabs(std::log(map.p_max_d()));
    double c_fit = -1e300;
    for (const auto& [eps, t] : pts)
        c_fit = std::max(c_fit, t - slope_e * std::fabs(std::log(eps)));
    for (auto& row : rows)
        row.theory_upper = slope_e * std::fabs(std::log(row.epsilon)) + c_fit;

    ensure_dir(cfg.out_dir);
    RunManifest man = manifest_for("sweep-mix", cfg);
    const std::string csv_path = cfg.out_dir + "/sweep_mix_" + cfg.map_name + ".csv";
    atomic_write_text(csv_path, sweep_csv(rows));
    man.outputs.push_back(csv_path);
    const std::string plot_path = cfg.out_dir + "/tmix_vs_lneps_" + cfg.map_name + ".dat";
    atomic_write_text(plot_path, plot_data(plot));
    man.outputs.push_back(plot_path);
    man.wall_ms = ms_since(t0);
    write_manifest(man, cfg.out_dir);

    if (pts.size() >= 5) {
        ScalingFit fit = fit_scaling_points(pts);
        std::printf("t_mix(%g) sweep on %s: slope %.3f per octave, intercept %.2f\n", delta,
                    cfg.map_name.c_str(), fit.slope, fit.intercept);
    }
    std::printf("witness checks failed: %d\n", witness_failures);
    return witness_failures == 0 ? 0 : 1;
}

// -------------------------------------------------------------- sweep-dis
int cmd_sweep_dis(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    BernoulliMap map = cfg.make_map();
    const int m = grid_size_for(map, cfg.grid_exp > 0 ? cfg.grid_exp : 12);
    const double delta = cfg.deltas.front();
    const int n = static_cast<int>(cfg.epsilons.size());

    std::vector<DisResult> results(static_cast<std::size_t>(n));
    std::vector<double> wall(static_cast<std::size_t>(n), 0.0);
    parallel_indices(n, worker_count(cfg), [&](int i) {
        auto ti = std::chrono::steady_clock::now();
        const double eps = cfg.epsilons[static_cast<std::size_t>(i)];
        NoiseKernel kern = cfg.kernel.make(map.dim(), eps);
        DisOptions opt;
        opt.seed = cfg.seed;
        results[static_cast<std::size_t>(i)] = measure_tdis(map, kern, eps, delta, m, opt);
        wall[static_cast<std::size_t>(i)] = ms_since(ti);
    });

    std::vector<SweepRow> rows;
    std::vector<std::pair<double, double>> pts, plot;
    int witness_failures = 0;
    for (int i = 0; i < n; ++i) {
        const DisResult& r = results[static_cast<std::size_t>(i)];
        SweepRow row;
        row.epsilon = r.meas.eps;
        row.delta = delta;
        row.t_dis = r.meas.t;
        row.method = method_name(r.meas.method);
        NoiseKernel kern = cfg.kernel.make(map.dim(), r.meas.eps);
        BoundReport b = theoretical_time_bounds(map, kern, r.meas.eps, delta);
        row.theory_lower = static_cast<double>(b.tdis_lower_explicit);
        row.wall_ms = wall[static_cast<std::size_t>(i)];
        pts.emplace_back(r.meas.eps, static_cast<double>(r.meas.t));
        plot.emplace_back(std::fabs(std::log(r.meas.eps)), static_cast<double>(r.meas.t));
        if (pts.size() >= 5) {
            try {
                row.slope_fit_running = fit_scaling_points(pts).slope;
            } catch (const InsufficientDataError&) {
            }
        }
        if (r.witness && !r.witness->ok) ++witness_failures;
        rows.push_back(std::move(row));
    }
    const double slope_e = map.dim() / std::fabs(std::log(map.p_max_d()));
    double c_fit = -1e300;
    for (const auto& [eps, t] : pts)
        c_fit = std::max(c_fit, t - slope_e * std::fabs(std::log(eps)));
    for (auto& row : rows)
        row.theory_upper = slope_e * std::fabs(std::log(row.epsilon)) + c_fit;

    ensure_dir(cfg.out_dir);
    RunManifest man = manifest_for("sweep-dis", cfg);
    const std::string csv_path = cfg.out_dir + "/sweep_dis_" + cfg.map_name + ".csv";
    atomic_write_text(csv_path, sweep_csv(rows));
    man.outputs.push_back(csv_path);
    const std::string plot_path = cfg.out_dir + "/tdis_vs_lneps_" + cfg.map_name + ".dat";
    atomic_write_text(plot_path, plot_data(plot));
    man.outputs.push_back(plot_path);
    man.wall_ms = ms_since(t0);
    write_manifest(man, cfg.out_dir);

    if (pts.size() >= 5) {
        ScalingFit fit = fit_scaling_points(pts);
        std::printf("t_dis(%g) sweep on %s: slope %.3f per octave\n", delta, cfg.map_name.c_str(),
                    fit.slope);
    }
    std::printf("witness checks failed: %d\n", witness_failures);
    return witness_failures == 0 ? 0 : 1;
}

// ------------------------------------------------------------ verify-eigen
int cmd_verify_eigen(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    BernoulliMap map = cfg.make_map();
    const BumpKind kind = cfg.kernel.kind == KernelKind::Gaussian && cfg.kernel.diag.empty()
                              ? BumpKind::SineProduct
                              : BumpKind::TentProduct;
    NoiseKernel tmpl = cfg.kernel.make(map.dim(), cfg.epsilons.front());
    const int m = map.dim() == 1 ? 4096 : 512;
    EigenCertificate cert = verify_eigen_inequality(tmpl, kind, cfg.epsilons, m, &map, 1e-3);

    json j;
    j["profile"] = kind == BumpKind::SineProduct ? "sine_product" : "tent_product";
    j["a"] = cert.a;
    j["gamma"] = cert.gamma;
    j["eta"] = cert.eta;
    if (cert.beta) j["beta"] = *cert.beta;
    j["all_ok"] = cert.all_ok;
    for (const auto& e : cert.entries) {
        j["entries"].push_back({{"eps", e.eps},
                                {"bound", e.bound},
                                {"min_ratio", e.min_ratio},
                                {"margin", e.margin},
                                {"ok", e.ok}});
        std::printf("  eps=%-9g bound=%.8f measured=%.8f margin=%+.2e %s\n", e.eps, e.bound,
                    e.min_ratio, e.margin, e.ok ? "ok" : "FAIL");
    }
    ensure_dir(cfg.out_dir);
    RunManifest man = manifest_for("verify-eigen", cfg);
    const std::string path = cfg.out_dir + "/eigen_certificate.json";
    atomic_write_text(path, j.dump(2) + "\n");
    man.outputs.push_back(path);
    man.wall_ms = ms_since(t0);
    write_manifest(man, cfg.out_dir);
    return cert.all_ok ? 0 : 1;
}

// ------------------------------------------------------------ verify-pcmix
int cmd_verify_pcmix(const ExperimentConfig& cfg, int trials) {
    auto t0 = std::chrono::steady_clock::now();
    BernoulliMap map = cfg.make_map();
    const double delta = cfg.deltas.front();
    const double eps = cfg.epsilons.front();
    NoiseKernel kern = cfg.kernel.kind == KernelKind::Gaussian
                           ? NoiseKernel::ball_uniform(map.dim(), eps)
                           : cfg.kernel.make(map.dim(), eps);
    const double lam = constant_Lambda(map, 1, delta);
    if (lam * eps >= 1.0) {
        std::printf("Lambda_{1,%g} eps = %.3f >= 1: no admissible partition at this eps\n", delta,
                    lam * eps);
        return 1;
    }
    const int m = grid_size_for(map, cfg.grid_exp > 0 ? cfg.grid_exp : 12);
    auto part = map.enumerate_partition(lam * eps);
    int N = 0;
    for (const auto& c : part) N = std::max(N, c.tuple.length());
    std::vector<double> hsum(static_cast<std::size_t>(N) + 1, 0.0);
    for (int k = 1; k <= N; ++k)
        hsum[static_cast<std::size_t>(k)] =
            hsum[static_cast<std::size_t>(k - 1)] + perimeter_volume_H(map, shifted_tuples(part, k));
    const double grid_tol = N * perimeter_volume_H(part) / m;

    EvolutionOps ops(map, kern, m);
    Rng rng(cfg.seed);
    int violations = 0;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        GridDensity f0(map.dim(), m);
        for (const auto& c : part) {
            const double val = 2.0 * rng.unif() - 1.0;
            GridDensity ind = indicator_density(map, c.tuple, m);
            for (std::size_t j = 0; j < f0.size(); ++j)
                if (ind.v[j] != 0.0) f0.v[j] += val;
        }
        GridDensity u = f0, t = f0;
        for (int n2 = 1; n2 <= N; ++n2) {
            u = pushforward_U(map, u);
            t = ops.t_star(t);
            GridDensity diff(map.dim(), m);
            for (std::size_t j = 0; j < diff.size(); ++j) diff.v[j] = t.v[j] - u.v[j];
            const double lhs = diff.l1();
            const double rhs = eps * hsum[static_cast<std::size_t>(n2)] * f0.l1() + 2.0 * grid_tol;
            worst_ratio = std::max(worst_ratio, lhs / rhs);
            if (lhs > rhs) ++violations;
        }
    }
    std::printf("pcmix: N=%d partitions=%zu sumH=%.4g trials=%d violations=%d worst=%.3f\n", N,
                part.size(), hsum[static_cast<std::size_t>(N)], trials, violations, worst_ratio);
    RunManifest man = manifest_for("verify-pcmix", cfg);
    man.wall_ms = ms_since(t0);
    ensure_dir(cfg.out_dir);
    write_manifest(man, cfg.out_dir);
    return violations == 0 ? 0 : 1;
}

// ---------------------------------------------------------- verify-duality
int cmd_verify_duality(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    BernoulliMap map = cfg.make_map();
    const double delta = cfg.deltas.front();
    const double delta_q = delta * delta / 4.0;
    const int m_mix = grid_size_for(map, cfg.grid_exp);
    const int m_dis = grid_size_for(map, std::max(10, cfg.grid_exp - 2));
    const int n = static_cast<int>(cfg.epsilons.size());

    std::vector<int> tdis(static_cast<std::size_t>(n)), tq(static_cast<std::size_t>(n)),
        tp(static_cast<std::size_t>(n));
    std::vector<double> boldk(static_cast<std::size_t>(n));
    parallel_indices(n, worker_count(cfg), [&](int i) {
        const double eps = cfg.epsilons[static_cast<std::size_t>(i)];
        NoiseKernel kern = cfg.kernel.make(map.dim(), eps);
        DisOptions dopt;
        dopt.seed = cfg.seed;
        dopt.run_witness = false;
        tdis[static_cast<std::size_t>(i)] = measure_tdis(map, kern, eps, delta, m_dis, dopt).meas.t;
        tq[static_cast<std::size_t>(i)] = measure_tmix(map, kern, eps, delta_q, m_mix).worst.t;
        tp[static_cast<std::size_t>(i)] = measure_tmix(map, kern, eps, delta, m_mix).worst.t;
        boldk[static_cast<std::size_t>(i)] = kern.stats(1.0, 0.5).bold_K;
    });
    double bk = 0.0;
    for (double v : boldk) bk = std::max(bk, v);
    DualityReport rep =
        relate_tmix_tdis(cfg.epsilons, tdis, tq, tp, delta, delta, bk, map.dim(), 1);

    std::printf("duality on %s (delta=%g, bold K=%.4f):\n", cfg.map_name.c_str(), delta, bk);
    std::printf("  %-10s %-6s %-12s %-6s %-12s\n", "eps", "t_dis", "t_mix(d^2/4)", "t_mix",
                "rhs_backward");
    for (const auto& row : rep.rows)
        std::printf("  %-10g %-6d %-12d %-6d %-12.2f %s%s\n", row.eps, row.tdis, row.tmix_quarter,
                    row.tmix_dprime, row.rhs_backward, row.holds_forward ? "" : "FWD-FAIL ",
                    row.holds_backward ? "" : "BWD-FAIL");
    std::printf("violations: %d\n", rep.violations);

    json j;
    j["delta"] = delta;
    j["bold_K"] = bk;
    j["violations"] = rep.violations;
    for (const auto& row : rep.rows)
        j["rows"].push_back({{"eps", row.eps},
                             {"t_dis", row.tdis},
                             {"t_mix_quarter", row.tmix_quarter},
                             {"t_mix", row.tmix_dprime},
                             {"rhs_backward", row.rhs_backward},
                             {"forward_ok", row.holds_forward},
                             {"backward_ok", row.holds_backward}});
    ensure_dir(cfg.out_dir);
    RunManifest man = manifest_for("verify-duality", cfg);
    const std::string path = cfg.out_dir + "/duality_" + cfg.map_name + ".json";
    atomic_write_text(path, j.dump(2) + "\n");
    man.outputs.push_back(path);
    man.wall_ms = ms_since(t0);
    write_manifest(man, cfg.out_dir);
    return rep.violations == 0 ? 0 : 1;
}

// ----------------------------------------------------------------- spectral
int cmd_spectral(const ExperimentConfig& cfg, int expansion, bool crosscheck) {
    auto t0 = std::chrono::steady_clock::now();
    const double delta = cfg.deltas.front();
    ensure_dir(cfg.out_dir);
    RunManifest man = manifest_for("spectral", cfg);
    int bad = 0;
    for (double eps : cfg.epsilons) {
        DecayReport rep = decay_check(expansion, 1, eps, delta);
        std::string csv = "n,log_norm_exponent,tv_envelope_exponent,alt_denominator_exponent\n";
        for (const auto& row : rep.rows) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", row.n, row.log_norm,
                          row.log_tv_envelope, row.alt_exponent);
            csv += buf;
        }
        char name[96];
        std::snprintf(name, sizeof name, "%s/spectral_N%d_eps%.6g.csv", cfg.out_dir.c_str(),
                      expansion, eps);
        atomic_write_text(name, csv);
        man.outputs.push_back(name);
        std::printf("N=%d eps=%-9g t_dis(exact)=%d closed-form=%.2f doubling=%s\n", expansion, eps,
                    rep.tdis, rep.closed_form, rep.envelope_doubling ? "ok" : "FAIL");
        if (!rep.envelope_doubling) ++bad;
        if (crosscheck) {
            BernoulliMap map = preset_map("doubling");
            NoiseKernel kern = NoiseKernel::gaussian(1, eps);
            DisOptions dopt;
            dopt.seed = cfg.seed;
            dopt.run_witness = false;
            const int tg = measure_tdis(map, kern, eps, delta, 4096, dopt).meas.t;
            std::printf("  grid backend t_dis=%d (%+d)\n", tg, tg - rep.tdis);
            if (tg != rep.tdis) ++bad;
        }
    }
    man.wall_ms = ms_since(t0);
    write_manifest(man, cfg.out_dir);
    return bad == 0 ? 0 : 1;
}

// ------------------------------------------------------------ mc-crosscheck
int cmd_mc_crosscheck(const ExperimentConfig& cfg, int particles, int steps) {
    auto t0 = std::chrono::steady_clock::now();
    BernoulliMap map = cfg.make_map();
    const double eps = cfg.epsilons.front();
    NoiseKernel kern = cfg.kernel.make(map.dim(), eps);
    const int m = grid_size_for(map, 12);
    std::vector<double> start(static_cast<std::size_t>(map.dim()), 0.37);
    auto trace = simulate_ensemble(map, kern, steps, particles, cfg.seed, m, start);

    EvolutionOps ops(map, kern, m);
    GridDensity f(map.dim(), m);
    std::size_t flat = 0;
    for (int a = 0; a < map.dim(); ++a)
        flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(0.37 * m);
    f.v[flat] = static_cast<double>(f.size());

    const int coarse = 256;
    const int factor = m / coarse;
    auto coarsen = [&](const GridDensity& g) {
        GridDensity c(1, coarse);
        for (int j = 0; j < m; ++j)
            c.v[static_cast<std::size_t>(j / factor)] += g.v[static_cast<std::size_t>(j)] / factor;
        return c;
    };
    double worst = 0.0;
    std::string csv = "n,tv_density,tv_histogram,coarse_tv_gap\n";
    for (int n2 = 1; n2 <= steps; ++n2) {
        f = ops.t_star(f);
        GridDensity cd = coarsen(f), ch = coarsen(trace[static_cast<std::size_t>(n2)]);
        double gap = 0.0;
        for (std::size_t j = 0; j < cd.size(); ++j) gap += std::fabs(cd.v[j] - ch.v[j]);
        gap *= 0.5 / static_cast<double>(cd.size());
        worst = std::max(worst, gap);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%d,%.8f,%.8f,%.8f\n", n2, cd.tv_to_uniform(),
                      ch.tv_to_uniform(), gap);
        csv += buf;
    }
    ensure_dir(cfg.out_dir);
    RunManifest man = manifest_for("mc-crosscheck", cfg);
    const std::string path = cfg.out_dir + "/mc_crosscheck.csv";
    atomic_write_text(path, csv);
    man.outputs.push_back(path);
    man.wall_ms = ms_since(t0);
    write_manifest(man, cfg.out_dir);
    std::printf("mc-crosscheck: %d particles, %d steps, sup coarse-TV gap %.4f\n", particles,
                steps, worst);
    return worst <= 0.05 ? 0 : 1;
}

// ------------------------------------------------------------------- report
int cmd_report(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    json summary;
    std::string text = std::string(tool_version()) + " summary\n";
    int found = 0;
    for (const std::string name : {"doubling", "intro3", "quad2d", "custom"}) {
        for (const std::string kind : {"mix", "dis"}) {
            const std::string path = cfg.out_dir + "/sweep_" + kind + "_" + name + ".csv";
            std::ifstream in(path);
            if (!in) continue;
            ++found;
            std::string line;
            std::getline(in, line); // header
            std::vector<std::pair<double, double>> pts;
            double lower_ok = 1.0, upper_ok = 1.0;
            while (std::getline(in, line)) {
                std::stringstream ss(line);
                std::string field;
                std::vector<std::string> fields;
                while (std::getline(ss, field, ',')) fields.push_back(field);
                if (fields.size() < 9) continue;
                const double eps = std::stod(fields[0]);
                const std::string& tfield = kind == "mix" ? fields[2] : fields[3];
                if (tfield.empty()) continue;
                const double t = std::stod(tfield);
                pts.emplace_back(eps, t);
                if (!fields[6].empty() && std::stod(fields[6]) > t) lower_ok = 0.0;
                if (!fields[7].empty() && std::stod(fields[7]) < t - 1e-9) upper_ok = 0.0;
            }
            if (pts.size() >= 5) {
                ScalingFit fit = fit_scaling_points(pts);
                summary[name][kind] = {{"points", fit.points},
                                       {"slope_per_octave", fit.slope},
                                       {"intercept", fit.intercept},
                                       {"rms_residual", fit.rms_residual},
                                       {"sandwich_lower_ok", lower_ok == 1.0},
                                       {"sandwich_upper_ok", upper_ok == 1.0}};
                char buf[200];
                std::snprintf(buf, sizeof buf,
                              "%s %s: %d pts, slope %.3f/octave, intercept %.2f, sandwich %s\n",
                              name.c_str(), kind.c_str(), fit.points, fit.slope, fit.intercept,
                              (lower_ok == 1.0 && upper_ok == 1.0) ? "ok" : "VIOLATED");
                text += buf;
            } else {
                summary[name][kind] = {{"points", static_cast<int>(pts.size())},
                                       {"note", "insufficient data for a fit"}};
                text += name + " " + kind + ": insufficient data\n";
            }
        }
    }
    if (found == 0) {
        std::printf("report: no sweep data under %s (warning)\n", cfg.out_dir.c_str());
        text += "no sweep data found\n";
    }
    ensure_dir(cfg.out_dir);
    RunManifest man = manifest_for("report", cfg);
    atomic_write_text(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
    atomic_write_text(cfg.out_dir + "/summary.txt", text);
    man.outputs.push_back(cfg.out_dir + "/summary.json");
    man.outputs.push_back(cfg.out_dir + "/summary.txt");
    man.wall_ms = ms_since(t0);
    write_manifest(man, cfg.out_dir);
    std::fputs(text.c_str(), stdout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tmix: mixing and dissipation laboratory for noisy Bernoulli maps"};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON config file");
    app.add_option("--preset", cli.preset, "map preset: doubling|intro3|quad2d|identity");
    app.add_option("--out", cli.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", cli.seed, "RNG seed");
    app.add_option("--workers", cli.workers, "worker threads for sweeps");
    app.add_option("--grid-exp", cli.grid_exp, "target grid size exponent (m ~ 2^K)");
    app.add_option("--delta", cli.delta, "threshold delta");

    int depth = 6, expansion = 2, particles = 100000, steps = 20, trials = 20;
    bool crosscheck = false;
    auto* c_validate = app.add_subcommand("validate", "check map admissibility");
    c_validate->add_option("--depth", depth, "cylinder depth to verify");
    auto* c_mix = app.add_subcommand("sweep-mix", "mixing-time sweep");
    auto* c_dis = app.add_subcommand("sweep-dis", "dissipation-time sweep");
    auto* c_eig = app.add_subcommand("verify-eigen", "convolution eigen-inequality");
    auto* c_pc = app.add_subcommand("verify-pcmix", "piecewise-constant leakage bound");
    c_pc->add_option("--trials", trials, "random piecewise-constant fields");
    auto* c_dual = app.add_subcommand("verify-duality", "t_mix/t_dis comparison");
    auto* c_spec = app.add_subcommand("spectral", "exact decay for phi = Nx");
    c_spec->add_option("--expansion", expansion, "integer factor N >= 2");
    c_spec->add_flag("--crosscheck", crosscheck, "compare with the grid backend");
    auto* c_mc = app.add_subcommand("mc-crosscheck", "particles vs density");
    c_mc->add_option("--particles", particles, "ensemble size");
    c_mc->add_option("--steps", steps, "time steps");
    auto* c_rep = app.add_subcommand("report", "summarize sweep outputs");

    CLI11_PARSE(app, argc, argv);
    cli.seed_set = seed_opt->count() > 0;

    try {
        ExperimentConfig cfg = load_config(cli);
        if (c_validate->parsed()) return cmd_validate(cfg, depth);
        if (c_mix->parsed()) return cmd_sweep_mix(cfg);
        if (c_dis->parsed()) return cmd_sweep_dis(cfg);
        if (c_eig->parsed()) return cmd_verify_eigen(cfg);
        if (c_pc->parsed()) return cmd_verify_pcmix(cfg, trials);
        if (c_dual->parsed()) return cmd_verify_duality(cfg);
        if (c_spec->parsed()) return cmd_spectral(cfg, expansion, crosscheck);
        if (c_mc->parsed()) return cmd_mc_crosscheck(cfg, particles, steps);
        if (c_rep->parsed()) return cmd_report(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
