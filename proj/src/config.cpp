#include "tmix/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "tmix/errors.hpp"

namespace tmix {

using nlohmann::json;

namespace {

Rat rat_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_number_float()) return rational_from_double(j.get<double>());
    throw ConfigError("expected a number or fraction string");
}

AffineBranch branch_from_json(const json& j, int d) {
    AffineBranch b;
    const json& origin = j.at("origin");
    if (static_cast<int>(origin.size()) != d) throw ConfigError("branch origin has wrong size");
    for (const auto& v : origin) b.cell.origin.push_back(rat_from_json(v));

    const json& side = j.at("side");
    if (side.is_array()) {
        if (static_cast<int>(side.size()) != d) throw ConfigError("branch side has wrong size");
        for (const auto& v : side) b.cell.sides.push_back(rat_from_json(v));
    } else {
        Rat s = rat_from_json(side);
        b.cell.sides.assign(static_cast<std::size_t>(d), s);
    }

    if (j.contains("D")) {
        std::vector<std::vector<int>> mat;
        for (const auto& row : j.at("D")) mat.push_back(row.get<std::vector<int>>());
        b.D = SignedPerm::from_matrix(mat);
    } else {
        b.D = SignedPerm::identity(d);
    }

    if (j.contains("e")) {
        const json& e = j.at("e");
        if (static_cast<int>(e.size()) != d) throw ConfigError("branch offset has wrong size");
        for (const auto& v : e) b.offset.push_back(rat_from_json(v));
    } else {
        // default: shift so the cell maps onto [0,1]^d
        b.offset.assign(static_cast<std::size_t>(d), Rat(0));
        for (int r = 0; r < d; ++r) {
            const int c = b.D.perm[static_cast<std::size_t>(r)];
            const Rat& o = b.cell.origin[static_cast<std::size_t>(c)];
            const Rat& s = b.cell.sides[static_cast<std::size_t>(c)];
            b.offset[static_cast<std::size_t>(r)] =
                b.D.sign[static_cast<std::size_t>(r)] > 0 ? Rat(-o / s) : Rat(o / s + 1);
        }
    }
    return b;
}

BernoulliMap map_from_json(const json& j) {
    const int d = j.at("d").get<int>();
    std::vector<AffineBranch> branches;
    for (const auto& bj : j.at("branches")) branches.push_back(branch_from_json(bj, d));
    return BernoulliMap(d, std::move(branches));
}

json preset_json(const std::string& name) {
    if (name == "doubling") {
        return json::parse(R"({"d": 1, "branches": [
            {"origin": ["0"], "side": "1/2", "D": [[1]], "e": ["0"]},
            {"origin": ["1/2"], "side": "1/2", "D": [[1]], "e": ["-1"]}]})");
    }
    if (name == "intro3") {
        // 3x on [0,1/3), 3(1-x)/2 on [1/3,1)
        return json::parse(R"({"d": 1, "branches": [
            {"origin": ["0"], "side": "1/3", "D": [[1]], "e": ["0"]},
            {"origin": ["1/3"], "side": "2/3", "D": [[-1]], "e": ["3/2"]}]})");
    }
    if (name == "quad2d") {
        // four quadrant cells, each expanded by 2 onto the square
        json branches = json::array();
        for (int ix = 0; ix < 2; ++ix)
            for (int iy = 0; iy < 2; ++iy) {
                json b;
                b["origin"] = {ix == 0 ? "0" : "1/2", iy == 0 ? "0" : "1/2"};
                b["side"] = "1/2";
                b["D"] = {{1, 0}, {0, 1}};
                b["e"] = {std::to_string(-ix), std::to_string(-iy)};
                branches.push_back(b);
            }
        json j;
        j["d"] = 2;
        j["branches"] = branches;
        return j;
    }
    if (name == "identity") {
        return json::parse(R"({"d": 1, "branches": [
            {"origin": ["0"], "side": "1", "D": [[1]], "e": ["0"]}]})");
    }
    throw ConfigError("unknown map preset '" + name + "'");
}

KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "gaussian") return KernelKind::Gaussian;
    if (s == "ball") return KernelKind::BallUniform;
    if (s == "tensor_tent") return KernelKind::TensorTent;
    if (s == "tensor_uniform") return KernelKind::TensorUniform;
    throw ConfigError("unknown kernel kind '" + s + "'");
}

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Gaussian: return "gaussian";
        case KernelKind::BallUniform: return "ball";
        case KernelKind::TensorTent: return "tensor_tent";
        case KernelKind::TensorUniform: return "tensor_uniform";
        case KernelKind::GridTabulated: return "tabulated";
    }
    return "?";
}

} // namespace

BernoulliMap preset_map(const std::string& name) { return map_from_json(preset_json(name)); }

BernoulliMap map_from_json_text(const std::string& text) {
    try {
        return map_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("map JSON: ") + e.what());
    }
}

NoiseKernel KernelSpec::make(int d, double eps) const {
    switch (kind) {
        case KernelKind::Gaussian: return NoiseKernel::gaussian(d, eps, diag);
        case KernelKind::BallUniform: return NoiseKernel::ball_uniform(d, eps);
        case KernelKind::TensorTent: return NoiseKernel::tensor_tent(d, eps);
        case KernelKind::TensorUniform: return NoiseKernel::tensor_uniform(d, eps);
        default: throw ConfigError("tabulated kernels are not configurable from JSON");
    }
}

BernoulliMap ExperimentConfig::make_map() const {
    return map_name == "custom" ? map_from_json_text(map_json) : preset_map(map_name);
}

std::string ExperimentConfig::canonical() const {
    json j;
    j["map"] = map_name == "custom" ? json::parse(map_json) : json(map_name);
    j["kernel"] = {{"kind", kernel_kind_name(kernel.kind)}, {"epsilon", kernel.epsilon}};
    if (!kernel.diag.empty()) j["kernel"]["covariance_diag"] = kernel.diag;
    j["epsilons"] = epsilons;
    j["deltas"] = deltas;
    j["grid_exp"] = grid_exp;
    j["seed"] = seed;
    j["workers"] = workers;
    return j.dump();
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (!j.contains("seed")) throw ConfigError("config requires a seed");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    const json& mj = j.at("map");
    if (mj.is_string()) {
        cfg.map_name = mj.get<std::string>();
        preset_json(cfg.map_name); // validates the name
    } else {
        cfg.map_name = "custom";
        cfg.map_json = mj.dump();
    }

    if (j.contains("kernel")) {
        const json& kj = j.at("kernel");
        cfg.kernel.kind = kernel_kind_from_string(kj.value("kind", "gaussian"));
        cfg.kernel.epsilon = kj.value("epsilon", 0.0);
        if (kj.contains("covariance")) {
            // accept a diagonal matrix or a flat diagonal
            const json& cov = kj.at("covariance");
            if (cov.is_array() && !cov.empty() && cov[0].is_array()) {
                for (std::size_t r = 0; r < cov.size(); ++r) {
                    for (std::size_t c = 0; c < cov[r].size(); ++c) {
                        const double v = cov[r][c].get<double>();
                        if (r != c && v != 0.0)
                            throw UnsupportedError(
                                "only diagonal Gaussian covariance is supported");
                        if (r == c) cfg.kernel.diag.push_back(v);
                    }
                }
            } else {
                cfg.kernel.diag = cov.get<std::vector<double>>();
            }
        }
    }

    if (j.contains("epsilons")) cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
    else if (cfg.kernel.epsilon > 0) cfg.epsilons = {cfg.kernel.epsilon};
    for (double e : cfg.epsilons)
        if (!(e > 0.0 && e <= 0.25)) throw ConfigError("epsilon values must lie in (0, 1/4]");

    if (j.contains("deltas")) cfg.deltas = j.at("deltas").get<std::vector<double>>();
    for (double dl : cfg.deltas)
        if (!(dl > 0.0 && dl < 1.0)) throw ConfigError("delta values must lie in (0,1)");

    cfg.grid_exp = j.value("grid_exp", 14);
    cfg.out_dir = j.value("out", "out");
    cfg.workers = j.value("workers", 0);
    return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

int grid_size_for(const BernoulliMap& map, int target_exp) {
    long long den = 1;
    if (map.cell_denominator() < 4096) den = map.cell_denominator().convert_to<long long>();
    const long long target = 1LL << target_exp;
    long long m = den;
    while (m < target) m *= 2;
    if (m > (1 << 24)) throw DomainError("grid size overflow");
    return static_cast<int>(m);
}

} // namespace tmix
