#include "tmix/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tmix/errors.hpp"

namespace tmix {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void atomic_write_text(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) ensure_dir(target.parent_path().string());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string());
        out << content;
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {
std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}
} // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "epsilon,delta,t_mix,t_dis,method,slope_fit_running,theory_lower,theory_upper,wall_ms\n";
    for (const SweepRow& r : rows) {
        out += fmt(r.epsilon);
        out += ',';
        out += fmt(r.delta);
        out += ',';
        if (r.t_mix) out += std::to_string(*r.t_mix);
        out += ',';
        if (r.t_dis) out += std::to_string(*r.t_dis);
        out += ',';
        out += r.method;
        out += ',';
        if (r.slope_fit_running) out += fmt(*r.slope_fit_running);
        out += ',';
        if (r.theory_lower) out += fmt(*r.theory_lower);
        out += ',';
        if (r.theory_upper) out += fmt(*r.theory_upper);
        out += ',';
        out += fmt(r.wall_ms);
        out += '\n';
    }
    return out;
}

std::string plot_data(const std::vector<std::pair<double, double>>& pts) {
    std::string out;
    for (const auto& [x, y] : pts) {
        out += fmt(x);
        out += ' ';
        out += fmt(y);
        out += '\n';
    }
    return out;
}

std::string RunManifest::to_json_text() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["outputs"] = outputs;
    j["wall_ms"] = wall_ms;
    return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& man, const std::string& dir) {
    atomic_write_text(dir + "/manifest_" + man.command + ".json", man.to_json_text());
}

} // namespace tmix
