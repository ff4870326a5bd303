#include "tmix/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace tmix {

void GridDensity::sync_from_exact() {
    if (!exact) return;
    if (exact->size() != v.size()) throw SizeMismatchError("exact channel size mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = to_double((*exact)[i]);
}

double GridDensity::mean() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double GridDensity::l1() const {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s / static_cast<double>(v.size());
}

double GridDensity::l2() const {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

double GridDensity::tv_to_uniform() const {
    double s = 0.0;
    for (double x : v) s += std::fabs(x - 1.0);
    return 0.5 * s / static_cast<double>(v.size());
}

double GridDensity::l2_to_uniform() const {
    double s = 0.0;
    for (double x : v) s += (x - 1.0) * (x - 1.0);
    return std::sqrt(s / static_cast<double>(v.size()));
}

void GridDensity::subtract_mean() {
    double mu = mean();
    for (double& x : v) x -= mu;
    drop_exact();
}

Distances distances(const GridDensity& f) {
    return Distances{f.tv_to_uniform(), f.l2_to_uniform()};
}

void write_density_csv(const GridDensity& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "index,value\n";
    char buf[64];
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, f.v[i]);
        out << buf;
    }
}

static constexpr char kMagic[8] = {'T', 'M', 'I', 'X', 'G', 'R', 'D', '1'};

void write_density_binary(const GridDensity& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    std::uint32_t d = static_cast<std::uint32_t>(f.d), m = static_cast<std::uint32_t>(f.m);
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&d), 4);
    out.write(reinterpret_cast<const char*>(&m), 4);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(double)));
}

GridDensity read_density_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[8];
    std::uint32_t d = 0, m = 0;
    in.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw IoError("bad density dump magic in " + path);
    in.read(reinterpret_cast<char*>(&d), 4);
    in.read(reinterpret_cast<char*>(&m), 4);
    GridDensity f(static_cast<int>(d), static_cast<int>(m));
    in.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!in) throw IoError("truncated density dump " + path);
    return f;
}

} // namespace tmix
