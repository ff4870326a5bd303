#pragma once

// Deterministic random streams.  mt19937_64 output is pinned by the standard
// and the uniform/normal maps below are written out explicitly, so identical
// seeds give identical sequences on any platform.

#include <cmath>
#include <cstdint>
#include <random>

namespace tmix {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // U[0,1) with 53 random bits.
    double unif() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = unif(), u2 = unif();
        while (u1 <= 0.0) u1 = unif();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    std::uint64_t raw() { return gen_(); }

    // Independent substream for worker w; mixes the index so nearby workers
    // do not share prefixes.
    static Rng substream(std::uint64_t seed, std::uint64_t w) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (w + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace tmix
