#pragma once

// Experiment configuration: map presets, JSON ingestion, grid-size policy.
//
// Map JSON:
//   {"d": 1, "branches": [{"origin": [0], "side": "1/3", "D": [[1]], "e": [0]}, ...]}
// Fractions may be given as "a/b" strings for exactness; plain numbers are
// converted through their exact binary value.  "side" is a scalar for cube
// cells or a per-axis array (which validation will reject as non-cube).
//
// Kernel JSON: {"kind": "gaussian"|"ball"|"tensor_tent"|"tensor_uniform",
//               "epsilon": 0.01, "covariance": [[...]] (diagonal, optional)}

#include <cstdint>
#include <string>
#include <vector>

#include "tmix/kernels.hpp"
#include "tmix/maps.hpp"

namespace tmix {

BernoulliMap preset_map(const std::string& name); // doubling | intro3 | quad2d | identity

BernoulliMap map_from_json_text(const std::string& text);

struct KernelSpec {
    KernelKind kind = KernelKind::Gaussian;
    std::vector<double> diag; // gaussian only; empty = identity
    double epsilon = 0.0;     // default eps; sweeps override per point

    NoiseKernel make(int d, double eps) const;
};

struct ExperimentConfig {
    std::string map_name; // preset name or "custom"
    std::string map_json; // original JSON for custom maps (for the manifest)
    KernelSpec kernel;
    std::vector<double> epsilons;
    std::vector<double> deltas{0.5};
    int grid_exp = 14; // target grid 2^grid_exp, aligned to the map denominator
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int workers = 0; // 0: hardware threads

    BernoulliMap make_map() const;
    // canonical serialization used for the manifest hash
    std::string canonical() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);

// Smallest multiple of the map's cell denominator of the form den * 2^j that
// is >= 2^target_exp (so branch cells land on grid lines).
int grid_size_for(const BernoulliMap& map, int target_exp);

} // namespace tmix
