#pragma once

// Output plumbing: atomic file writes, the fixed sweep CSV schema, plot data
// files, and run manifests.  Atomic = write to a temp file in the target
// directory, then rename, so interrupted sweeps never leave half files.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tmix {

void ensure_dir(const std::string& dir);
void atomic_write_text(const std::string& path, const std::string& content);

std::uint64_t fnv1a(const std::string& s);

inline const char* tool_version() { return "tmix 0.1.0"; }

// One row of the sweep CSV.  Schema (fixed, versioned via the manifest):
// epsilon,delta,t_mix,t_dis,method,slope_fit_running,theory_lower,theory_upper,wall_ms
struct SweepRow {
    double epsilon = 0.0;
    double delta = 0.0;
    std::optional<int> t_mix;
    std::optional<int> t_dis;
    std::string method;
    std::optional<double> slope_fit_running;
    std::optional<double> theory_lower;
    std::optional<double> theory_upper;
    double wall_ms = 0.0;
};

std::string sweep_csv(const std::vector<SweepRow>& rows);

// Two-column plot data: |ln eps|  t
std::string plot_data(const std::vector<std::pair<double, double>>& pts);

struct RunManifest {
    std::string command;
    std::uint64_t config_hash = 0;
    std::string version = tool_version();
    std::vector<std::string> outputs;
    double wall_ms = 0.0;

    std::string to_json_text() const;
};

void write_manifest(const RunManifest& man, const std::string& dir);

} // namespace tmix
