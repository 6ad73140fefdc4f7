#pragma once

// Strict sectioned key = value configuration files.
//
//   # comment
//   [lattice]
//   kind = SshChain
//   n_sites = 10
//   cavity_freq = 7.12e9
//
// Lists are comma separated. Unknown sections or keys, duplicate keys and
// malformed values raise ConfigError carrying the source name and line.

#include "optolattice/experiment.hpp"
#include "optolattice/lattice.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace optolattice {

class ConfigError : public InputError {
public:
    ConfigError(const std::string& source, int line, const std::string& what);
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

struct ConfigEntry {
    std::string value;
    int line = 0;
};

struct ConfigDocument {
    std::string source;
    std::map<std::string, std::map<std::string, ConfigEntry>> sections;
    std::map<std::string, int> section_lines;

    [[nodiscard]] bool has(const std::string& section, const std::string& key) const;
};

/// Parses syntax only; section and key names are checked by parse_run_config.
[[nodiscard]] ConfigDocument parse_config_text(const std::string& text, const std::string& source = "<string>");

struct TopologySettings {
    int bz_points = 4096;
    int ribbon_width = 100;
    int k_points = 256;
    int graphene_grid = 512;
};

struct DisorderSettings {
    std::vector<double> sigma_grid;
    int samples = 4000;
    std::optional<double> zeta;
    double confidence = 0.9;
};

struct RecoverySettings {
    double tol = 1e-10;
    int max_iter = 10000;
    int anchor_site = -1;  // 0-based; -1 leaves g0 relative
    double anchor_g0 = 0.0;
};

struct CircuitSettings {
    double L = 0.0;
    double C = 0.0;
    double M = 0.0;
    double Mp = 0.0;
    double loop_radius = 0.0;
    double loop_separation = 0.0;
    int n_segments = 2000;
    std::vector<double> drum_radius;
    double stress = 0.0;
    double density = 0.0;
};

struct RunConfig {
    std::string source;
    std::optional<LatticeSpec> lattice;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::optional<ExperimentPlan> measurement;
    double truth_disorder = 0.0;  // sigma applied to the ground truth of measure-sim
    TopologySettings topology;
    DisorderSettings disorder;
    RecoverySettings recovery;
    std::optional<CircuitSettings> circuit;
};

[[nodiscard]] RunConfig parse_run_config(const ConfigDocument& doc);
[[nodiscard]] RunConfig parse_run_config_text(const std::string& text, const std::string& source = "<string>");
/// Reads and parses a file; I/O failures are ConfigError at line 0.
[[nodiscard]] RunConfig load_run_config(const std::string& path);

}  // namespace optolattice
