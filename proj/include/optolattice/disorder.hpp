#pragma once

// Monte-Carlo ensembles over cavity-frequency disorder and the edge-state
// hybridization factor zeta.

#include "optolattice/lattice.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace optolattice {

/// zeta = 1/2 sum over modes N, N+1 (1-based rank) of min/max of eta at the two end sites.
[[nodiscard]] double hybridization_factor(const ParticipationMatrix& p, int n_cells);

struct SigmaStats {
    double sigma = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double p5 = 0.0, p15 = 0.0, p85 = 0.0, p95 = 0.0;
    Eigen::VectorXd freq_mean;
    Eigen::VectorXd freq_std;
    int failures = 0;
    bool rank_overlap = false;  // mid-gap rank ambiguous at this disorder
    std::vector<double> sorted_zeta;
};

struct EnsembleResult {
    std::vector<double> sigma_grid;
    std::vector<SigmaStats> stats;
    int samples_per_point = 0;
    std::uint64_t master_seed = 0;
};

/// Linear-interpolated percentile (0..100) of sorted data.
[[nodiscard]] double percentile_sorted(const std::vector<double>& sorted, double pct);

/// For each sigma and sample: apply_disorder, diagonalize, participation, zeta.
/// Sample seeds are derive_seed(master, sigma index, sample index).
[[nodiscard]] EnsembleResult run_ensemble(const LatticeSpec& spec, const std::vector<double>& sigma_grid, int samples,
                                          std::uint64_t master_seed, unsigned threads = 0);

struct SigmaInterval {
    bool empty = true;
    double lo = 0.0;
    double hi = 0.0;
    std::string diagnostic;
};

/// Sigma range whose central `confidence` band contains zeta. Endpoints are
/// linearly interpolated between grid points.
[[nodiscard]] SigmaInterval invert_zeta(double zeta, const EnsembleResult& ens, double confidence);

}  // namespace optolattice
