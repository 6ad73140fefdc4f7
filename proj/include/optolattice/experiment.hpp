#pragma once

// Synthetic power-sweep experiment: for every (mode, site) pair the drive is
// red-detuned by the site's mechanical frequency, ringdowns are recorded at a
// series of drive fluxes, and the damping slope yields eta_tilde.

#include "optolattice/lattice.hpp"
#include "optolattice/measure.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace optolattice {

/// Per collective mode; rates in Hz.
struct ModeDrive {
    double kappa_tot = 0.0;
    double kappa_1 = 0.0;
    double kappa_2 = 0.0;
    double transmittance = 1.0;
};

struct ExperimentPlan {
    std::vector<ModeDrive> modes;
    std::vector<double> mech_freq;  // per site
    std::vector<double> mech_linewidth;
    std::vector<double> g0;
    int n_powers = 10;
    // Highest drive gives Gamma_opt = max_cooperativity * Gamma_m for a fully
    // participating site with site-averaged parameters.
    double max_cooperativity = 1e3;
    double snr = 100.0;  // p0 / noise sigma
    int samples_per_trace = 400;
    double decay_constants = 3.0;  // trace length in units of 1 / (2 pi Gamma_eff)
    double noise_floor = 0.05;     // relative to p0
    double transient_fraction = 0.1;
    bool noiseless = false;

    void validate(Eigen::Index n_sites) const;
};

struct SweepPoint {
    int mode = 0;
    int site = 0;
    DampingConfig config;  // drive_flux holds the last sweep value
    std::vector<double> flux;
    std::vector<double> gamma_true;
    std::vector<double> gamma_fit;
    std::vector<std::uint64_t> seeds;
    std::vector<RingdownTrace> traces;  // kept only when requested
    double slope = 0.0;
    double eta_tilde = 0.0;
};

struct MeasurementDataset {
    Eigen::VectorXd eigenfreqs;  // measured collective-mode frequencies
    std::vector<SweepPoint> points;  // mode-major
    std::uint64_t seed = 0;
    bool noiseless = false;
    int n_modes = 0;
    int n_sites = 0;

    [[nodiscard]] Eigen::MatrixXd eta_tilde() const;
    [[nodiscard]] const SweepPoint& at(int mode, int site) const;
};

/// Drive configuration of pair (k, i) at the given flux.
[[nodiscard]] DampingConfig drive_config(const ExperimentPlan& plan, int mode, int site, double flux);
/// Fluxes used for mode k, ascending.
[[nodiscard]] std::vector<double> drive_fluxes(const ExperimentPlan& plan, int mode);

/// Simulates the sweeps on the ground-truth modes. Trace seeds are
/// derive_seed(seed, k, i, p). Noiseless plans skip noise but still generate
/// and fit exact traces.
[[nodiscard]] MeasurementDataset simulate_measurement(const ModeSet& truth, const ExperimentPlan& plan,
                                                      std::uint64_t seed, bool keep_traces = false);

/// Ordinary least squares slope of gamma against flux, clipped at 0.
[[nodiscard]] double sweep_slope(const std::vector<double>& flux, const std::vector<double>& gamma);

/// Refits every stored trace and recomputes slopes and eta_tilde in place.
void refit_dataset(MeasurementDataset& data, const FitOptions& opt = {});

}  // namespace optolattice
