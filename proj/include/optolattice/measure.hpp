#pragma once

// Optomechanical modeshape measurement: damping model, synthetic ringdowns,
// and the recovery chain from unnormalized participation ratios back to the
// lattice Hamiltonian.
//
// Public rates are in Hz (nu = omega / 2 pi). Lorentzians are evaluated with
// angular rates internally; photon fluxes are in 1/s.

#include "optolattice/lattice.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace optolattice {

struct DampingConfig {
    double detuning = 0.0;  // Hz, cavity mode minus drive
    double kappa_tot = 0.0;
    double kappa_1 = 0.0;
    double kappa_2 = 0.0;
    double drive_flux = 0.0;  // photons/s at the source
    double transmittance = 1.0;
    double mech_freq = 0.0;
    double mech_linewidth = 0.0;
    double g0 = 0.0;

    void validate() const;
    [[nodiscard]] bool sideband_resolved() const { return kappa_tot < mech_freq; }
};

/// kappa_1 R n_d / (Delta^2 + kappa^2/4).
[[nodiscard]] double intracavity_photons(const DampingConfig& cfg);
/// Two-Lorentzian optomechanical damping, Hz.
[[nodiscard]] double optomech_damping(const DampingConfig& cfg, double eta);
/// Gamma_m + Gamma_opt, Hz.
[[nodiscard]] double effective_damping(const DampingConfig& cfg, double eta);
/// d Gamma_eff / d n_d in Hz * s.
[[nodiscard]] double damping_slope(const DampingConfig& cfg, double eta);
/// Inverts a measured slope: equals g0 * eta * sqrt(kappa_1 R) with rates in rad/s.
[[nodiscard]] double unnormalized_eta(double slope, const DampingConfig& cfg);

// ---------------------------------------------------------------------------
// Ringdowns
// ---------------------------------------------------------------------------

struct RingdownTrace {
    std::vector<double> times;
    std::vector<double> powers;
    double true_gamma = 0.0;  // Hz
    double noise_floor = 0.0;
};

/// p(t) = p0 exp(-2 pi Gamma t) + floor + N(0, noise_sigma).
[[nodiscard]] RingdownTrace simulate_ringdown(double gamma_eff, double p0, double noise_sigma, double duration,
                                              double dt, std::uint64_t seed, double noise_floor = 0.0);

struct RingdownFit {
    double gamma = 0.0;  // Hz
    double gamma_stderr = 0.0;
    double p0 = 0.0;
    double floor = 0.0;
    int iterations = 0;
    bool clipped = false;
    std::string warning;
};

struct FitOptions {
    double transient_fraction = 0.1;
    int max_iter = 200;
};

[[nodiscard]] RingdownFit fit_ringdown(const RingdownTrace& trace, const FitOptions& opt = {});

// ---------------------------------------------------------------------------
// Normalization and reconstruction
// ---------------------------------------------------------------------------

struct SinkhornResult {
    ParticipationMatrix eta;
    int iterations = 0;  // normalization steps (row or column pass each)
    double residual = 0.0;
    std::vector<std::pair<int, int>> floored;  // (mode, site) entries raised to the floor
};

inline constexpr double kSinkhornFloor = 1e-15;

/// Alternating mode-wise (sum over sites) then site-wise (sum over modes)
/// normalization until every row and column sum is within tol of 1.
[[nodiscard]] SinkhornResult sinkhorn_normalize(const Eigen::MatrixXd& eta_tilde, double tol = 1e-10,
                                                int max_iter = 10000);

/// Mean of |hat - true| / true.
[[nodiscard]] double relative_error(const Eigen::MatrixXd& eta_hat, const Eigen::MatrixXd& eta_true);

/// Row permutation: result[r] is the reference mode matched to measured row r,
/// greedily pairing the closest frequencies first.
[[nodiscard]] std::vector<int> match_modes(const Eigen::VectorXd& measured, const Eigen::VectorXd& reference);

/// U~[k,i] = sign(reference psi_i^k) sqrt(eta_hat[k,i]). Rows are matched by
/// frequency when measured_freqs is non-empty, otherwise by index.
[[nodiscard]] Eigen::MatrixXd assign_signs(const ParticipationMatrix& eta_hat, const ModeSet& reference,
                                           const Eigen::VectorXd& measured_freqs = {});

/// Smallest distance of an eigenvalue of U from the closed negative real axis,
/// measured as pi - |arg lambda| (0 means on the cut).
[[nodiscard]] double branch_cut_margin(const Eigen::MatrixXd& u);

/// G = log(U~) on the principal branch, U = exp((G - G^T) / 2).
[[nodiscard]] Eigen::MatrixXd orthogonalize(const Eigen::MatrixXd& u_tilde, double min_margin = 1e-6);

/// H = U^T diag(w) U, symmetrized.
[[nodiscard]] CouplingHamiltonian reconstruct_hamiltonian(const Eigen::MatrixXd& u, const Eigen::VectorXd& eigenfreqs);
/// Same with the mean diagonal removed.
[[nodiscard]] CouplingHamiltonian rotating_frame(const CouplingHamiltonian& h);

struct RecoveryResult {
    ParticipationMatrix eta_hat;
    Eigen::MatrixXd u_tilde;
    Eigen::MatrixXd u_hat;
    CouplingHamiltonian h_hat;
    int iterations_used = 0;
    double sinkhorn_residual = 0.0;
    double orthogonality_defect = 0.0;
    double branch_margin = 0.0;
    int flipped_row = -1;  // row negated to move det(U~) to +1, or -1
    std::vector<std::pair<int, int>> floored;
};

struct RecoveryOptions {
    double tol = 1e-10;
    int max_iter = 10000;
};

/// Full chain: normalize, sign, orthogonalize, reconstruct. A global sign of
/// a mode is physically meaningless, so one row is negated when det(U~) < 0.
[[nodiscard]] RecoveryResult recover_hamiltonian(const Eigen::MatrixXd& eta_tilde, const Eigen::VectorXd& eigenfreqs,
                                                 const ModeSet& reference, const RecoveryOptions& opt = {});

/// Per-site mean over modes of eta_tilde / eta_hat, normalized to sum 1.
[[nodiscard]] Eigen::VectorXd relative_g0(const Eigen::MatrixXd& eta_tilde, const Eigen::MatrixXd& eta_hat);
/// g0_i = gbar_i / gbar_anchor * g0_anchor.
[[nodiscard]] Eigen::VectorXd anchor_g0(const Eigen::VectorXd& gbar, int anchor_site, double g0_anchor);

// ---------------------------------------------------------------------------
// Sideband thermometry
// ---------------------------------------------------------------------------

struct SidebandConfig {
    double mech_freq = 0.0;  // Hz
    double kappa_tot = 0.0;  // Hz
};

/// n_sb / n_d,out = (eta g0)^2 n_m / (Omega^2 + kappa^2/4).
[[nodiscard]] double sideband_ratio(const SidebandConfig& cfg, double eta_g0, double n_m);
/// Thermal phonon number k_B T / (h Omega).
[[nodiscard]] double thermal_occupation(double temperature, double mech_freq);

struct SidebandEstimate {
    double eta_g0 = 0.0;  // Hz
    double slope = 0.0;
};

/// Least-squares slope through the origin of ratio vs n_m, inverted for eta g0.
[[nodiscard]] SidebandEstimate fit_sideband(const SidebandConfig& cfg, const std::vector<double>& n_m,
                                            const std::vector<double>& ratio);
/// Simulated ratios with multiplicative noise, then fit_sideband.
[[nodiscard]] SidebandEstimate sideband_thermometry(const SidebandConfig& cfg, double eta_g0,
                                                    const std::vector<double>& n_m, double noise_rel,
                                                    std::uint64_t seed);

}  // namespace optolattice
