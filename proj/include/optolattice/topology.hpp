#pragma once

// Two-band bulk Hamiltonians, winding numbers, Zak phases and the
// finite-size slope condition for chains and graphene ribbons.
//
// The bulk off-diagonal element is written rho(k) = |rho| exp(-i phi(k)), so
// phi = -arg(rho). Energies are relative to the (uniform) cavity frequency.

#include "optolattice/lattice.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace optolattice {

using RhoFunction = std::function<Complex(double)>;

inline constexpr int kDefaultBzPoints = 4096;
inline constexpr double kMarginalBand = 0.5;

struct BulkCurve {
    std::vector<double> k;    // [-pi, pi), strictly increasing
    std::vector<Complex> rho;
    std::vector<double> phase;  // unwrapped phi(k)
    double min_abs = 0.0;
    double max_abs = 0.0;
    bool gapless = false;
};

struct EdgePrediction {
    double zak = 0.0;  // 0 or pi
    int winding = 0;
    double k_min = 0.0;
    double k_max = 0.0;  // phase reference: global |rho| maximum at smallest k
    double gap_min = 0.0;  // min |rho|
    double slope_at_kmin = 0.0;
    double slope_bound = 0.0;  // N + 1
    bool edge_states_exist = false;
    bool marginal = false;  // | |slope| - (N+1) | < kMarginalBand
    bool defined = true;    // false when the bulk is gapless
};

// ---------------------------------------------------------------------------
// SSH chain
// ---------------------------------------------------------------------------

[[nodiscard]] Complex bulk_rho_ssh(double k, const Couplings& c);
[[nodiscard]] Complex bulk_rho_ssh_dk(double k, const Couplings& c);
/// (E-, E+) = J2 cos k -+ |rho(k)|.
[[nodiscard]] std::pair<double, double> bulk_bands_ssh(double k, const Couplings& c);

// ---------------------------------------------------------------------------
// Generic curve analysis
// ---------------------------------------------------------------------------

[[nodiscard]] BulkCurve sample_curve(const RhoFunction& rho, int n_points = kDefaultBzPoints);
[[nodiscard]] BulkCurve bulk_curve_ssh(const Couplings& c, int n_points = kDefaultBzPoints);

/// Total phase change of phi over the zone divided by 2 pi.
[[nodiscard]] int winding_number(const BulkCurve& curve);
/// Half the phase integral, returned as 0 or pi.
[[nodiscard]] double zak_phase(const BulkCurve& curve);

/// d phi / dk = -Im(rho'/rho).
[[nodiscard]] double phase_slope(const RhoFunction& rho, const RhoFunction& drho, double k);
/// Location of the smallest |rho|: coarse scan, then golden-section refinement.
[[nodiscard]] double locate_kmin(const RhoFunction& rho, int n_points = kDefaultBzPoints);

/// Zak phase plus slope condition for a chain of n_cells cells. Throws on a
/// gapless bulk unless `allow_gapless`, in which case defined=false.
[[nodiscard]] EdgePrediction edge_prediction(const RhoFunction& rho, const RhoFunction& drho, int n_cells,
                                             bool allow_gapless = false);
[[nodiscard]] EdgePrediction edge_prediction_finite(const Couplings& c, int n_cells);

// ---------------------------------------------------------------------------
// Graphene and ribbons
// ---------------------------------------------------------------------------

struct GrapheneCouplings {
    double Ja = 0.0;
    double Jb = 0.0;
    double Jc = 0.0;
};

/// Device strain pattern: the unique (vertical) bond is J, the slanted ones J'.
[[nodiscard]] GrapheneCouplings strained_graphene(double J, double Jp);

[[nodiscard]] Eigen::Vector2d lattice_vector_a();
[[nodiscard]] Eigen::Vector2d lattice_vector_b();

[[nodiscard]] Complex graphene_rho(const Eigen::Vector2d& kvec, const GrapheneCouplings& g);
/// rho in reduced coordinates theta1 = a.k, theta2 = b.k.
[[nodiscard]] Complex graphene_rho_reduced(double theta1, double theta2, const GrapheneCouplings& g);
[[nodiscard]] std::pair<double, double> graphene_bulk(const Eigen::Vector2d& kvec, const GrapheneCouplings& g);

struct GapScan {
    double min_gap = 0.0;  // E+ - E- = 2 min|rho|
    double theta1 = 0.0;
    double theta2 = 0.0;
    int grid = 0;
};

/// Scan of grid x grid reduced wavevectors theta_j = -pi + 2 pi j / grid.
[[nodiscard]] GapScan graphene_min_gap(const GrapheneCouplings& g, int grid = 512);
/// Grid points where |rho| < tol.
[[nodiscard]] std::vector<std::pair<double, double>> graphene_gapless_points(const GrapheneCouplings& g, int grid,
                                                                             double tol);

/// rho(k_perp | k_par) of the wavenumber-resolved chain of each orientation.
[[nodiscard]] Complex ribbon_rho(RibbonOrientation o, double k_perp, double k_par, const Couplings& c);
[[nodiscard]] Complex ribbon_rho_dk(RibbonOrientation o, double k_perp, double k_par, const Couplings& c);

[[nodiscard]] EdgePrediction ribbon_edge_prediction(RibbonOrientation o, double k_par, int width,
                                                    const Couplings& c);

/// Eigenvalues of the ribbon chain with |E| < threshold.
[[nodiscard]] int count_midgap_states(RibbonOrientation o, int width, double k_par, const Couplings& c,
                                      double threshold);

/// Eigenvalues (relative to the mean diagonal) inside the bulk gap |E| < min|rho|.
[[nodiscard]] int count_in_gap_states(const CouplingHamiltonian& h, double gap_min);

}  // namespace optolattice
