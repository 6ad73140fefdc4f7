#pragma once

// Circuit-level relations: LC cells, inductive coupling, passbands, drumhead
// mechanics, and mutual inductance of thin wires by the Neumann double integral.

#include "optolattice/lattice.hpp"

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

namespace optolattice {

inline constexpr double kMu0 = 1.25663706212e-6;  // H/m

struct CircuitCell {
    double L = 0.0;  // H
    double C = 0.0;  // F

    void validate() const;
    /// 1 / (2 pi sqrt(LC)) in Hz.
    [[nodiscard]] double f_c() const;
};

/// (f-, f+) = f_c / sqrt(1 +- M/L). The symmetric-current mode is f+.
[[nodiscard]] std::pair<double, double> dimer_eigenfrequencies(const CircuitCell& cell, double M);

/// J = f_c M / (2L).
[[nodiscard]] double coupling_rate(const CircuitCell& cell, double M);
/// Inverse of coupling_rate: M/L for a target J.
[[nodiscard]] double mutual_ratio_for_coupling(const CircuitCell& cell, double J);

/// Both branches of the infinite chain at Bloch phase beta.
[[nodiscard]] std::pair<double, double> infinite_chain_band(double beta, const CircuitCell& cell, double M,
                                                            double Mp);

struct Passbands {
    std::array<double, 2> upb{};  // [low, high]
    std::array<double, 2> lpb{};
};

[[nodiscard]] Passbands passband_edges(double f_c, double J, double Jp);

/// (1/2 pi)(2.4/R) sqrt(stress/density).
[[nodiscard]] double drumhead_frequency(double radius, double stress, double density);

struct WireCurve {
    std::vector<Eigen::Vector3d> points;  // metres

    void validate() const;
    [[nodiscard]] double length() const;
};

/// Closed polygonal loop of n segments (first point repeated at the end).
[[nodiscard]] WireCurve circular_loop(double radius, const Eigen::Vector3d& center, const Eigen::Vector3d& normal,
                                      int n_segments);
/// Equal arc-length resampling of a polyline into n segments.
[[nodiscard]] WireCurve resample(const WireCurve& c, int n_segments);

/// (mu0 / 4 pi) sum_ij dl_i . dl_j / |r_i - r_j| with midpoint quadrature.
/// n_segments <= 0 uses the polylines as given.
[[nodiscard]] double mutual_inductance_neumann(const WireCurve& a, const WireCurve& b, int n_segments);

}  // namespace optolattice
