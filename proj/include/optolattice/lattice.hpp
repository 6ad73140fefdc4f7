#pragma once

// Lattice Hamiltonians of coupled LC resonators.
//
// Every frequency in this library is an ordinary frequency in Hz (nu = omega/2pi).
// Matrix element (i,i) is the bare cavity frequency of site i, element (i,j)
// the coupling rate J_ij between sites i and j.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace optolattice {

using Complex = std::complex<double>;

/// Raised for invalid arguments and configuration mistakes.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot deliver a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TopologyKind { SshChain, HoneycombFlake, RibbonUnitCell };
enum class RibbonOrientation { ZigZag, Armchair, TiltedZigZag, TiltedArmchair };

[[nodiscard]] std::string to_string(TopologyKind kind);
[[nodiscard]] std::string to_string(RibbonOrientation o);
[[nodiscard]] TopologyKind parse_topology_kind(const std::string& s);
[[nodiscard]] RibbonOrientation parse_orientation(const std::string& s);

struct SiteParams {
    double cavity_freq = 0.0;
    double mech_freq = 0.0;
    double mech_linewidth = 0.0;
    double g0 = 0.0;
};

/// Coupling rates in Hz. J3/J3p are only used by chains.
struct Couplings {
    double J = 0.0;
    double Jp = 0.0;
    double J2 = 0.0;
    double J3 = 0.0;
    double J3p = 0.0;
};

struct LatticeSpec {
    TopologyKind kind = TopologyKind::SshChain;
    int n_sites = 0;
    std::vector<SiteParams> sites;
    Couplings couplings;
    // Ribbon-only fields; width is n_sites / 2 cells.
    RibbonOrientation orientation = RibbonOrientation::ZigZag;
    double k_par = 0.0;

    void validate() const;
    [[nodiscard]] std::vector<double> cavity_freqs() const;
};

struct CouplingHamiltonian {
    Eigen::MatrixXcd matrix;
    std::vector<std::string> site_labels;

    [[nodiscard]] Eigen::Index size() const { return matrix.rows(); }
    [[nodiscard]] bool is_real() const;
    /// Real part; throws if any imaginary part is non-zero.
    [[nodiscard]] Eigen::MatrixXd real() const;
    [[nodiscard]] double hermiticity_defect() const;
};

/// Eigenfrequencies ascending; row k of `modeshapes` is mode k over sites.
struct ModeSet {
    Eigen::VectorXd eigenfreqs;
    Eigen::MatrixXcd modeshapes;
    bool real = true;

    [[nodiscard]] Eigen::Index size() const { return eigenfreqs.size(); }
    [[nodiscard]] Eigen::MatrixXd real_modeshapes() const;
};

/// eta(k, i) = |psi_i^k|^2, mode k along rows.
struct ParticipationMatrix {
    Eigen::MatrixXd eta;
};

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// 1D chain of 2-site cells. Site 2n is A_n, site 2n+1 is B_n.
[[nodiscard]] CouplingHamiltonian build_ssh_chain(int n_cells, const Couplings& c,
                                                  const std::vector<double>& cavity_freqs);

/// 24-site coronene-shaped honeycomb flake; see flake.hpp for the site map.
[[nodiscard]] CouplingHamiltonian build_honeycomb_flake(const Couplings& c,
                                                        const std::vector<double>& cavity_freqs);

/// Bloch-phased ribbon of `width` two-site cells, entries relative to a zero
/// cavity frequency unless `cavity_freq` is given.
[[nodiscard]] CouplingHamiltonian build_ribbon_hamiltonian(RibbonOrientation orientation, int width,
                                                           double k_par, const Couplings& c,
                                                           double cavity_freq = 0.0);

/// Dispatch on spec.kind.
[[nodiscard]] CouplingHamiltonian build_hamiltonian(const LatticeSpec& spec);

// ---------------------------------------------------------------------------
// Spectral data
// ---------------------------------------------------------------------------

[[nodiscard]] ModeSet diagonalize(const CouplingHamiltonian& h);
[[nodiscard]] ParticipationMatrix participation(const ModeSet& m);

/// Diagonal entries scaled by (1 + N(0, sigma)); off-diagonals untouched.
[[nodiscard]] CouplingHamiltonian apply_disorder(const CouplingHamiltonian& h, double sigma,
                                                 std::uint64_t seed);

/// Sum of eta over the given sites (0-based) for mode k.
[[nodiscard]] double site_weight(const ParticipationMatrix& p, Eigen::Index k,
                                 const std::vector<int>& sites);

}  // namespace optolattice
