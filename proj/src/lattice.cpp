#include "optolattice/lattice.hpp"

#include "optolattice/flake.hpp"
#include "optolattice/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optolattice {

namespace {

std::vector<std::string> numbered_labels(Eigen::Index n, const std::string& prefix = "site") {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
    return out;
}

void require_nonnegative(const Couplings& c) {
    for (double v : {c.J, c.Jp, c.J2, c.J3, c.J3p})
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("couplings must be finite and non-negative");
}

void set_pair(Eigen::MatrixXcd& m, Eigen::Index a, Eigen::Index b, Complex v) {
    m(a, b) += v;
    m(b, a) += std::conj(v);
}

/// Canonical basis of a degenerate block: project unit vectors e_0, e_1, ...
/// onto the subspace and Gram-Schmidt them. Independent of the solver's basis.
void canonicalize_block(Eigen::MatrixXcd& cols, Eigen::Index first, Eigen::Index count) {
    const Eigen::Index n = cols.rows();
    Eigen::MatrixXcd block = cols.middleCols(first, count);
    Eigen::MatrixXcd chosen(n, count);
    Eigen::Index found = 0;
    for (Eigen::Index j = 0; j < n && found < count; ++j) {
        Eigen::VectorXcd v = block * block.row(j).adjoint();
        for (Eigen::Index q = 0; q < found; ++q) v -= chosen.col(q) * chosen.col(q).dot(v);
        for (Eigen::Index q = 0; q < found; ++q) v -= chosen.col(q) * chosen.col(q).dot(v);
        double nv = v.norm();
        if (nv > 1e-6) chosen.col(found++) = v / nv;
    }
    if (found == count) cols.middleCols(first, count) = chosen;
}

}  // namespace

// ---------------------------------------------------------------------------
// Enum helpers
// ---------------------------------------------------------------------------

std::string to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::SshChain: return "SshChain";
        case TopologyKind::HoneycombFlake: return "HoneycombFlake";
        case TopologyKind::RibbonUnitCell: return "RibbonUnitCell";
    }
    return "?";
}

std::string to_string(RibbonOrientation o) {
    switch (o) {
        case RibbonOrientation::ZigZag: return "ZigZag";
        case RibbonOrientation::Armchair: return "Armchair";
        case RibbonOrientation::TiltedZigZag: return "TiltedZigZag";
        case RibbonOrientation::TiltedArmchair: return "TiltedArmchair";
    }
    return "?";
}

TopologyKind parse_topology_kind(const std::string& s) {
    for (auto k : {TopologyKind::SshChain, TopologyKind::HoneycombFlake, TopologyKind::RibbonUnitCell})
        if (to_string(k) == s) return k;
    throw InputError("unknown topology kind '" + s + "'");
}

RibbonOrientation parse_orientation(const std::string& s) {
    for (auto o : {RibbonOrientation::ZigZag, RibbonOrientation::Armchair, RibbonOrientation::TiltedZigZag,
                   RibbonOrientation::TiltedArmchair})
        if (to_string(o) == s) return o;
    throw InputError("unknown ribbon orientation '" + s + "'");
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

void LatticeSpec::validate() const {
    if (n_sites <= 0) throw InputError("n_sites must be positive");
    if (static_cast<int>(sites.size()) != n_sites)
        throw InputError("expected " + std::to_string(n_sites) + " site entries, got " + std::to_string(sites.size()));
    if (kind == TopologyKind::RibbonUnitCell && n_sites % 2 != 0)
        throw InputError("ribbons need an even number of sites");
    if (kind == TopologyKind::HoneycombFlake && n_sites != flake::kSites)
        throw InputError("the honeycomb flake has exactly 24 sites");
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& s = sites[i];
        if (!(s.cavity_freq > 0.0) || !std::isfinite(s.cavity_freq))
            throw InputError("site " + std::to_string(i + 1) + ": cavity frequency must be strictly positive");
        // Mechanical entries may stay 0 when only the microwave lattice is needed.
        for (double v : {s.mech_freq, s.mech_linewidth, s.g0})
            if (!(v >= 0.0) || !std::isfinite(v))
                throw InputError("site " + std::to_string(i + 1) + ": mechanical parameters must be >= 0");
    }
    require_nonnegative(couplings);
}

std::vector<double> LatticeSpec::cavity_freqs() const {
    std::vector<double> out;
    out.reserve(sites.size());
    for (const auto& s : sites) out.push_back(s.cavity_freq);
    return out;
}

bool CouplingHamiltonian::is_real() const { return matrix.imag().cwiseAbs().maxCoeff() == 0.0; }

Eigen::MatrixXd CouplingHamiltonian::real() const {
    if (size() > 0 && !is_real()) throw InputError("Hamiltonian has complex entries");
    return matrix.real();
}

double CouplingHamiltonian::hermiticity_defect() const {
    if (size() == 0) return 0.0;
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd ModeSet::real_modeshapes() const {
    if (!real) throw InputError("mode set is complex");
    return modeshapes.real();
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace {

// Chain of n sites in A/B alternation; an odd n leaves the last cell with only its A site.
CouplingHamiltonian chain_of_sites(int n, const Couplings& c, const std::vector<double>& cavity_freqs) {
    require_nonnegative(c);
    if (static_cast<int>(cavity_freqs.size()) != n)
        throw InputError("cavity_freqs has length " + std::to_string(cavity_freqs.size()) + ", expected " +
                         std::to_string(n));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = cavity_freqs[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) set_pair(m, i, i + 1, (i % 2 == 0) ? c.J : c.Jp);
    for (int i = 0; i + 2 < n; ++i) set_pair(m, i, i + 2, c.J2);
    for (int a = 0; a + 3 < n; a += 2) set_pair(m, a, a + 3, c.J3);   // A_n - B_{n+1}
    for (int b = 1; b + 3 < n; b += 2) set_pair(m, b, b + 3, c.J3p);  // B_n - A_{n+2}
    return {m, numbered_labels(n)};
}

}  // namespace

CouplingHamiltonian build_ssh_chain(int n_cells, const Couplings& c, const std::vector<double>& cavity_freqs) {
    if (n_cells < 1) throw InputError("n_cells must be >= 1");
    return chain_of_sites(2 * n_cells, c, cavity_freqs);
}

CouplingHamiltonian build_honeycomb_flake(const Couplings& c, const std::vector<double>& cavity_freqs) {
    require_nonnegative(c);
    if (static_cast<int>(cavity_freqs.size()) != flake::kSites)
        throw InputError("honeycomb flake needs 24 cavity frequencies, got " + std::to_string(cavity_freqs.size()));
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(flake::kSites, flake::kSites);
    for (int i = 0; i < flake::kSites; ++i) m(i, i) = cavity_freqs[static_cast<std::size_t>(i)];
    for (const auto& b : flake::bonds()) {
        double v = 0.0;
        switch (b.kind) {
            case flake::BondKind::Vertical: v = c.J; break;
            case flake::BondKind::Slanted: v = c.Jp; break;
            case flake::BondKind::Second: v = c.J2; break;
        }
        set_pair(m, b.a, b.b, v);
    }
    return {m, numbered_labels(flake::kSites)};
}

CouplingHamiltonian build_ribbon_hamiltonian(RibbonOrientation orientation, int width, double k_par,
                                             const Couplings& c, double cavity_freq) {
    if (width < 1) throw InputError("ribbon width must be >= 1");
    if (!(k_par >= -M_PI - 1e-12 && k_par <= M_PI + 1e-12)) throw InputError("k_par must lie in [-pi, pi]");
    if (c.J < 0 || c.Jp < 0) throw InputError("couplings must be non-negative");
    double ja = 0, jb = 0, jc = 0;
    switch (orientation) {
        case RibbonOrientation::ZigZag:
        case RibbonOrientation::Armchair: jc = c.J; ja = jb = c.Jp; break;
        case RibbonOrientation::TiltedZigZag:
        case RibbonOrientation::TiltedArmchair: ja = c.J; jb = jc = c.Jp; break;
    }
    const Complex phase = std::polar(1.0, -k_par);
    // H[A_{n+m}, B_n] = t_m
    Complex t0, tp1, tm1;
    if (orientation == RibbonOrientation::ZigZag || orientation == RibbonOrientation::TiltedZigZag) {
        t0 = ja + jb * phase;
        tp1 = jc;
    } else {
        t0 = jc;
        tp1 = jb;
        tm1 = ja * phase;
    }
    const int n = 2 * width;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = cavity_freq;
    for (int cell = 0; cell < width; ++cell) {
        const int b = 2 * cell + 1;
        set_pair(m, 2 * cell, b, t0);
        if (cell + 1 < width) set_pair(m, 2 * (cell + 1), b, tp1);
        if (cell >= 1 && tm1 != Complex{}) set_pair(m, 2 * (cell - 1), b, tm1);
    }
    std::vector<std::string> labels;
    for (int cell = 0; cell < width; ++cell) {
        labels.push_back("A" + std::to_string(cell + 1));
        labels.push_back("B" + std::to_string(cell + 1));
    }
    return {m, labels};
}

CouplingHamiltonian build_hamiltonian(const LatticeSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case TopologyKind::SshChain: return chain_of_sites(spec.n_sites, spec.couplings, spec.cavity_freqs());
        case TopologyKind::HoneycombFlake: return build_honeycomb_flake(spec.couplings, spec.cavity_freqs());
        case TopologyKind::RibbonUnitCell: {
            auto h = build_ribbon_hamiltonian(spec.orientation, spec.n_sites / 2, spec.k_par, spec.couplings);
            for (int i = 0; i < spec.n_sites; ++i) h.matrix(i, i) = spec.sites[static_cast<std::size_t>(i)].cavity_freq;
            return h;
        }
    }
    throw InputError("unhandled topology kind");
}

// ---------------------------------------------------------------------------
// Diagonalization
// ---------------------------------------------------------------------------

ModeSet diagonalize(const CouplingHamiltonian& h) {
    const Eigen::Index n = h.size();
    if (n == 0 || h.matrix.cols() != n) throw InputError("Hamiltonian must be a non-empty square matrix");
    if (!h.matrix.allFinite()) throw InputError("Hamiltonian has non-finite entries");
    const double scale = h.matrix.cwiseAbs().maxCoeff();
    if (h.hermiticity_defect() > 1e-9 * std::max(scale, 1e-300))
        throw InputError("Hamiltonian is not Hermitian (defect " + std::to_string(h.hermiticity_defect()) + ")");

    ModeSet out;
    Eigen::MatrixXcd cols;
    if (h.is_real()) {
        Eigen::MatrixXd a = h.matrix.real();
        a = 0.5 * (a + a.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        if (es.info() != Eigen::Success) {
            std::ostringstream os;
            os << "eigensolver did not converge (n=" << n << ", max|H|=" << scale << ")";
            throw NumericalError(os.str());
        }
        out.eigenfreqs = es.eigenvalues();
        cols = es.eigenvectors().cast<Complex>();
        out.real = true;
    } else {
        Eigen::MatrixXcd a = 0.5 * (h.matrix + h.matrix.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
        if (es.info() != Eigen::Success) {
            std::ostringstream os;
            os << "complex eigensolver did not converge (n=" << n << ", max|H|=" << scale << ")";
            throw NumericalError(os.str());
        }
        out.eigenfreqs = es.eigenvalues();
        cols = es.eigenvectors();
        out.real = false;
    }

    const double lam_scale = std::max(out.eigenfreqs.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index k = 0; k < n;) {
        Eigen::Index e = k + 1;
        while (e < n && std::abs(out.eigenfreqs(e) - out.eigenfreqs(e - 1)) < 1e-10 * lam_scale) ++e;
        if (e - k > 1) canonicalize_block(cols, k, e - k);
        k = e;
    }

    for (Eigen::Index k = 0; k < n; ++k) {
        auto col = cols.col(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(col(i)) > 1e-12) {
                col *= std::conj(col(i)) / std::abs(col(i));
                break;
            }
        }
    }
    if (out.real) cols = cols.real().cast<Complex>();
    out.modeshapes = cols.transpose();
    return out;
}

ParticipationMatrix participation(const ModeSet& m) {
    if (m.modeshapes.rows() != m.size() || m.modeshapes.cols() != m.size())
        throw InputError("mode set shape mismatch");
    return {m.modeshapes.cwiseAbs2()};
}

CouplingHamiltonian apply_disorder(const CouplingHamiltonian& h, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw InputError("sigma must be >= 0");
    CouplingHamiltonian out = h;
    if (sigma == 0.0) return out;
    Rng rng(seed);
    std::normal_distribution<double> nd(0.0, sigma);
    for (Eigen::Index i = 0; i < out.size(); ++i) out.matrix(i, i) *= 1.0 + nd(rng);
    return out;
}

double site_weight(const ParticipationMatrix& p, Eigen::Index k, const std::vector<int>& sites) {
    double s = 0.0;
    for (int i : sites) s += p.eta(k, i);
    return s;
}

}  // namespace optolattice
