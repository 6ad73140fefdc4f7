#include "optolattice/topology.hpp"

#include "optolattice/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace optolattice {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_pi(double x) {
    x = std::remainder(x, kTwoPi);
    return x;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// SSH chain
// ---------------------------------------------------------------------------

Complex bulk_rho_ssh(double k, const Couplings& c) {
    return c.J + c.Jp * std::polar(1.0, -k) + c.J3 * std::polar(1.0, k) + c.J3p * std::polar(1.0, -2.0 * k);
}

Complex bulk_rho_ssh_dk(double k, const Couplings& c) {
    const Complex i{0.0, 1.0};
    return -i * c.Jp * std::polar(1.0, -k) + i * c.J3 * std::polar(1.0, k) - 2.0 * i * c.J3p * std::polar(1.0, -2.0 * k);
}

std::pair<double, double> bulk_bands_ssh(double k, const Couplings& c) {
    const double eps = c.J2 * std::cos(k);
    const double r = std::abs(bulk_rho_ssh(k, c));
    return {eps - r, eps + r};
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

BulkCurve sample_curve(const RhoFunction& rho, int n_points) {
    if (n_points < 8) throw InputError("need at least 8 Brillouin-zone points");
    BulkCurve c;
    c.k.resize(static_cast<std::size_t>(n_points));
    c.rho.resize(c.k.size());
    c.phase.resize(c.k.size());
    c.min_abs = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_points; ++j) {
        const auto u = static_cast<std::size_t>(j);
        c.k[u] = -M_PI + kTwoPi * j / n_points;
        c.rho[u] = rho(c.k[u]);
        const double a = std::abs(c.rho[u]);
        c.min_abs = std::min(c.min_abs, a);
        c.max_abs = std::max(c.max_abs, a);
    }
    // nearest-branch continuation
    c.phase[0] = -std::arg(c.rho[0]);
    for (std::size_t j = 1; j < c.k.size(); ++j)
        c.phase[j] = c.phase[j - 1] + wrap_pi(-std::arg(c.rho[j]) - c.phase[j - 1]);
    c.gapless = !(c.max_abs > 0.0) || c.min_abs <= 1e-9 * c.max_abs;
    return c;
}

BulkCurve bulk_curve_ssh(const Couplings& c, int n_points) {
    return sample_curve([&](double k) { return bulk_rho_ssh(k, c); }, n_points);
}

int winding_number(const BulkCurve& curve) {
    if (curve.gapless || curve.rho.empty()) throw NumericalError("undefined winding: bulk curve touches the origin");
    const double closing = wrap_pi(-std::arg(curve.rho.front()) - curve.phase.back());
    const double total = curve.phase.back() - curve.phase.front() + closing;
    const double w = total / kTwoPi;
    const double r = std::round(w);
    if (std::abs(w - r) > 1e-6) throw NumericalError("winding is not an integer; curve under-resolved");
    return static_cast<int>(r);
}

double zak_phase(const BulkCurve& curve) {
    const int w = winding_number(curve);
    if (std::abs(w) > 1)
        throw NumericalError("winding " + std::to_string(w) + " is outside the two-band model (expected 0 or 1)");
    const double closing = wrap_pi(-std::arg(curve.rho.front()) - curve.phase.back());
    const double half = 0.5 * (curve.phase.back() - curve.phase.front() + closing);
    double r = std::fmod(half, kTwoPi);
    if (r < 0) r += kTwoPi;
    const double d0 = std::min(r, kTwoPi - r);
    const double dpi = std::abs(r - M_PI);
    if (std::min(d0, dpi) > 1e-3 * M_PI) throw NumericalError("Zak phase not quantized");
    const double z = d0 < dpi ? 0.0 : M_PI;
    if ((z == M_PI) != (w % 2 != 0)) throw NumericalError("Zak phase inconsistent with winding");
    return z;
}

double phase_slope(const RhoFunction& rho, const RhoFunction& drho, double k) {
    const Complex r = rho(k);
    if (std::abs(r) == 0.0) throw NumericalError("phase slope undefined where rho = 0");
    return -std::imag(drho(k) / r);
}

double locate_kmin(const RhoFunction& rho, int n_points) {
    const double h = kTwoPi / n_points;
    double best = std::numeric_limits<double>::infinity();
    double kb = -M_PI;
    for (int j = 0; j < n_points; ++j) {
        const double k = -M_PI + h * j;
        const double a = std::abs(rho(k));
        if (a < best) {
            best = a;
            kb = k;
        }
    }
    const double k = golden_min([&](double x) { return std::norm(rho(x)); }, kb - h, kb + h);
    return wrap_pi(k) == M_PI ? -M_PI : wrap_pi(k);
}

EdgePrediction edge_prediction(const RhoFunction& rho, const RhoFunction& drho, int n_cells, bool allow_gapless) {
    if (n_cells < 1) throw InputError("n_cells must be >= 1");
    const BulkCurve curve = sample_curve(rho);
    EdgePrediction p;
    p.slope_bound = n_cells + 1.0;
    p.k_min = locate_kmin(rho);
    p.gap_min = std::abs(rho(p.k_min));
    std::size_t imax = 0;
    for (std::size_t j = 1; j < curve.rho.size(); ++j)
        if (std::abs(curve.rho[j]) > std::abs(curve.rho[imax])) imax = j;
    p.k_max = curve.k[imax];
    if (curve.gapless || p.gap_min <= 1e-9 * curve.max_abs) {
        if (!allow_gapless) throw NumericalError("undefined winding: bulk is gapless");
        p.defined = false;
        return p;
    }
    p.winding = winding_number(curve);
    p.zak = zak_phase(curve);
    p.slope_at_kmin = phase_slope(rho, drho, p.k_min);
    const double s = std::abs(p.slope_at_kmin);
    p.edge_states_exist = (p.zak == M_PI) && s < p.slope_bound;
    p.marginal = std::abs(s - p.slope_bound) < kMarginalBand;
    return p;
}

EdgePrediction edge_prediction_finite(const Couplings& c, int n_cells) {
    return edge_prediction([&](double k) { return bulk_rho_ssh(k, c); },
                           [&](double k) { return bulk_rho_ssh_dk(k, c); }, n_cells);
}

// ---------------------------------------------------------------------------
// Graphene
// ---------------------------------------------------------------------------

GrapheneCouplings strained_graphene(double J, double Jp) { return {Jp, Jp, J}; }

Eigen::Vector2d lattice_vector_a() { return {std::sqrt(3.0) / 2.0, 1.5}; }
Eigen::Vector2d lattice_vector_b() { return {-std::sqrt(3.0) / 2.0, 1.5}; }

Complex graphene_rho_reduced(double theta1, double theta2, const GrapheneCouplings& g) {
    return g.Jc + g.Ja * std::polar(1.0, -theta1) + g.Jb * std::polar(1.0, -theta2);
}

Complex graphene_rho(const Eigen::Vector2d& kvec, const GrapheneCouplings& g) {
    return graphene_rho_reduced(lattice_vector_a().dot(kvec), lattice_vector_b().dot(kvec), g);
}

std::pair<double, double> graphene_bulk(const Eigen::Vector2d& kvec, const GrapheneCouplings& g) {
    const double r = std::abs(graphene_rho(kvec, g));
    return {-r, r};
}

GapScan graphene_min_gap(const GrapheneCouplings& g, int grid) {
    if (grid < 2) throw InputError("grid must be >= 2");
    const double h = kTwoPi / grid;
    std::vector<GapScan> rows(static_cast<std::size_t>(grid));
    parallel_for(rows.size(), [&](std::size_t i) {
        GapScan best{std::numeric_limits<double>::infinity(), 0, 0, grid};
        const double t1 = -M_PI + h * static_cast<double>(i);
        for (int j = 0; j < grid; ++j) {
            const double t2 = -M_PI + h * j;
            const double gap = 2.0 * std::abs(graphene_rho_reduced(t1, t2, g));
            if (gap < best.min_gap) best = {gap, t1, t2, grid};
        }
        rows[i] = best;
    });
    GapScan out = rows.front();
    for (const auto& r : rows)
        if (r.min_gap < out.min_gap) out = r;
    return out;
}

std::vector<std::pair<double, double>> graphene_gapless_points(const GrapheneCouplings& g, int grid, double tol) {
    std::vector<std::pair<double, double>> out;
    const double h = kTwoPi / grid;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double t1 = -M_PI + h * i, t2 = -M_PI + h * j;
            if (std::abs(graphene_rho_reduced(t1, t2, g)) < tol) out.emplace_back(t1, t2);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Ribbons
// ---------------------------------------------------------------------------

namespace {

GrapheneCouplings ribbon_couplings(RibbonOrientation o, const Couplings& c) {
    switch (o) {
        case RibbonOrientation::ZigZag:
        case RibbonOrientation::Armchair: return {c.Jp, c.Jp, c.J};
        case RibbonOrientation::TiltedZigZag:
        case RibbonOrientation::TiltedArmchair: return {c.J, c.Jp, c.Jp};
    }
    return {};
}

bool zigzag_like(RibbonOrientation o) {
    return o == RibbonOrientation::ZigZag || o == RibbonOrientation::TiltedZigZag;
}

}  // namespace

Complex ribbon_rho(RibbonOrientation o, double k_perp, double k_par, const Couplings& c) {
    const auto g = ribbon_couplings(o, c);
    if (zigzag_like(o)) return g.Ja + g.Jb * std::polar(1.0, -k_par) + g.Jc * std::polar(1.0, -k_perp);
    return g.Jc + g.Jb * std::polar(1.0, -k_perp) + g.Ja * std::polar(1.0, k_perp - k_par);
}

Complex ribbon_rho_dk(RibbonOrientation o, double k_perp, double k_par, const Couplings& c) {
    const auto g = ribbon_couplings(o, c);
    const Complex i{0.0, 1.0};
    if (zigzag_like(o)) return -i * g.Jc * std::polar(1.0, -k_perp);
    return -i * g.Jb * std::polar(1.0, -k_perp) + i * g.Ja * std::polar(1.0, k_perp - k_par);
}

EdgePrediction ribbon_edge_prediction(RibbonOrientation o, double k_par, int width, const Couplings& c) {
    return edge_prediction([&](double k) { return ribbon_rho(o, k, k_par, c); },
                           [&](double k) { return ribbon_rho_dk(o, k, k_par, c); }, width, true);
}

int count_midgap_states(RibbonOrientation o, int width, double k_par, const Couplings& c, double threshold) {
    const ModeSet m = diagonalize(build_ribbon_hamiltonian(o, width, k_par, c));
    int n = 0;
    for (Eigen::Index k = 0; k < m.size(); ++k)
        if (std::abs(m.eigenfreqs(k)) < threshold) ++n;
    return n;
}

int count_in_gap_states(const CouplingHamiltonian& h, double gap_min) {
    const double center = h.matrix.diagonal().real().mean();
    const ModeSet m = diagonalize(h);
    int n = 0;
    for (Eigen::Index k = 0; k < m.size(); ++k)
        if (std::abs(m.eigenfreqs(k) - center) < gap_min * (1.0 - 1e-9)) ++n;
    return n;
}

}  // namespace optolattice
