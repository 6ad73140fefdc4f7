#include "optolattice/circuit.hpp"

#include "optolattice/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace optolattice {

void CircuitCell::validate() const {
    if (!(L > 0.0) || !(C > 0.0)) throw InputError("L and C must be positive");
}

double CircuitCell::f_c() const {
    validate();
    return 1.0 / (2.0 * M_PI * std::sqrt(L * C));
}

std::pair<double, double> dimer_eigenfrequencies(const CircuitCell& cell, double M) {
    const double fc = cell.f_c();
    if (!(std::abs(M) < cell.L)) throw InputError("|M| must be smaller than L");
    const double x = M / cell.L;
    double lo = fc / std::sqrt(1.0 + x), hi = fc / std::sqrt(1.0 - x);
    if (lo > hi) std::swap(lo, hi);
    return {lo, hi};
}

double coupling_rate(const CircuitCell& cell, double M) { return cell.f_c() * M / (2.0 * cell.L); }

double mutual_ratio_for_coupling(const CircuitCell& cell, double J) { return 2.0 * J / cell.f_c(); }

std::pair<double, double> infinite_chain_band(double beta, const CircuitCell& cell, double M, double Mp) {
    const double fc = cell.f_c();
    const double rad = M * M + Mp * Mp + 2.0 * M * Mp * std::cos(beta);
    if (rad < 0.0) throw NumericalError("negative radicand in chain band");
    const double x = std::sqrt(rad) / cell.L;
    if (!(x < 1.0)) throw InputError("coupling too strong: sqrt(M^2+M'^2+2MM'cos b) must be < L");
    return {fc / std::sqrt(1.0 + x), fc / std::sqrt(1.0 - x)};
}

Passbands passband_edges(double f_c, double J, double Jp) {
    Passbands p;
    const double d = std::abs(J - Jp), s = std::abs(J + Jp);
    p.upb = {f_c + d, f_c + s};
    p.lpb = {f_c - s, f_c - d};
    return p;
}

double drumhead_frequency(double radius, double stress, double density) {
    if (!(radius > 0.0) || !(stress > 0.0) || !(density > 0.0))
        throw InputError("radius, stress and density must be positive");
    return (2.4 / radius) * std::sqrt(stress / density) / (2.0 * M_PI);
}

// ---------------------------------------------------------------------------
// Wires
// ---------------------------------------------------------------------------

void WireCurve::validate() const {
    if (points.size() < 2) throw InputError("a wire needs at least two points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if ((points[i] - points[i - 1]).norm() == 0.0) throw InputError("consecutive wire points coincide");
}

double WireCurve::length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) s += (points[i] - points[i - 1]).norm();
    return s;
}

WireCurve circular_loop(double radius, const Eigen::Vector3d& center, const Eigen::Vector3d& normal, int n_segments) {
    if (!(radius > 0.0) || n_segments < 3) throw InputError("loop needs radius > 0 and >= 3 segments");
    const Eigen::Vector3d n = normal.normalized();
    Eigen::Vector3d u = n.unitOrthogonal();
    Eigen::Vector3d v = n.cross(u);
    WireCurve w;
    w.points.reserve(static_cast<std::size_t>(n_segments) + 1);
    for (int i = 0; i <= n_segments; ++i) {
        const double t = 2.0 * M_PI * (i % n_segments) / n_segments;
        w.points.push_back(center + radius * (std::cos(t) * u + std::sin(t) * v));
    }
    return w;
}

WireCurve resample(const WireCurve& c, int n_segments) {
    c.validate();
    if (n_segments < 1) throw InputError("n_segments must be >= 1");
    std::vector<double> s(c.points.size(), 0.0);
    for (std::size_t i = 1; i < c.points.size(); ++i) s[i] = s[i - 1] + (c.points[i] - c.points[i - 1]).norm();
    const double total = s.back();
    WireCurve out;
    out.points.reserve(static_cast<std::size_t>(n_segments) + 1);
    std::size_t seg = 1;
    for (int j = 0; j <= n_segments; ++j) {
        const double target = total * j / n_segments;
        while (seg + 1 < s.size() && s[seg] < target) ++seg;
        const double t = std::clamp((target - s[seg - 1]) / (s[seg] - s[seg - 1]), 0.0, 1.0);
        out.points.push_back(c.points[seg - 1] + t * (c.points[seg] - c.points[seg - 1]));
    }
    return out;
}

double mutual_inductance_neumann(const WireCurve& a_in, const WireCurve& b_in, int n_segments) {
    a_in.validate();
    b_in.validate();
    const WireCurve a = n_segments > 0 ? resample(a_in, n_segments) : a_in;
    const WireCurve b = n_segments > 0 ? resample(b_in, n_segments) : b_in;

    auto segments = [](const WireCurve& w, std::vector<Eigen::Vector3d>& mid, std::vector<Eigen::Vector3d>& dl) {
        for (std::size_t i = 1; i < w.points.size(); ++i) {
            mid.push_back(0.5 * (w.points[i] + w.points[i - 1]));
            dl.push_back(w.points[i] - w.points[i - 1]);
        }
    };
    std::vector<Eigen::Vector3d> ma, da, mb, db;
    segments(a, ma, da);
    segments(b, mb, db);
    double max_seg = 0.0;
    for (const auto& d : da) max_seg = std::max(max_seg, d.norm());
    for (const auto& d : db) max_seg = std::max(max_seg, d.norm());

    std::vector<double> rows(ma.size(), 0.0);
    std::vector<double> row_min(ma.size(), std::numeric_limits<double>::infinity());
    parallel_for(ma.size(), [&](std::size_t i) {
        double acc = 0.0, dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < mb.size(); ++j) {
            const double r = (ma[i] - mb[j]).norm();
            dmin = std::min(dmin, r);
            acc += da[i].dot(db[j]) / r;
        }
        rows[i] = acc;
        row_min[i] = dmin;
    });
    const double dmin = *std::min_element(row_min.begin(), row_min.end());
    if (!(dmin > max_seg)) throw InputError("curves intersect or touch: self-inductance out of scope");
    double sum = 0.0;
    for (double r : rows) sum += r;
    return kMu0 / (4.0 * M_PI) * sum;
}

}  // namespace optolattice
