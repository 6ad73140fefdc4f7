#pragma once

// Independent reference implementations used only by the tests. None of them
// call into the library's numerical code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Cyclic Jacobi eigenvalue iteration for real symmetric matrices.
/// Returns eigenvalues ascending and eigenvectors as columns.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigen(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
    Eigen::VectorXd w(n);
    Eigen::MatrixXd vs(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        vs.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    return {w, vs};
}

/// Dense chain written out entry by entry from the coupling pattern.
inline Eigen::MatrixXd chain_matrix(int n, double wc, double J, double Jp, double J2 = 0, double J3 = 0,
                                    double J3p = 0) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = wc;
        if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = (i % 2 == 0) ? J : Jp;
        if (i + 2 < n) h(i, i + 2) = h(i + 2, i) = J2;
        if (i + 3 < n) h(i, i + 3) = h(i + 3, i) = (i % 2 == 0) ? J3 : J3p;
    }
    return h;
}

/// Mutual inductance of two coaxial circular loops (radii a, b, axial
/// distance d) from complete elliptic integrals.
inline double coaxial_loops(double a, double b, double d) {
    constexpr double mu0 = 1.25663706212e-6;
    const double k = std::sqrt(4.0 * a * b / ((a + b) * (a + b) + d * d));
    return mu0 * std::sqrt(a * b) * ((2.0 / k - k) * std::comp_ellint_1(k) - 2.0 / k * std::comp_ellint_2(k));
}

/// Berry phase of the lower band of H(k) = [[0, rho], [conj rho, 0]] from a
/// discretized Wilson loop, in (-pi, pi].
template <class Rho>
double wilson_loop_berry_phase(Rho rho, int n = 2048) {
    std::complex<double> prod = 1.0;
    auto lower = [&](double k) {
        const std::complex<double> r = rho(k);
        // Lower eigenvector of the chiral 2x2 block: (1, -conj(r)/|r|)/sqrt2.
        Eigen::Vector2cd u(1.0, -std::conj(r) / std::abs(r));
        return Eigen::Vector2cd(u / std::sqrt(2.0));
    };
    Eigen::Vector2cd first = lower(-M_PI), prev = first;
    for (int j = 1; j <= n; ++j) {
        const Eigen::Vector2cd cur = (j == n) ? first : lower(-M_PI + 2.0 * M_PI * j / n);
        prod *= prev.dot(cur);
        prev = cur;
    }
    return -std::arg(prod);
}

/// Winding number of phi = -arg(rho) over the zone, by counting signed
/// crossings of the positive real axis. Samples are offset by half a step so
/// that the symmetric points k = 0, pi are never sampled on the axis.
template <class Rho>
int crossing_winding(Rho rho, int n = 8192) {
    int w = 0;
    auto at = [&](int j) { return rho(-M_PI + 2.0 * M_PI * (j + 0.5) / n); };
    const std::complex<double> first = at(0);
    std::complex<double> prev = first;
    for (int j = 1; j <= n; ++j) {
        const std::complex<double> cur = (j == n) ? first : at(j);
        const bool up = prev.imag() < 0 && cur.imag() >= 0;
        const bool down = prev.imag() >= 0 && cur.imag() < 0;
        if (up || down) {
            const double x = prev.real() - prev.imag() * (cur.real() - prev.real()) / (cur.imag() - prev.imag());
            if (x > 0) w += up ? -1 : 1;
        }
        prev = cur;
    }
    return w;
}

/// Matrix balancing by alternating row and column scaling written as explicit
/// loops, run for a fixed number of sweeps.
inline Eigen::MatrixXd balance(Eigen::MatrixXd m, int sweeps) {
    for (int s = 0; s < sweeps; ++s) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            double t = 0;
            for (Eigen::Index c = 0; c < m.cols(); ++c) t += m(r, c);
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) /= t;
        }
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double t = 0;
            for (Eigen::Index r = 0; r < m.rows(); ++r) t += m(r, c);
            for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) /= t;
        }
    }
    return m;
}

/// Random orthogonal matrix from Gram-Schmidt of a Gaussian matrix.
template <class Rng>
Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = nd(rng);
    Eigen::MatrixXd q(n, n);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd v = g.col(j);
        for (int i = 0; i < j; ++i) v -= q.col(i).dot(g.col(j)) * q.col(i);
        q.col(j) = v.normalized();
    }
    return q;
}

}  // namespace oracle
