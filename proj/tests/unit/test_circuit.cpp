#include "oracles.hpp"

#include "optolattice/circuit.hpp"
#include "optolattice/lattice.hpp"

#include <doctest.h>

using namespace optolattice;

namespace {

// C chosen so that f_c = 7.12 GHz with L = 2 nH.
CircuitCell device_cell() {
    const double L = 2e-9;
    const double w = 2 * M_PI * 7.12e9;
    return {L, 1.0 / (w * w * L)};
}

// Table of measured mechanical frequencies, sites 1..10.
const double kMech[10] = {2.142e6, 2.165e6, 2.202e6, 2.238e6, 2.267e6, 2.315e6, 2.616e6, 2.405e6, 2.448e6, 2.506e6};

}  // namespace

TEST_SUITE("circuit") {

TEST_CASE("cell") {
    CHECK(device_cell().f_c() == doctest::Approx(7.12e9).epsilon(1e-12));
    CHECK_THROWS_AS(CircuitCell({0.0, 1e-12}).validate(), InputError);
    CHECK_THROWS_AS(CircuitCell({1e-9, -1.0}).validate(), InputError);
}

TEST_CASE("dimer") {
    const CircuitCell cell = device_cell();
    SUBCASE("M = 0 is degenerate") {
        const auto [lo, hi] = dimer_eigenfrequencies(cell, 0.0);
        CHECK(lo == doctest::Approx(7.12e9));
        CHECK(hi == doctest::Approx(7.12e9));
    }
    SUBCASE("M/L = 0.1 against the 2x2 Kirchhoff problem") {
        const auto [lo, hi] = dimer_eigenfrequencies(cell, 0.1 * cell.L);
        CHECK(lo == doctest::Approx(6.788653635428617e9).epsilon(1e-12));
        CHECK(hi == doctest::Approx(7.505138980132954e9).epsilon(1e-12));
        // Generalized eigenproblem L_mat^-1 C^-1: omega^2 are eigenvalues of inv([[L, M], [M, L]]) / C.
        Eigen::Matrix2d lm;
        lm << cell.L, 0.1 * cell.L, 0.1 * cell.L, cell.L;
        const auto w = oracle::jacobi_eigen(Eigen::MatrixXd(lm.inverse() / cell.C)).first;
        CHECK(std::sqrt(w(0)) / (2 * M_PI) == doctest::Approx(lo).epsilon(1e-12));
        CHECK(std::sqrt(w(1)) / (2 * M_PI) == doctest::Approx(hi).epsilon(1e-12));
    }
    SUBCASE("small-M expansion") {
        for (double r : {0.01, 0.03, 0.1}) {
            const auto [lo, hi] = dimer_eigenfrequencies(cell, r * cell.L);
            const double J = coupling_rate(cell, r * cell.L);
            CHECK(std::abs(0.5 * (hi - lo) - J) < 0.5 * r * r * cell.f_c());
            if (r <= 0.1) CHECK(std::abs(0.5 * (hi - lo) / J - 1.0) < 0.01);
        }
    }
    SUBCASE("agrees with the 2-site chain") {
        for (double r : {0.01, 0.05}) {
            const auto [lo, hi] = dimer_eigenfrequencies(cell, r * cell.L);
            const double J = coupling_rate(cell, r * cell.L);
            const ModeSet m = diagonalize(build_ssh_chain(1, {J, 0, 0, 0, 0}, {cell.f_c(), cell.f_c()}));
            CHECK(std::abs(m.eigenfreqs(0) - lo) < r * r * cell.f_c());
            CHECK(std::abs(m.eigenfreqs(1) - hi) < r * r * cell.f_c());
        }
    }
    CHECK_THROWS_AS((void)dimer_eigenfrequencies(cell, cell.L), InputError);
}

TEST_CASE("coupling rate") {
    const CircuitCell cell = device_cell();
    CHECK(coupling_rate(cell, 0.0) == 0.0);
    const double r = mutual_ratio_for_coupling(cell, 470e6);
    CHECK(r == doctest::Approx(2 * 470e6 / 7.12e9).epsilon(1e-12));
    CHECK(r == doctest::Approx(0.132).epsilon(0.002));
    CHECK(coupling_rate(cell, r * cell.L) == doctest::Approx(470e6).epsilon(1e-12));
}

TEST_CASE("infinite chain band") {
    const CircuitCell cell = device_cell();
    SUBCASE("M' = 0 reduces to the dimer") {
        const auto d = dimer_eigenfrequencies(cell, 0.05 * cell.L);
        for (double b : {-2.0, 0.0, 1.3}) {
            const auto [lo, hi] = infinite_chain_band(b, cell, 0.05 * cell.L, 0.0);
            CHECK(lo == doctest::Approx(d.first).epsilon(1e-14));
            CHECK(hi == doctest::Approx(d.second).epsilon(1e-14));
        }
    }
    SUBCASE("gapless at beta = pi for M = M'") {
        const auto [lo, hi] = infinite_chain_band(M_PI, cell, 0.05 * cell.L, 0.05 * cell.L);
        CHECK(lo == doctest::Approx(cell.f_c()).epsilon(1e-12));
        CHECK(hi == doctest::Approx(cell.f_c()).epsilon(1e-12));
    }
    SUBCASE("extrema match passband edges to second order") {
        for (double scale : {0.01, 0.03, 0.1}) {
            const double M = scale * cell.L, Mp = 1.5 * scale * cell.L;
            double lmin = 1e99, lmax = 0, umin = 1e99, umax = 0;
            for (int j = 0; j <= 2000; ++j) {
                const auto [lo, hi] = infinite_chain_band(-M_PI + 2 * M_PI * j / 2000, cell, M, Mp);
                lmin = std::min(lmin, lo), lmax = std::max(lmax, lo);
                umin = std::min(umin, hi), umax = std::max(umax, hi);
            }
            const Passbands pb = passband_edges(cell.f_c(), coupling_rate(cell, M), coupling_rate(cell, Mp));
            const double bound = 2.0 * (2.5 * scale) * (2.5 * scale) * cell.f_c();
            CHECK(std::abs(lmin - pb.lpb[0]) < bound);
            CHECK(std::abs(lmax - pb.lpb[1]) < bound);
            CHECK(std::abs(umin - pb.upb[0]) < bound);
            CHECK(std::abs(umax - pb.upb[1]) < bound);
        }
    }
    CHECK_THROWS_AS((void)infinite_chain_band(0.0, cell, 0.6 * cell.L, 0.6 * cell.L), InputError);
}

TEST_CASE("passband edges") {
    const Passbands pb = passband_edges(7.12e9, 470e6, 700e6);
    CHECK(pb.upb[0] == doctest::Approx(7.35e9));
    CHECK(pb.upb[1] == doctest::Approx(8.29e9));
    CHECK(pb.lpb[0] == doctest::Approx(5.95e9));
    CHECK(pb.lpb[1] == doctest::Approx(6.89e9));
    const Passbands touch = passband_edges(7e9, 1e8, 1e8);
    CHECK(touch.upb[0] == 7e9);
    CHECK(touch.lpb[1] == 7e9);
    const Passbands flat = passband_edges(7e9, 1e8, 0.0);
    CHECK(flat.upb[0] == flat.upb[1]);
    CHECK(flat.upb[0] == doctest::Approx(7.1e9));
    CHECK(flat.lpb[0] == doctest::Approx(6.9e9));
}

TEST_CASE("drumhead") {
    CHECK(drumhead_frequency(2e-5, 1e8, 2700) == doctest::Approx(0.5 * drumhead_frequency(1e-5, 1e8, 2700)));
    CHECK_THROWS_AS((void)drumhead_frequency(0.0, 1e8, 2700), InputError);
    SUBCASE("inverse linear fit of the measured table") {
        // Radii step by 500 nm between neighbouring sites (site 1 largest).
        // Fit 1/f = c0 + c1 i without the outlier at site 7.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int i = 1; i <= 10; ++i) {
            if (i == 7) continue;
            const double y = 1.0 / kMech[i - 1];
            sx += i, sy += y, sxx += i * i, sxy += i * y, ++n;
        }
        const double c1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double c0 = (sy - c1 * sx) / n;
        const double a = -0.5e-6 / c1;  // f = a / R
        const double r1 = a * (c0 + c1);
        // Calibrate stress/density on site 1.
        const double root = 2 * M_PI * kMech[0] * r1 / 2.4;
        const double density = 2700.0, stress = root * root * density;
        for (int i = 1; i <= 10; ++i) {
            const double f = drumhead_frequency(r1 - 0.5e-6 * (i - 1), stress, density);
            if (i == 1) CHECK(f == doctest::Approx(kMech[0]).epsilon(1e-12));
            if (i != 7) CHECK(std::abs(f / kMech[i - 1] - 1.0) < 0.02);
        }
    }
}

TEST_CASE("wire curves") {
    WireCurve w;
    w.points = {Eigen::Vector3d::Zero()};
    CHECK_THROWS_AS(w.validate(), InputError);
    w.points = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
    CHECK_THROWS_AS(w.validate(), InputError);
    const WireCurve loop = circular_loop(1e-3, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(), 1000);
    CHECK(loop.points.size() == 1001);
    CHECK(loop.length() == doctest::Approx(2 * M_PI * 1e-3).epsilon(1e-5));
    const WireCurve r = resample(loop, 250);
    CHECK(r.points.size() == 251);
    CHECK(r.length() == doctest::Approx(loop.length()).epsilon(1e-4));
}

TEST_CASE("Neumann mutual inductance") {
    const double a = 1e-3;
    auto pair = [&](double d) {
        return std::pair{circular_loop(a, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(), 2000),
                         circular_loop(a, Eigen::Vector3d(0, 0, d), Eigen::Vector3d::UnitZ(), 2000)};
    };
    SUBCASE("coaxial loops against the elliptic-integral formula") {
        const auto [p, q] = pair(2e-3);
        const double m = mutual_inductance_neumann(p, q, 2000);
        CHECK(oracle::coaxial_loops(a, a, 2e-3) == doctest::Approx(1.4185992628169895e-10).epsilon(1e-9));
        CHECK(std::abs(m / oracle::coaxial_loops(a, a, 2e-3) - 1.0) < 0.005);
    }
    SUBCASE("far field scales as 1/l^3") {
        const auto [p1, q1] = pair(10 * a);
        const auto [p2, q2] = pair(20 * a);
        const double ratio = mutual_inductance_neumann(p1, q1, 2000) / mutual_inductance_neumann(p2, q2, 2000);
        CHECK(std::abs(ratio / 8.0 - 1.0) < 0.05);
    }
    SUBCASE("Richardson check at twice the resolution") {
        const auto [p, q] = pair(2e-3);
        const double m1 = mutual_inductance_neumann(p, q, 500), m2 = mutual_inductance_neumann(p, q, 1000);
        const double exact = oracle::coaxial_loops(a, a, 2e-3);
        CHECK(std::abs(m2 - exact) < std::abs(m1 - exact) + 1e-18);
    }
    SUBCASE("perpendicular loops with a symmetry plane") {
        const WireCurve p = circular_loop(a, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(), 400);
        const WireCurve q = circular_loop(a, Eigen::Vector3d(0, 0, 3e-3), Eigen::Vector3d::UnitX(), 400);
        const double ref = mutual_inductance_neumann(p, circular_loop(a, Eigen::Vector3d(0, 0, 3e-3),
                                                                      Eigen::Vector3d::UnitZ(), 400),
                                                     400);
        CHECK(std::abs(mutual_inductance_neumann(p, q, 400)) < 1e-6 * std::abs(ref));
    }
    SUBCASE("symmetry and rigid motions") {
        const WireCurve p = circular_loop(a, Eigen::Vector3d::Zero(), Eigen::Vector3d(0.2, 0.1, 1.0), 300);
        const WireCurve q = circular_loop(0.7 * a, Eigen::Vector3d(1e-3, 0, 2.5e-3), Eigen::Vector3d(0, 1, 1), 300);
        const double m = mutual_inductance_neumann(p, q, 0);
        CHECK(mutual_inductance_neumann(q, p, 0) == doctest::Approx(m).epsilon(1e-10));
        const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
        const Eigen::Vector3d shift(0.3, -0.2, 0.05);
        auto move = [&](const WireCurve& c) {
            WireCurve o;
            for (const auto& x : c.points) o.points.push_back(rot * x + shift);
            return o;
        };
        CHECK(mutual_inductance_neumann(move(p), move(q), 0) == doctest::Approx(m).epsilon(1e-10));
    }
    SUBCASE("intersecting curves are rejected") {
        const WireCurve p = circular_loop(a, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(), 100);
        CHECK_THROWS_AS((void)mutual_inductance_neumann(p, p, 100), InputError);
    }
}

}  // TEST_SUITE
