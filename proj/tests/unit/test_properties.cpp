// Randomized invariants across modules. Each case draws its inputs from a
// fixed seed so failures reproduce.

#include "fixtures.hpp"
#include "oracles.hpp"

#include "optolattice/circuit.hpp"
#include "optolattice/disorder.hpp"
#include "optolattice/experiment.hpp"
#include "optolattice/flake.hpp"
#include "optolattice/measure.hpp"
#include "optolattice/random.hpp"
#include "optolattice/topology.hpp"

#include <doctest.h>

#include <random>

using namespace optolattice;

namespace {

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

std::vector<CouplingHamiltonian> random_lattices(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::vector<CouplingHamiltonian> out;
    for (int t = 0; t < n; ++t) {
        const int cells = 1 + static_cast<int>(rng() % 12);
        out.push_back(apply_disorder(build_hamiltonian(fixture::random_chain(rng, cells)), 0.01, rng()));
        const Couplings c{uniform(rng, 100e6, 800e6), uniform(rng, 100e6, 800e6), uniform(rng, 0, 80e6), 0, 0};
        out.push_back(build_honeycomb_flake(c, std::vector<double>(24, uniform(rng, 6e9, 8e9))));
        out.push_back(build_ribbon_hamiltonian(static_cast<RibbonOrientation>(rng() % 4), 3 + static_cast<int>(rng() % 20),
                                               uniform(rng, -M_PI, M_PI), c, 7e9));
    }
    return out;
}

double max_abs(const CouplingHamiltonian& h) { return h.matrix.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("properties: lattice") {

TEST_CASE("generated Hamiltonians are Hermitian") {
    for (const auto& h : random_lattices(1, 60)) {
        const double scale = max_abs(h);
        CHECK((h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-9 * scale);
        CHECK(h.hermiticity_defect() < 1e-9);
    }
}

TEST_CASE("diagonalize: orthonormal modes that diagonalize H and rebuild it") {
    for (const auto& h : random_lattices(2, 60)) {
        const ModeSet m = diagonalize(h);
        const Eigen::Index n = m.size();
        const Eigen::MatrixXcd& u = m.modeshapes;
        CHECK((u * u.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        // Row k is psi^k, so conj(U) H U^T is diagonal.
        const Eigen::MatrixXcd d = u.conjugate() * h.matrix * u.transpose();
        Eigen::MatrixXcd off = d;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() < 1e-8 * max_abs(h));
        CHECK((d.diagonal().real() - m.eigenfreqs).cwiseAbs().maxCoeff() < 1e-8 * max_abs(h));
        for (Eigen::Index k = 1; k < n; ++k) CHECK(m.eigenfreqs(k) >= m.eigenfreqs(k - 1));
        const Eigen::MatrixXcd back = u.transpose() * m.eigenfreqs.asDiagonal() * u.conjugate();
        CHECK((back - h.matrix).norm() / h.matrix.norm() < 1e-8);
    }
}

TEST_CASE("participation is doubly stochastic") {
    for (const auto& h : random_lattices(3, 60)) {
        const ParticipationMatrix p = participation(diagonalize(h));
        CHECK((p.eta.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
        CHECK((p.eta.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
        CHECK(p.eta.minCoeff() >= 0.0);
    }
}

TEST_CASE("chiral symmetry of bipartite chains") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
        const int cells = 1 + static_cast<int>(rng() % 15);
        const double wc = uniform(rng, 5e9, 9e9);
        const Couplings c{uniform(rng, 0, 1e9), uniform(rng, 0, 1e9), 0.0, uniform(rng, 0, 1e8), uniform(rng, 0, 1e8)};
        const ModeSet m = diagonalize(build_ssh_chain(cells, c, std::vector<double>(2 * cells, wc)));
        const Eigen::Index n = m.size();
        for (Eigen::Index k = 0; k < n; ++k)
            CHECK(std::abs((m.eigenfreqs(k) - wc) + (m.eigenfreqs(n - 1 - k) - wc)) < 1e-9 * wc);
    }
}

TEST_CASE("wide ribbons reproduce the bulk bands") {
    // Every ribbon eigenvalue sits on a bulk band +-|rho(k_perp | k_par)| for some
    // k_perp, up to edge states; the spread shrinks with width.
    std::mt19937_64 rng(5);
    for (int t = 0; t < 8; ++t) {
        const auto o = static_cast<RibbonOrientation>(t % 4);
        const Couplings c{1.0, uniform(rng, 0.3, 0.9), 0, 0, 0};
        const double kp = uniform(rng, -M_PI, M_PI);
        std::vector<double> bulk;
        for (int j = 0; j < 8192; ++j) bulk.push_back(std::abs(ribbon_rho(o, -M_PI + 2 * M_PI * j / 8192, kp, c)));
        const double lo = *std::min_element(bulk.begin(), bulk.end());
        const double hi = *std::max_element(bulk.begin(), bulk.end());
        auto deviation = [&](int width) {
            const ModeSet m = diagonalize(build_ribbon_hamiltonian(o, width, kp, c));
            double worst = 0.0;
            int outside = 0;
            for (Eigen::Index k = 0; k < m.size(); ++k) {
                const double e = std::abs(m.eigenfreqs(k));
                if (e < lo - 1e-9 || e > hi + 1e-9) ++outside;
                worst = std::max(worst, std::max(0.0, e - hi));
            }
            // Filling: the largest band value is approached from below.
            const double top = m.eigenfreqs.cwiseAbs().maxCoeff();
            return std::make_pair(outside, std::max(worst, hi - top));
        };
        const auto [out40, dev40] = deviation(40);
        const auto [out160, dev160] = deviation(160);
        CHECK(out40 <= 2);
        CHECK(out160 <= 2);
        CHECK(dev40 < 10.0 / 40);
        CHECK(dev160 < 10.0 / 160);
        CHECK(dev160 <= dev40 + 1e-12);
    }
}

}  // TEST_SUITE

TEST_SUITE("properties: topology") {

TEST_CASE("winding is invariant under uniform scaling") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 200; ++t) {
        const Couplings c{uniform(rng, 0, 1), uniform(rng, 0, 1), 0, uniform(rng, 0, 0.2), uniform(rng, 0, 0.2)};
        const BulkCurve base = bulk_curve_ssh(c, 1024);
        if (base.gapless || base.min_abs < 1e-3) continue;
        const int w = winding_number(base);
        for (double s : {1e-6, 0.37, 8.0, 7.12e9}) {
            const Couplings cs{s * c.J, s * c.Jp, 0, s * c.J3, s * c.J3p};
            CHECK(winding_number(bulk_curve_ssh(cs, 1024)) == w);
        }
    }
}

TEST_CASE("Zak phase is pi exactly when the winding is odd") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 300; ++t) {
        const Couplings c{uniform(rng, 0, 1), uniform(rng, 0, 1), 0, uniform(rng, 0, 0.3), uniform(rng, 0, 0.3)};
        const BulkCurve curve = bulk_curve_ssh(c, 2048);
        if (curve.gapless || curve.min_abs < 1e-3) continue;
        const int w = winding_number(curve);
        if (std::abs(w) > 1) continue;
        CHECK((zak_phase(curve) == M_PI) == (w % 2 != 0));
        const EdgePrediction p = edge_prediction_finite(c, 1 + static_cast<int>(rng() % 12));
        CHECK(p.edge_states_exist == (p.zak == M_PI && std::abs(p.slope_at_kmin) < p.slope_bound));
    }
}

TEST_CASE("phase slope matches central differences") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 200; ++t) {
        const Couplings c{uniform(rng, 0.2, 1), uniform(rng, 0.2, 1), 0, uniform(rng, 0, 0.1), uniform(rng, 0, 0.1)};
        const auto rho = [&](double k) { return bulk_rho_ssh(k, c); };
        const auto drho = [&](double k) { return bulk_rho_ssh_dk(k, c); };
        const double k = uniform(rng, -M_PI, M_PI);
        if (std::abs(rho(k)) < 1e-2) continue;
        const double h = 1e-5;
        const double fd = -(std::arg(rho(k + h / 2) / rho(k - h / 2))) / h;
        const double an = phase_slope(rho, drho, k);
        CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("isotropic graphene is gapless only at the Dirac points") {
    for (int grid : {60, 90, 120}) {
        const auto pts = graphene_gapless_points({1.0, 1.0, 1.0}, grid, 1e-9);
        CHECK(pts.size() == 2);
        for (const auto& [a, b] : pts) {
            CHECK(std::abs(std::abs(a) - 2 * M_PI / 3) < 1e-9);
            CHECK(std::abs(std::abs(b) - 2 * M_PI / 3) < 1e-9);
        }
    }
}

}  // TEST_SUITE

TEST_SUITE("properties: circuit") {

TEST_CASE("Neumann inductance: swap symmetry and rigid motion") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 6; ++t) {
        const Eigen::Vector3d n1 = Eigen::Vector3d(uniform(rng, -1, 1), uniform(rng, -1, 1), 1).normalized();
        const Eigen::Vector3d n2 = Eigen::Vector3d(uniform(rng, -1, 1), 1, uniform(rng, -1, 1)).normalized();
        const WireCurve a = circular_loop(uniform(rng, 0.5e-3, 1.5e-3), Eigen::Vector3d::Zero(), n1, 300);
        const WireCurve b = circular_loop(uniform(rng, 0.5e-3, 1.5e-3), Eigen::Vector3d(uniform(rng, 4e-3, 6e-3), 1e-3, 0), n2, 300);
        const double m = mutual_inductance_neumann(a, b, 300);
        CHECK(std::abs(mutual_inductance_neumann(b, a, 300) - m) <= 1e-10 * std::abs(m));
        const Eigen::Matrix3d r = oracle::random_orthogonal(3, rng);
        const Eigen::Vector3d shift(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        WireCurve ra = a, rb = b;
        for (auto& p : ra.points) p = r * p + shift;
        for (auto& p : rb.points) p = r * p + shift;
        CHECK(std::abs(mutual_inductance_neumann(ra, rb, 300) - m) <= 1e-10 * std::abs(m));
    }
}

TEST_CASE("dimer splitting agrees with the two-site chain") {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 100; ++t) {
        const CircuitCell cell{uniform(rng, 0.5e-9, 5e-9), uniform(rng, 0.1e-12, 1e-12)};
        const double ratio = uniform(rng, 0.001, 0.2);
        const auto [lo, hi] = dimer_eigenfrequencies(cell, ratio * cell.L);
        const ModeSet m = diagonalize(build_ssh_chain(1, {coupling_rate(cell, ratio * cell.L), 0, 0, 0, 0},
                                                      {cell.f_c(), cell.f_c()}));
        CHECK(std::abs(m.eigenfreqs(0) - lo) <= ratio * ratio * cell.f_c());
        CHECK(std::abs(m.eigenfreqs(1) - hi) <= ratio * ratio * cell.f_c());
    }
}

}  // TEST_SUITE

TEST_SUITE("properties: measure") {

TEST_CASE("normalization is invariant under positive rescaling") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + static_cast<int>(rng() % 9);
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n * n; ++i) m(i / n, i % n) = uniform(rng, 0.01, 1.0);
        Eigen::VectorXd a(n), b(n);
        for (int i = 0; i < n; ++i) a(i) = std::exp(uniform(rng, -8, 8)), b(i) = std::exp(uniform(rng, -8, 8));
        const SinkhornResult r1 = sinkhorn_normalize(m, 1e-12, 5000);
        const SinkhornResult r2 = sinkhorn_normalize(a.asDiagonal() * m * b.asDiagonal(), 1e-12, 5000);
        CHECK((r1.eta.eta - r2.eta.eta).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((r2.eta.eta.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
        CHECK((r2.eta.eta.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("orthogonalize is idempotent") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + static_cast<int>(rng() % 12);
        // Cayley transform of a bounded skew matrix: rotation angles stay below
        // 2 atan(3), away from the branch cut.
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n * n; ++i) a(i / n, i % n) = nd(rng);
        a = (a - a.transpose()).eval();
        a *= uniform(rng, 0.1, 3.0) / a.operatorNorm();
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd q = (id - a).inverse() * (id + a);
        Eigen::MatrixXd noise(n, n);
        for (int i = 0; i < n * n; ++i) noise(i / n, i % n) = nd(rng);
        const Eigen::MatrixXd u = orthogonalize(q + 0.02 * noise);
        CHECK((u * u.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((orthogonalize(u) - u).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("optomechanical damping is odd in detuning") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 500; ++t) {
        DampingConfig c;
        c.kappa_tot = uniform(rng, 1e4, 1e7);
        c.kappa_1 = c.kappa_2 = 0.25 * c.kappa_tot;
        c.mech_freq = uniform(rng, 1e6, 5e6);
        c.mech_linewidth = uniform(rng, 1, 50);
        c.g0 = uniform(rng, 1, 20);
        c.drive_flux = std::exp(uniform(rng, 20, 40));
        c.transmittance = 1e-7;
        const double eta = uniform(rng, 0, 1);
        c.detuning = uniform(rng, 0, 3 * c.mech_freq);
        const double plus = optomech_damping(c, eta);
        c.detuning = -c.detuning;
        CHECK(optomech_damping(c, eta) == doctest::Approx(-plus).epsilon(1e-12));
    }
}

TEST_CASE("noiseless pipeline reproduces the Hamiltonian") {
    // Pairs (k, i) sweep the drive flux; slopes come from the simulated traces.
    std::mt19937_64 rng(14);
    for (int t = 0; t < 20; ++t) {
        const LatticeSpec spec = fixture::random_chain(rng, 2 + static_cast<int>(rng() % 5));
        ExperimentPlan plan = fixture::plan_for(spec, rng);
        plan.noiseless = true;
        const CouplingHamiltonian h = build_hamiltonian(spec);
        const ModeSet truth = diagonalize(h);
        const MeasurementDataset d = simulate_measurement(truth, plan, rng());
        const RecoveryResult r = recover_hamiltonian(d.eta_tilde(), d.eigenfreqs, truth);
        CHECK((r.h_hat.real() - h.real()).norm() / h.real().norm() < 1e-6);
    }
}

TEST_CASE("measurement simulation is deterministic and schedule independent") {
    std::mt19937_64 rng(15);
    const LatticeSpec spec = fixture::random_chain(rng);
    const ExperimentPlan plan = fixture::plan_for(spec, rng);
    const ModeSet truth = diagonalize(build_hamiltonian(spec));
    const MeasurementDataset a = simulate_measurement(truth, plan, 31, true);
    const MeasurementDataset b = simulate_measurement(truth, plan, 31, true);
    CHECK(a.eta_tilde() == b.eta_tilde());
    // Each trace depends only on its own derived seed.
    for (int k : {0, 4, 9})
        for (int i : {1, 5}) {
            const SweepPoint& p = a.at(k, i);
            for (std::size_t q = 0; q < p.seeds.size(); ++q) {
                CHECK(p.seeds[q] ==
                      derive_seed({31, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i), q}));
                CHECK(p.traces[q].powers == b.at(k, i).traces[q].powers);
            }
        }
    CHECK(simulate_measurement(truth, plan, 32).eta_tilde() != a.eta_tilde());
}

}  // TEST_SUITE

TEST_SUITE("properties: disorder") {

TEST_CASE("zeta bounded and reversal invariant") {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 300; ++t) {
        const int cells = 2 + static_cast<int>(rng() % 10);
        const LatticeSpec spec = fixture::random_chain(rng, cells);
        const CouplingHamiltonian h = apply_disorder(build_hamiltonian(spec), uniform(rng, 0, 0.02), rng());
        const ParticipationMatrix p = participation(diagonalize(h));
        const double z = hybridization_factor(p, cells);
        CHECK(z >= 0.0);
        CHECK(z <= 1.0);
        CHECK(hybridization_factor(ParticipationMatrix{p.eta.rowwise().reverse()}, cells) ==
              doctest::Approx(z).epsilon(1e-13));
    }
}

TEST_CASE("ensemble is bit reproducible under any thread count") {
    std::mt19937_64 rng(17);
    const LatticeSpec spec = fixture::random_chain(rng);
    const std::vector<double> grid = {0.0, 0.001, 0.004};
    const EnsembleResult one = run_ensemble(spec, grid, 300, 99, 1);
    for (unsigned threads : {2u, 3u, 8u, 0u}) {
        const EnsembleResult many = run_ensemble(spec, grid, 300, 99, threads);
        for (std::size_t s = 0; s < grid.size(); ++s) {
            CHECK(many.stats[s].sorted_zeta == one.stats[s].sorted_zeta);
            CHECK(many.stats[s].mean == one.stats[s].mean);
            CHECK(many.stats[s].freq_mean == one.stats[s].freq_mean);
        }
    }
}

TEST_CASE("zeta mean non-increasing in sigma on the device chain") {
    LatticeSpec spec;
    spec.kind = TopologyKind::SshChain;
    spec.n_sites = 10;
    spec.couplings = {470e6, 700e6, 100e6, 27e6, 37e6};
    spec.sites.assign(10, SiteParams{7.12e9, 0, 0, 0});
    const std::vector<double> grid = {0.0, 0.0005, 0.001, 0.002, 0.003, 0.005, 0.0075, 0.01, 0.02};
    const EnsembleResult e = run_ensemble(spec, grid, 2000, 18);
    for (std::size_t s = 1; s < grid.size(); ++s) {
        const double se = std::hypot(e.stats[s].stddev, e.stats[s - 1].stddev) / std::sqrt(2000.0);
        CHECK(e.stats[s].mean <= e.stats[s - 1].mean + 2 * se);
    }
}

}  // TEST_SUITE
