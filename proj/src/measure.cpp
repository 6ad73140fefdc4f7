#include "optolattice/measure.hpp"

#include "optolattice/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

namespace optolattice {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kPlanck = 6.62607015e-34;

double ang(double hz) { return kTwoPi * hz; }

/// kappa/((Omega-Delta)^2 + kappa^2/4) - kappa/((Omega+Delta)^2 + kappa^2/4), angular.
double lorentz_difference(const DampingConfig& c) {
    const double k = ang(c.kappa_tot), om = ang(c.mech_freq), d = ang(c.detuning);
    return k / ((om - d) * (om - d) + k * k / 4.0) - k / ((om + d) * (om + d) + k * k / 4.0);
}

double cavity_denominator(const DampingConfig& c) {
    const double k = ang(c.kappa_tot), d = ang(c.detuning);
    return d * d + k * k / 4.0;
}

}  // namespace

void DampingConfig::validate() const {
    if (!(kappa_tot > 0.0)) throw InputError("kappa_tot must be positive");
    for (double v : {kappa_1, kappa_2, drive_flux, transmittance, mech_freq, mech_linewidth, g0})
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("damping rates must be non-negative");
    if (kappa_1 + kappa_2 > kappa_tot * (1.0 + 1e-12)) throw InputError("kappa_1 + kappa_2 exceeds kappa_tot");
}

double intracavity_photons(const DampingConfig& cfg) {
    cfg.validate();
    return ang(cfg.kappa_1) * cfg.transmittance * cfg.drive_flux / cavity_denominator(cfg);
}

double optomech_damping(const DampingConfig& cfg, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InputError("eta must lie in [0, 1]");
    const double g = eta * ang(cfg.g0);
    return intracavity_photons(cfg) * g * g * lorentz_difference(cfg) / kTwoPi;
}

double effective_damping(const DampingConfig& cfg, double eta) {
    return cfg.mech_linewidth + optomech_damping(cfg, eta);
}

double damping_slope(const DampingConfig& cfg, double eta) {
    cfg.validate();
    if (!(eta >= 0.0 && eta <= 1.0)) throw InputError("eta must lie in [0, 1]");
    const double g = eta * ang(cfg.g0);
    return ang(cfg.kappa_1) * cfg.transmittance * g * g * lorentz_difference(cfg) / cavity_denominator(cfg) / kTwoPi;
}

double unnormalized_eta(double slope, const DampingConfig& cfg) {
    cfg.validate();
    if (!(slope >= 0.0)) throw InputError("slope must be non-negative");
    if (slope == 0.0) return 0.0;
    const double ld = lorentz_difference(cfg);
    if (!(ld > 0.0)) throw InputError("no optomechanical damping at this detuning (drive must be red-detuned)");
    const double eta_ang = std::sqrt(kTwoPi * slope * cavity_denominator(cfg) / ld);
    return eta_ang / std::pow(kTwoPi, 1.5);
}

// ---------------------------------------------------------------------------
// Ringdowns
// ---------------------------------------------------------------------------

RingdownTrace simulate_ringdown(double gamma_eff, double p0, double noise_sigma, double duration, double dt,
                                std::uint64_t seed, double noise_floor) {
    if (!(gamma_eff >= 0.0)) throw InputError("Gamma_eff must be >= 0");
    if (!(dt > 0.0) || !(duration > 0.0)) throw InputError("dt and duration must be positive");
    if (!(noise_sigma >= 0.0)) throw InputError("noise_sigma must be >= 0");
    RingdownTrace tr;
    tr.true_gamma = gamma_eff;
    tr.noise_floor = noise_floor;
    const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
    tr.times.resize(n);
    tr.powers.resize(n);
    Rng rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = dt * static_cast<double>(j);
        tr.times[j] = t;
        double p = p0 * std::exp(-kTwoPi * gamma_eff * t) + noise_floor;
        if (noise_sigma > 0.0) p += noise_sigma * nd(rng);
        tr.powers[j] = std::max(p, 0.0);  // detected power cannot be negative
    }
    return tr;
}

RingdownFit fit_ringdown(const RingdownTrace& trace, const FitOptions& opt) {
    const std::size_t n_all = trace.times.size();
    if (n_all < 10 || trace.powers.size() != n_all) throw InputError("ringdown fit needs >= 10 samples");
    for (std::size_t j = 1; j < n_all; ++j)
        if (!(trace.times[j] > trace.times[j - 1])) throw InputError("ringdown times must increase strictly");
    const auto skip = static_cast<std::size_t>(std::floor(opt.transient_fraction * static_cast<double>(n_all)));
    const std::size_t n = n_all - skip;
    if (n < 5) throw InputError("too few samples after the transient window");
    Eigen::VectorXd t(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
        t(static_cast<Eigen::Index>(j)) = trace.times[j + skip] - trace.times[skip];
        y(static_cast<Eigen::Index>(j)) = trace.powers[j + skip];
    }
    const double t0 = trace.times[skip];

    RingdownFit out;
    const double span = y.maxCoeff() - y.minCoeff();
    if (span <= 1e-14 * std::max(std::abs(y.maxCoeff()), 1e-300)) {
        out.gamma = 0.0;
        out.floor = y.mean();
        return out;
    }

    // Initial guess: floor from the tail, log-linear regression above it.
    const Eigen::Index tail = std::max<Eigen::Index>(3, static_cast<Eigen::Index>(n) / 10);
    double floor0 = y.tail(tail).mean();
    const double head = y.head(std::max<Eigen::Index>(1, tail / 3)).mean();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        const double v = y(j) - floor0;
        if (v > 0.05 * (head - floor0) && v > 0) {
            const double ly = std::log(v);
            sx += t(j);
            sy += ly;
            sxx += t(j) * t(j);
            sxy += t(j) * ly;
            ++m;
        }
    }
    double rate = 1.0 / std::max(t(t.size() - 1), 1e-300);
    double amp = std::max(head - floor0, 1e-300);
    if (m >= 3) {
        const double den = m * sxx - sx * sx;
        if (den > 0) {
            const double b = (m * sxy - sx * sy) / den;
            if (-b > 0) {
                rate = -b;
                amp = std::exp((sy - b * sx) / m);
            }
        }
    }

    // Levenberg-Marquardt on (amp, rate, floor), rate = 2 pi Gamma.
    Eigen::Vector3d p(amp, rate, floor0);
    auto residual = [&](const Eigen::Vector3d& q, Eigen::VectorXd& r) {
        r = (q(0) * (-q(1) * t.array()).exp() + q(2)).matrix() - y;
        return r.squaredNorm();
    };
    Eigen::VectorXd r;
    double cost = residual(p, r);
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        Eigen::MatrixXd jac(y.size(), 3);
        const Eigen::ArrayXd e = (-p(1) * t.array()).exp();
        jac.col(0) = e.matrix();
        jac.col(1) = (-p(0) * t.array() * e).matrix();
        jac.col(2).setOnes();
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Eigen::Vector3d g = jac.transpose() * r;
        bool improved = false;
        for (int inner = 0; inner < 30; ++inner) {
            Eigen::Matrix3d a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
            const Eigen::Vector3d step = a.ldlt().solve(-g);
            const Eigen::Vector3d trial = p + step;
            Eigen::VectorXd rt;
            const double ct = residual(trial, rt);
            if (std::isfinite(ct) && ct <= cost) {
                const double rel_step = std::abs(step(1)) / std::max(std::abs(p(1)), 1e-300);
                const bool tiny = (cost - ct) <= 1e-15 * cost || rel_step < 1e-13;
                p = trial;
                r = rt;
                cost = ct;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (tiny || cost == 0.0) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (converged || !improved) {
            converged = true;
            break;
        }
    }
    if (!converged || !p.allFinite()) {
        std::ostringstream os;
        os << "ringdown fit did not converge after " << it << " iterations (cost " << cost << ", rate " << p(1)
           << ")";
        throw NumericalError(os.str());
    }
    out.iterations = it + 1;
    out.p0 = p(0) * std::exp(p(1) * t0);
    out.floor = p(2);
    out.gamma = p(1) / kTwoPi;
    {
        Eigen::MatrixXd jac(y.size(), 3);
        const Eigen::ArrayXd e = (-p(1) * t.array()).exp();
        jac.col(0) = e.matrix();
        jac.col(1) = (-p(0) * t.array() * e).matrix();
        jac.col(2).setOnes();
        const double dof = std::max<double>(1.0, static_cast<double>(y.size()) - 3.0);
        const Eigen::Matrix3d cov = (jac.transpose() * jac).inverse() * (cost / dof);
        out.gamma_stderr = std::sqrt(std::max(cov(1, 1), 0.0)) / kTwoPi;
    }
    if (out.gamma < 0.0) {
        out.gamma = 0.0;
        out.clipped = true;
        out.warning = "negative damping rate clipped to zero";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

SinkhornResult sinkhorn_normalize(const Eigen::MatrixXd& eta_tilde, double tol, int max_iter) {
    if (eta_tilde.rows() == 0 || eta_tilde.rows() != eta_tilde.cols())
        throw InputError("sinkhorn_normalize needs a non-empty square matrix");
    if (!eta_tilde.allFinite() || eta_tilde.minCoeff() < 0.0)
        throw InputError("unnormalized participation ratios must be finite and non-negative");
    SinkhornResult out;
    Eigen::MatrixXd e = eta_tilde;
    for (Eigen::Index k = 0; k < e.rows(); ++k)
        for (Eigen::Index i = 0; i < e.cols(); ++i)
            if (e(k, i) < kSinkhornFloor) {
                e(k, i) = kSinkhornFloor;
                out.floored.emplace_back(static_cast<int>(k), static_cast<int>(i));
            }
    auto residual = [&] {
        const double r = (e.rowwise().sum().array() - 1.0).abs().maxCoeff();
        const double c = (e.colwise().sum().array() - 1.0).abs().maxCoeff();
        return std::max(r, c);
    };
    out.residual = residual();
    int step = 0;
    while (out.residual >= tol) {
        if (step >= max_iter) {
            std::ostringstream os;
            os << "iterative normalization did not converge in " << max_iter << " steps (residual " << out.residual
               << ")";
            throw NumericalError(os.str());
        }
        if (step % 2 == 0)
            e.array().colwise() /= e.rowwise().sum().array();
        else
            e.array().rowwise() /= e.colwise().sum().array();
        ++step;
        out.residual = residual();
    }
    out.iterations = step;
    out.eta.eta = e;
    return out;
}

double relative_error(const Eigen::MatrixXd& eta_hat, const Eigen::MatrixXd& eta_true) {
    if (eta_hat.rows() != eta_true.rows() || eta_hat.cols() != eta_true.cols())
        throw InputError("relative_error: shape mismatch");
    if (eta_true.size() == 0) return 0.0;
    if (eta_true.minCoeff() <= 0.0) throw InputError("relative_error: reference entries must be positive");
    return ((eta_hat - eta_true).cwiseAbs().array() / eta_true.array()).mean();
}

// ---------------------------------------------------------------------------
// Signs, orthogonalization, reconstruction
// ---------------------------------------------------------------------------

std::vector<int> match_modes(const Eigen::VectorXd& measured, const Eigen::VectorXd& reference) {
    const Eigen::Index n = measured.size();
    if (reference.size() != n) throw InputError("mode count mismatch between measurement and reference");
    std::vector<std::tuple<double, int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index q = 0; q < n; ++q)
            pairs.emplace_back(std::abs(measured(r) - reference(q)), static_cast<int>(r), static_cast<int>(q));
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> out(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (const auto& [d, r, q] : pairs) {
        (void)d;
        if (out[static_cast<std::size_t>(r)] >= 0 || used[static_cast<std::size_t>(q)]) continue;
        out[static_cast<std::size_t>(r)] = q;
        used[static_cast<std::size_t>(q)] = true;
    }
    return out;
}

Eigen::MatrixXd assign_signs(const ParticipationMatrix& eta_hat, const ModeSet& reference,
                             const Eigen::VectorXd& measured_freqs) {
    const Eigen::Index n = eta_hat.eta.rows();
    if (eta_hat.eta.cols() != n || reference.size() != n || reference.modeshapes.cols() != n)
        throw InputError("assign_signs: reference shape mismatch");
    const Eigen::MatrixXd ref = reference.real_modeshapes();
    std::vector<int> rows(static_cast<std::size_t>(n));
    if (measured_freqs.size() > 0)
        rows = match_modes(measured_freqs, reference.eigenfreqs);
    else
        std::iota(rows.begin(), rows.end(), 0);
    Eigen::MatrixXd u(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = ref(rows[static_cast<std::size_t>(k)], i) < 0.0 ? -1.0 : 1.0;
            u(k, i) = s * std::sqrt(std::max(eta_hat.eta(k, i), 0.0));
        }
    return u;
}

CouplingHamiltonian reconstruct_hamiltonian(const Eigen::MatrixXd& u, const Eigen::VectorXd& eigenfreqs) {
    const Eigen::Index n = u.rows();
    if (u.cols() != n || eigenfreqs.size() != n) throw InputError("reconstruct_hamiltonian: shape mismatch");
    const double defect = (u * u.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > 1e-8) throw InputError("reconstruct_hamiltonian: U is not orthogonal (defect " + std::to_string(defect) + ")");
    Eigen::MatrixXd h = u.transpose() * eigenfreqs.asDiagonal() * u;
    h = 0.5 * (h + h.transpose()).eval();
    CouplingHamiltonian out;
    out.matrix = h.cast<Complex>();
    for (Eigen::Index i = 0; i < n; ++i) out.site_labels.push_back("site" + std::to_string(i + 1));
    return out;
}

CouplingHamiltonian rotating_frame(const CouplingHamiltonian& h) {
    CouplingHamiltonian out = h;
    const Complex mean = h.matrix.diagonal().mean();
    out.matrix.diagonal().array() -= mean;
    return out;
}

RecoveryResult recover_hamiltonian(const Eigen::MatrixXd& eta_tilde, const Eigen::VectorXd& eigenfreqs,
                                   const ModeSet& reference, const RecoveryOptions& opt) {
    RecoveryResult out;
    auto sk = sinkhorn_normalize(eta_tilde, opt.tol, opt.max_iter);
    out.eta_hat = sk.eta;
    out.iterations_used = sk.iterations;
    out.sinkhorn_residual = sk.residual;
    out.floored = sk.floored;
    out.u_tilde = assign_signs(out.eta_hat, reference, eigenfreqs);
    Eigen::MatrixXd ut = out.u_tilde;
    if (ut.determinant() < 0.0) {
        // Pick the row whose negation keeps eigenvalues furthest from the cut.
        double best = -1.0;
        for (Eigen::Index k = 0; k < ut.rows(); ++k) {
            Eigen::MatrixXd trial = ut;
            trial.row(k) *= -1.0;
            const double m = branch_cut_margin(trial);
            if (m > best) {
                best = m;
                out.flipped_row = static_cast<int>(k);
            }
        }
        ut.row(out.flipped_row) *= -1.0;
    }
    out.branch_margin = branch_cut_margin(ut);
    out.u_hat = orthogonalize(ut);
    if (out.flipped_row >= 0) out.u_hat.row(out.flipped_row) *= -1.0;
    const Eigen::Index n = out.u_hat.rows();
    out.orthogonality_defect =
        (out.u_hat * out.u_hat.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    out.h_hat = reconstruct_hamiltonian(out.u_hat, eigenfreqs);
    return out;
}

Eigen::VectorXd relative_g0(const Eigen::MatrixXd& eta_tilde, const Eigen::MatrixXd& eta_hat) {
    if (eta_tilde.rows() != eta_hat.rows() || eta_tilde.cols() != eta_hat.cols())
        throw InputError("relative_g0: shape mismatch");
    if (eta_hat.minCoeff() <= 0.0) throw InputError("relative_g0: eta_hat entries must be positive");
    Eigen::VectorXd g = (eta_tilde.array() / eta_hat.array()).colwise().mean().transpose();
    return g / g.sum();
}

Eigen::VectorXd anchor_g0(const Eigen::VectorXd& gbar, int anchor_site, double g0_anchor) {
    if (anchor_site < 0 || anchor_site >= gbar.size()) throw InputError("anchor site out of range");
    return gbar / gbar(anchor_site) * g0_anchor;
}

// ---------------------------------------------------------------------------
// Sideband thermometry
// ---------------------------------------------------------------------------

double sideband_ratio(const SidebandConfig& cfg, double eta_g0, double n_m) {
    return eta_g0 * eta_g0 * n_m / (cfg.mech_freq * cfg.mech_freq + cfg.kappa_tot * cfg.kappa_tot / 4.0);
}

double thermal_occupation(double temperature, double mech_freq) {
    return kBoltzmann * temperature / (kPlanck * mech_freq);
}

SidebandEstimate fit_sideband(const SidebandConfig& cfg, const std::vector<double>& n_m,
                              const std::vector<double>& ratio) {
    if (n_m.size() != ratio.size() || n_m.size() < 2) throw InputError("fit_sideband needs matched samples");
    double sxy = 0, sxx = 0;
    for (std::size_t j = 0; j < n_m.size(); ++j) {
        sxy += n_m[j] * ratio[j];
        sxx += n_m[j] * n_m[j];
    }
    SidebandEstimate e;
    e.slope = sxy / sxx;
    if (!(e.slope > 0.0)) throw NumericalError("non-positive sideband slope");
    e.eta_g0 = std::sqrt(e.slope * (cfg.mech_freq * cfg.mech_freq + cfg.kappa_tot * cfg.kappa_tot / 4.0));
    return e;
}

SidebandEstimate sideband_thermometry(const SidebandConfig& cfg, double eta_g0, const std::vector<double>& n_m,
                                      double noise_rel, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> ratio;
    ratio.reserve(n_m.size());
    for (double n : n_m) {
        const double noise = noise_rel > 0.0 ? noise_rel * nd(rng) : 0.0;
        ratio.push_back(sideband_ratio(cfg, eta_g0, n) * (1.0 + noise));
    }
    return fit_sideband(cfg, n_m, ratio);
}

}  // namespace optolattice
