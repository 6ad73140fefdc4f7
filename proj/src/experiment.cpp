#include "optolattice/experiment.hpp"

#include "optolattice/parallel.hpp"
#include "optolattice/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace optolattice {

void ExperimentPlan::validate(Eigen::Index n_sites) const {
    const auto n = static_cast<std::size_t>(n_sites);
    if (modes.size() != n) throw InputError("one drive configuration per collective mode is required");
    if (mech_freq.size() != n || mech_linewidth.size() != n || g0.size() != n)
        throw InputError("mech_freq, mech_linewidth and g0 need one value per site");
    for (std::size_t i = 0; i < n; ++i)
        if (!(mech_freq[i] > 0.0) || !(mech_linewidth[i] > 0.0) || !(g0[i] > 0.0))
            throw InputError("mechanical parameters must be positive");
    for (const auto& m : modes) {
        if (!(m.kappa_tot > 0.0) || !(m.kappa_1 > 0.0) || m.kappa_2 < 0.0 || !(m.transmittance > 0.0))
            throw InputError("mode drive rates must be positive");
        if (m.kappa_1 + m.kappa_2 > m.kappa_tot) throw InputError("kappa_1 + kappa_2 exceeds kappa_tot");
    }
    if (n_powers < 2) throw InputError("a sweep needs at least two drive powers");
    if (!(max_cooperativity > 0.0) || !(snr > 0.0) || !(decay_constants > 0.0))
        throw InputError("cooperativity, snr and decay_constants must be positive");
    if (samples_per_trace < 10) throw InputError("samples_per_trace must be >= 10");
    if (!(noise_floor >= 0.0)) throw InputError("noise_floor must be >= 0");
    if (!(transient_fraction >= 0.0 && transient_fraction < 0.5)) throw InputError("transient_fraction must lie in [0, 0.5)");
}

DampingConfig drive_config(const ExperimentPlan& plan, int mode, int site, double flux) {
    const auto k = static_cast<std::size_t>(mode), i = static_cast<std::size_t>(site);
    DampingConfig c;
    c.kappa_tot = plan.modes.at(k).kappa_tot;
    c.kappa_1 = plan.modes[k].kappa_1;
    c.kappa_2 = plan.modes[k].kappa_2;
    c.transmittance = plan.modes[k].transmittance;
    c.mech_freq = plan.mech_freq.at(i);
    c.mech_linewidth = plan.mech_linewidth.at(i);
    c.g0 = plan.g0.at(i);
    c.detuning = c.mech_freq;
    c.drive_flux = flux;
    return c;
}

std::vector<double> drive_fluxes(const ExperimentPlan& plan, int mode) {
    const auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    DampingConfig c = drive_config(plan, mode, 0, 1.0);
    c.mech_freq = c.detuning = mean(plan.mech_freq);
    c.g0 = mean(plan.g0);
    const double per_flux = damping_slope(c, 1.0);
    const double flux_max = plan.max_cooperativity * mean(plan.mech_linewidth) / per_flux;
    std::vector<double> out(static_cast<std::size_t>(plan.n_powers));
    for (int p = 0; p < plan.n_powers; ++p) out[static_cast<std::size_t>(p)] = flux_max * (p + 1) / plan.n_powers;
    return out;
}

double sweep_slope(const std::vector<double>& flux, const std::vector<double>& gamma) {
    if (flux.size() != gamma.size() || flux.size() < 2) throw InputError("sweep needs >= 2 matching points");
    const double n = static_cast<double>(flux.size());
    const double mx = std::accumulate(flux.begin(), flux.end(), 0.0) / n;
    const double my = std::accumulate(gamma.begin(), gamma.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t j = 0; j < flux.size(); ++j) {
        sxy += (flux[j] - mx) * (gamma[j] - my);
        sxx += (flux[j] - mx) * (flux[j] - mx);
    }
    if (!(sxx > 0.0)) throw InputError("drive fluxes must not all coincide");
    return std::max(0.0, sxy / sxx);
}

Eigen::MatrixXd MeasurementDataset::eta_tilde() const {
    Eigen::MatrixXd e(n_modes, n_sites);
    for (const auto& p : points) e(p.mode, p.site) = p.eta_tilde;
    return e;
}

const SweepPoint& MeasurementDataset::at(int mode, int site) const {
    const auto idx = static_cast<std::size_t>(mode) * static_cast<std::size_t>(n_sites) + static_cast<std::size_t>(site);
    if (idx >= points.size() || points[idx].mode != mode || points[idx].site != site)
        throw InputError("dataset has no sweep for this (mode, site)");
    return points[idx];
}

namespace {

RingdownTrace make_trace(const ExperimentPlan& plan, double gamma, std::uint64_t seed) {
    const double duration = plan.decay_constants / (2.0 * M_PI * gamma);
    const double dt = duration / (plan.samples_per_trace - 1);
    const double sigma = plan.noiseless ? 0.0 : 1.0 / plan.snr;
    const double floor = plan.noiseless ? 0.0 : plan.noise_floor;
    return simulate_ringdown(gamma, 1.0, sigma, duration * (1.0 + 1e-12), dt, seed, floor);
}

void finish_point(SweepPoint& pt) {
    pt.slope = sweep_slope(pt.flux, pt.gamma_fit);
    pt.eta_tilde = unnormalized_eta(pt.slope, pt.config);
}

}  // namespace

MeasurementDataset simulate_measurement(const ModeSet& truth, const ExperimentPlan& plan, std::uint64_t seed,
                                        bool keep_traces) {
    const Eigen::Index n = truth.size();
    plan.validate(n);
    if (!truth.real) throw InputError("measurement simulation needs a real lattice");
    const ParticipationMatrix eta = participation(truth);

    MeasurementDataset data;
    data.eigenfreqs = truth.eigenfreqs;
    data.seed = seed;
    data.noiseless = plan.noiseless;
    data.n_modes = data.n_sites = static_cast<int>(n);
    data.points.resize(static_cast<std::size_t>(n * n));
    const FitOptions fopt{plan.transient_fraction, 200};

    parallel_for(data.points.size(), [&](std::size_t idx) {
        SweepPoint& pt = data.points[idx];
        pt.mode = static_cast<int>(idx / static_cast<std::size_t>(n));
        pt.site = static_cast<int>(idx % static_cast<std::size_t>(n));
        pt.flux = drive_fluxes(plan, pt.mode);
        const double e = std::clamp(eta.eta(pt.mode, pt.site), 0.0, 1.0);
        for (std::size_t p = 0; p < pt.flux.size(); ++p) {
            pt.config = drive_config(plan, pt.mode, pt.site, pt.flux[p]);
            const double g = effective_damping(pt.config, e);
            const auto s = derive_seed({seed, static_cast<std::uint64_t>(pt.mode), static_cast<std::uint64_t>(pt.site),
                                        static_cast<std::uint64_t>(p)});
            RingdownTrace tr = make_trace(plan, g, s);
            pt.gamma_true.push_back(g);
            pt.gamma_fit.push_back(fit_ringdown(tr, fopt).gamma);
            pt.seeds.push_back(s);
            if (keep_traces) pt.traces.push_back(std::move(tr));
        }
        finish_point(pt);
    });
    return data;
}

void refit_dataset(MeasurementDataset& data, const FitOptions& opt) {
    parallel_for(data.points.size(), [&](std::size_t idx) {
        SweepPoint& pt = data.points[idx];
        if (pt.traces.size() != pt.flux.size()) throw InputError("dataset point is missing ringdown traces");
        pt.gamma_fit.clear();
        for (const auto& tr : pt.traces) pt.gamma_fit.push_back(fit_ringdown(tr, opt).gamma);
        finish_point(pt);
    });
}

}  // namespace optolattice
