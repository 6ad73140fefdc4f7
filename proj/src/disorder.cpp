#include "optolattice/disorder.hpp"

#include "optolattice/parallel.hpp"
#include "optolattice/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optolattice {

double hybridization_factor(const ParticipationMatrix& p, int n_cells) {
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(n_cells);
    if (n_cells < 1 || p.eta.rows() != n || p.eta.cols() != n)
        throw InputError("hybridization_factor expects a 2N x 2N participation matrix");
    double z = 0.0;
    for (Eigen::Index k : {n_cells - 1, n_cells}) {
        const double a = p.eta(k, 0), b = p.eta(k, n - 1);
        const double hi = std::max(a, b);
        z += hi > 0.0 ? std::min(a, b) / hi : 0.0;
    }
    return 0.5 * z;
}

double percentile_sorted(const std::vector<double>& sorted, double pct) {
    if (sorted.empty()) throw InputError("percentile of empty sample");
    const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double f = pos - static_cast<double>(lo);
    return sorted[lo] + f * (sorted[hi] - sorted[lo]);
}

EnsembleResult run_ensemble(const LatticeSpec& spec, const std::vector<double>& sigma_grid, int samples,
                            std::uint64_t master_seed, unsigned threads) {
    if (spec.kind != TopologyKind::SshChain) throw InputError("disorder ensembles are defined for SSH chains");
    if (samples < 1) throw InputError("samples must be positive");
    if (spec.n_sites % 2 != 0) throw InputError("the hybridization factor needs complete unit cells");
    const CouplingHamiltonian h0 = build_hamiltonian(spec);
    const int n_cells = spec.n_sites / 2;
    const Eigen::Index n = h0.size();

    EnsembleResult out;
    out.sigma_grid = sigma_grid;
    out.samples_per_point = samples;
    out.master_seed = master_seed;
    for (std::size_t s = 0; s < sigma_grid.size(); ++s) {
        const double sigma = sigma_grid[s];
        if (!(sigma >= 0.0)) throw InputError("sigma values must be >= 0");
        std::vector<double> zeta(static_cast<std::size_t>(samples), 0.0);
        Eigen::MatrixXd freqs(samples, n);
        std::vector<char> failed(static_cast<std::size_t>(samples), 0);
        parallel_for(
            static_cast<std::size_t>(samples),
            [&](std::size_t j) {
                const auto seed = derive_seed({master_seed, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(j)});
                try {
                    const ModeSet m = diagonalize(apply_disorder(h0, sigma, seed));
                    zeta[j] = hybridization_factor(participation(m), n_cells);
                    freqs.row(static_cast<Eigen::Index>(j)) = m.eigenfreqs.transpose();
                } catch (const NumericalError&) {
                    failed[j] = 1;
                }
            },
            threads);

        SigmaStats st;
        st.sigma = sigma;
        std::vector<double> ok;
        std::vector<Eigen::Index> good_rows;
        for (std::size_t j = 0; j < zeta.size(); ++j) {
            if (failed[j]) {
                ++st.failures;
                continue;
            }
            ok.push_back(zeta[j]);
            good_rows.push_back(static_cast<Eigen::Index>(j));
        }
        if (st.failures > samples / 1000) {
            std::ostringstream os;
            os << st.failures << " of " << samples << " samples failed at sigma " << sigma;
            throw NumericalError(os.str());
        }
        std::sort(ok.begin(), ok.end());
        double sum = 0.0, sq = 0.0;
        for (double z : ok) sum += z;
        st.mean = sum / static_cast<double>(ok.size());
        for (double z : ok) sq += (z - st.mean) * (z - st.mean);
        st.stddev = ok.size() > 1 ? std::sqrt(sq / static_cast<double>(ok.size() - 1)) : 0.0;
        st.p5 = percentile_sorted(ok, 5);
        st.p15 = percentile_sorted(ok, 15);
        st.p85 = percentile_sorted(ok, 85);
        st.p95 = percentile_sorted(ok, 95);

        Eigen::MatrixXd f(static_cast<Eigen::Index>(good_rows.size()), n);
        for (std::size_t r = 0; r < good_rows.size(); ++r) f.row(static_cast<Eigen::Index>(r)) = freqs.row(good_rows[r]);
        st.freq_mean = f.colwise().mean().transpose();
        if (f.rows() > 1) {
            const Eigen::MatrixXd c = f.rowwise() - st.freq_mean.transpose();
            st.freq_std = (c.array().square().colwise().sum() / static_cast<double>(f.rows() - 1)).sqrt().transpose();
        } else {
            st.freq_std = Eigen::VectorXd::Zero(n);
        }
        // Rank of the mid-gap pair is ambiguous once their spread reaches the neighbouring bulk modes.
        const Eigen::Index a = n_cells - 1, b = n_cells;
        if (a >= 1 && b + 1 < n) {
            const double gap_lo = st.freq_mean(a) - st.freq_mean(a - 1);
            const double gap_hi = st.freq_mean(b + 1) - st.freq_mean(b);
            st.rank_overlap = 2.0 * std::max(st.freq_std(a), st.freq_std(b)) > std::min(gap_lo, gap_hi);
        }
        st.sorted_zeta = std::move(ok);
        out.stats.push_back(std::move(st));
    }
    return out;
}

SigmaInterval invert_zeta(double zeta, const EnsembleResult& ens, double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw InputError("confidence must lie in (0, 1)");
    SigmaInterval out;
    const std::size_t m = ens.stats.size();
    if (m == 0) {
        out.diagnostic = "empty ensemble";
        return out;
    }
    const double lo_pct = 50.0 * (1.0 - confidence), hi_pct = 50.0 * (1.0 + confidence);
    std::vector<double> lo(m), hi(m);
    std::vector<bool> in(m);
    for (std::size_t s = 0; s < m; ++s) {
        lo[s] = percentile_sorted(ens.stats[s].sorted_zeta, lo_pct);
        hi[s] = percentile_sorted(ens.stats[s].sorted_zeta, hi_pct);
        // zeta = 1 must match the clean chain, whose computed zeta can fall short of 1 by rounding
        in[s] = lo[s] - 1e-9 <= zeta && zeta <= hi[s] + 1e-9;
    }
    std::size_t first = m, last = m;
    for (std::size_t s = 0; s < m; ++s)
        if (in[s]) {
            if (first == m) first = s;
            last = s;
        }
    if (first == m) {
        std::ostringstream os;
        os << "zeta " << zeta << " lies outside every " << confidence * 100 << "% band of the ensemble";
        out.diagnostic = os.str();
        return out;
    }
    const auto& g = ens.sigma_grid;
    auto cross = [&](double x0, double y0, double x1, double y1) {
        if (y1 == y0) return 0.5 * (x0 + x1);
        return x0 + (zeta - y0) * (x1 - x0) / (y1 - y0);
    };
    out.empty = false;
    // Entering the band: the upper percentile falls through zeta, or the lower rises past it.
    if (first == 0) {
        out.lo = g[0];
    } else if (hi[first - 1] < zeta) {
        out.lo = cross(g[first - 1], hi[first - 1], g[first], hi[first]);
    } else {
        out.lo = cross(g[first - 1], lo[first - 1], g[first], lo[first]);
    }
    if (last + 1 == m) {
        out.hi = g[last];
        out.diagnostic = "band still contains zeta at the largest sigma of the grid";
    } else if (lo[last + 1] > zeta) {
        out.hi = cross(g[last], lo[last], g[last + 1], lo[last + 1]);
    } else {
        out.hi = cross(g[last], hi[last], g[last + 1], hi[last + 1]);
    }
    for (std::size_t s = first; s <= last; ++s)
        if (!in[s]) out.diagnostic = "band membership is not contiguous over the grid";
    return out;
}

}  // namespace optolattice
