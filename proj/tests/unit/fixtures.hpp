#pragma once

// Random lattices and measurement plans shared by the unit and acceptance suites.

#include "optolattice/experiment.hpp"
#include "optolattice/lattice.hpp"

#include <random>

namespace fixture {

using namespace optolattice;

/// 10-site chain with random couplings, parasitics and per-site parameters.
inline LatticeSpec random_chain(std::mt19937_64& rng, int n_cells = 5) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> nd(0.0, 1.0);
    LatticeSpec s;
    s.kind = TopologyKind::SshChain;
    s.n_sites = 2 * n_cells;
    s.couplings = {300e6 + 500e6 * u(rng), 300e6 + 500e6 * u(rng), 100e6 * u(rng), 40e6 * u(rng), 40e6 * u(rng)};
    for (int i = 0; i < s.n_sites; ++i) {
        SiteParams p;
        p.cavity_freq = 7.12e9 * (1.0 + 0.003 * nd(rng));
        p.mech_freq = 2.1e6 + 0.5e6 * u(rng);
        p.mech_linewidth = 4.0 + 12.0 * u(rng);
        p.g0 = 10.0 + 3.0 * u(rng);
        s.sites.push_back(p);
    }
    return s;
}

inline ExperimentPlan plan_for(const LatticeSpec& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ExperimentPlan plan;
    for (const auto& p : s.sites) {
        plan.mech_freq.push_back(p.mech_freq);
        plan.mech_linewidth.push_back(p.mech_linewidth);
        plan.g0.push_back(p.g0);
    }
    for (int k = 0; k < s.n_sites; ++k) {
        const double kt = 0.08e6 + 7e6 * u(rng);
        plan.modes.push_back({kt, 0.25 * kt, 0.25 * kt, 1e-7});
    }
    return plan;
}

}  // namespace fixture
