// optolattice: command-line front end.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include "optolattice/circuit.hpp"
#include "optolattice/config.hpp"
#include "optolattice/disorder.hpp"
#include "optolattice/experiment.hpp"
#include "optolattice/flake.hpp"
#include "optolattice/io.hpp"
#include "optolattice/lattice.hpp"
#include "optolattice/measure.hpp"
#include "optolattice/random.hpp"
#include "optolattice/topology.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace optolattice;
using io::Json;

namespace {

/// Tracks everything written so a failed run leaves nothing behind.
class Output {
public:
    Output(std::string dir, std::string format) : dir_(std::move(dir)), format_(std::move(format)) {}

    void open() {
        if (!fs::exists(dir_)) {
            fs::create_directories(dir_);
            created_dir_ = true;
        }
    }

    void write(const std::string& name, const std::string& text) {
        const fs::path p = fs::path(dir_) / name;
        written_.push_back(p);
        io::write_text(p.string(), text);
    }

    void json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    /// Writes a table as CSV or, with --format json, as a JSON array of row objects.
    void table(const std::string& stem, const std::string& csv) {
        if (format_ == "csv") {
            write(stem + ".csv", csv);
            return;
        }
        std::stringstream ss(csv);
        std::string line;
        std::getline(ss, line);
        std::vector<std::string> header = split(line);
        Json rows = Json::array();
        while (std::getline(ss, line)) {
            if (line.empty()) continue;
            const auto cells = split(line);
            Json row = Json::object();
            for (std::size_t c = 0; c < header.size() && c < cells.size(); ++c) {
                char* end = nullptr;
                const double v = std::strtod(cells[c].c_str(), &end);
                if (!cells[c].empty() && *end == '\0')
                    row[header[c]] = v;
                else
                    row[header[c]] = cells[c];
            }
            rows.push_back(row);
        }
        json(stem + ".json", rows);
    }

    /// A directory owned by this run, removed wholesale on failure.
    std::string subdir(const std::string& name) {
        const fs::path p = fs::path(dir_) / name;
        if (!fs::exists(p)) owned_dirs_.push_back(p);
        return p.string();
    }

    void cleanup() noexcept {
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
        for (const auto& d : owned_dirs_) fs::remove_all(d, ec);
        if (created_dir_) fs::remove_all(dir_, ec);
    }

    [[nodiscard]] const std::string& dir() const { return dir_; }

private:
    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(item);
        return out;
    }

    std::string dir_;
    std::string format_;
    bool created_dir_ = false;
    std::vector<fs::path> written_;
    std::vector<fs::path> owned_dirs_;
};

struct Options {
    std::string config;
    std::string out = "out";
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string dataset;
    std::string wire_a, wire_b;
};

const LatticeSpec& need_lattice(const RunConfig& cfg) {
    if (!cfg.lattice) throw ConfigError(cfg.source, 0, "this subcommand needs a [lattice] section");
    return *cfg.lattice;
}

std::uint64_t run_seed(const RunConfig& cfg, const Options& o) { return o.seed_given ? o.seed : cfg.seed; }

double mean_cavity(const LatticeSpec& spec) {
    double s = 0.0;
    for (const auto& site : spec.sites) s += site.cavity_freq;
    return s / static_cast<double>(spec.sites.size());
}

// ---------------------------------------------------------------------------

void cmd_spectrum(const RunConfig& cfg, Output& out) {
    const LatticeSpec& spec = need_lattice(cfg);
    const CouplingHamiltonian h = build_hamiltonian(spec);
    const ModeSet m = diagonalize(h);
    out.open();
    out.table("hamiltonian", io::hamiltonian_csv(h));
    out.table("eigenfreqs", io::eigenfreqs_csv(m));
    out.table("modeshapes", io::modeshapes_csv(m, h.site_labels));
    out.table("participation", io::participation_csv(participation(m), h.site_labels));

    Json ann;
    ann["kind"] = to_string(spec.kind);
    ann["n_sites"] = spec.n_sites;
    if (spec.kind == TopologyKind::SshChain && spec.n_sites >= 2) {
        const double wc = mean_cavity(spec);
        const Passbands pb = passband_edges(wc, spec.couplings.J, spec.couplings.Jp);
        ann["lpb"] = {pb.lpb[0], pb.lpb[1]};
        ann["upb"] = {pb.upb[0], pb.upb[1]};
        ann["in_gap_modes"] = count_in_gap_states(h, std::abs(spec.couplings.J - spec.couplings.Jp));
    }
    if (spec.kind == TopologyKind::HoneycombFlake) {
        const auto labels = flake::edge_site_labels();
        ann["edge_sites"] = std::vector<int>(labels.begin(), labels.end());
        const auto edge = flake::edge_sites();
        const std::vector<int> edge_v(edge.begin(), edge.end());
        Json w = Json::array();
        const ParticipationMatrix p = participation(m);
        for (Eigen::Index k = 0; k < m.size(); ++k) w.push_back(site_weight(p, k, edge_v));
        ann["edge_weight_per_mode"] = w;
    }
    out.json("annotations.json", ann);
    for (Eigen::Index k = 0; k < m.size(); ++k) std::printf("mode %ld %s\n", static_cast<long>(k + 1), io::num(m.eigenfreqs(k)).c_str());
}

void cmd_topology(const RunConfig& cfg, Output& out) {
    const LatticeSpec& spec = need_lattice(cfg);
    const Couplings& c = spec.couplings;
    Json report;
    report["kind"] = to_string(spec.kind);
    if (spec.kind == TopologyKind::SshChain) {
        if (spec.n_sites % 2 != 0) throw InputError("topology needs complete unit cells");
        const int n_cells = spec.n_sites / 2;
        const BulkCurve curve = bulk_curve_ssh(c, cfg.topology.bz_points);
        std::vector<double> offset;
        for (double k : curve.k) offset.push_back(c.J2 * std::cos(k));
        const EdgePrediction p = edge_prediction_finite(c, n_cells);
        out.open();
        out.table("bulk_curve", io::curve_csv(curve, offset));
        report["n_cells"] = n_cells;
        report["prediction"] = io::prediction_json(p);
        report["in_gap_modes"] = count_in_gap_states(build_hamiltonian(spec), p.gap_min);
        std::printf("winding %d zak %s edge_states %s\n", p.winding, io::num(p.zak).c_str(),
                    p.edge_states_exist ? "yes" : "no");
    } else {
        const GrapheneCouplings g = strained_graphene(c.J, c.Jp);
        const GapScan scan = graphene_min_gap(g, cfg.topology.graphene_grid);
        report["graphene_min_gap"] = scan.min_gap;
        report["graphene_min_gap_at"] = {scan.theta1, scan.theta2};
        report["graphene_grid"] = scan.grid;
        const int width = cfg.topology.ribbon_width;
        const int nk = cfg.topology.k_points;
        std::string csv = "orientation,k_par,winding,zak,slope_at_kmin,edge_states_exist,midgap_states\n";
        for (auto o : {RibbonOrientation::ZigZag, RibbonOrientation::Armchair, RibbonOrientation::TiltedZigZag,
                       RibbonOrientation::TiltedArmchair}) {
            for (int j = 0; j < nk; ++j) {
                const double kp = -M_PI + 2.0 * M_PI * j / nk;
                const EdgePrediction p = ribbon_edge_prediction(o, kp, width, c);
                const int mid = count_midgap_states(o, width, kp, c, 1e-3 * std::max(c.J, c.Jp));
                csv += to_string(o) + "," + io::num(kp) + "," + std::to_string(p.winding) + "," + io::num(p.zak) + "," +
                       io::num(p.slope_at_kmin) + "," + (p.defined ? (p.edge_states_exist ? "1" : "0") : "nan") + "," +
                       std::to_string(mid) + "\n";
            }
        }
        out.open();
        out.table("ribbons", csv);
        report["ribbon_width"] = width;
        report["k_points"] = nk;
        std::printf("graphene min gap %s\n", io::num(scan.min_gap).c_str());
    }
    out.json("topology.json", report);
}

CouplingHamiltonian ground_truth(const RunConfig& cfg, std::uint64_t seed) {
    const CouplingHamiltonian design = build_hamiltonian(need_lattice(cfg));
    return apply_disorder(design, cfg.truth_disorder, derive_seed({seed, 0x7472757468ULL}));
}

void cmd_measure_sim(const RunConfig& cfg, Output& out, const Options& o) {
    if (!cfg.measurement) throw ConfigError(cfg.source, 0, "measure-sim needs a [measurement] section");
    const std::uint64_t seed = run_seed(cfg, o);
    const CouplingHamiltonian truth = ground_truth(cfg, seed);
    const MeasurementDataset data = simulate_measurement(diagonalize(truth), *cfg.measurement, seed, true);
    out.open();
    const std::string dir = out.subdir("dataset");
    io::save_dataset(dir, data, truth);
    std::printf("dataset %s (%d modes x %d sites, %d powers)\n", dir.c_str(), data.n_modes, data.n_sites,
                cfg.measurement->n_powers);
}

double frobenius_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

void cmd_recover(const RunConfig& cfg, Output& out, const Options& o) {
    const LatticeSpec& spec = need_lattice(cfg);
    const std::string dir = o.dataset.empty() ? (fs::path(o.out) / "dataset").string() : o.dataset;
    io::LoadedDataset loaded = io::load_dataset(dir);
    if (loaded.data.n_sites != spec.n_sites) throw InputError("dataset size does not match the lattice");
    FitOptions fopt;
    if (cfg.measurement) fopt.transient_fraction = cfg.measurement->transient_fraction;
    refit_dataset(loaded.data, fopt);

    const ModeSet reference = diagonalize(build_hamiltonian(spec));
    const Eigen::MatrixXd eta_tilde = loaded.data.eta_tilde();
    const RecoveryResult r =
        recover_hamiltonian(eta_tilde, loaded.data.eigenfreqs, reference, {cfg.recovery.tol, cfg.recovery.max_iter});

    Json report = io::recovery_json(r);
    const Eigen::VectorXd gbar = relative_g0(eta_tilde, r.eta_hat.eta);
    report["relative_g0"] = std::vector<double>(gbar.data(), gbar.data() + gbar.size());
    if (cfg.recovery.anchor_site >= 0) {
        const Eigen::VectorXd g = anchor_g0(gbar, cfg.recovery.anchor_site, cfg.recovery.anchor_g0);
        report["g0"] = std::vector<double>(g.data(), g.data() + g.size());
    }
    bool failed = false;
    if (loaded.truth) {
        const Eigen::MatrixXd ht = loaded.truth->real(), hh = r.h_hat.real();
        const double rel = frobenius_rel(hh, ht);
        double nn = 0.0, diag = 0.0;
        for (Eigen::Index i = 0; i < ht.rows(); ++i) {
            diag = std::max(diag, std::abs(hh(i, i) - ht(i, i)) / ht(i, i));
            if (i + 1 < ht.rows()) nn = std::max(nn, std::abs(hh(i, i + 1) - ht(i, i + 1)) / std::abs(ht(i, i + 1)));
        }
        Json cmp;
        cmp["relative_frobenius_error"] = rel;
        cmp["max_nearest_neighbor_rel_error"] = nn;
        cmp["max_diagonal_rel_error"] = diag;
        if (loaded.data.noiseless) {
            cmp["noiseless_check_tolerance"] = 1e-6;
            cmp["noiseless_check_passed"] = rel < 1e-6;
            failed = !(rel < 1e-6);
        }
        report["ground_truth_comparison"] = cmp;
        std::printf("relative Frobenius error %s\n", io::num(rel).c_str());
    }
    out.open();
    out.table("h_hat", io::hamiltonian_csv(r.h_hat));
    out.table("h_hat_rotating", io::hamiltonian_csv(rotating_frame(r.h_hat)));
    out.json("recovery_report.json", report);
    if (failed) throw NumericalError("noiseless reconstruction missed the 1e-6 tolerance");
}

void cmd_disorder(const RunConfig& cfg, Output& out, const Options& o) {
    const LatticeSpec& spec = need_lattice(cfg);
    if (cfg.disorder.sigma_grid.empty()) throw ConfigError(cfg.source, 0, "[disorder] sigma_grid is required");
    if (cfg.disorder.samples < 100)
        std::fprintf(stderr, "warning: fewer than 100 samples per sigma, percentiles are unreliable\n");
    const std::uint64_t seed = run_seed(cfg, o);
    const EnsembleResult e = run_ensemble(spec, cfg.disorder.sigma_grid, cfg.disorder.samples, seed);
    out.open();
    out.table("ensemble", io::ensemble_csv(e));
    out.table("ensemble_spectrum", io::ensemble_spectrum_csv(e));
    Json manifest = io::ensemble_json(e);
    if (cfg.disorder.zeta) {
        const SigmaInterval iv = invert_zeta(*cfg.disorder.zeta, e, cfg.disorder.confidence);
        Json inv;
        inv["zeta"] = *cfg.disorder.zeta;
        inv["confidence"] = cfg.disorder.confidence;
        inv["empty"] = iv.empty;
        if (!iv.empty) inv["sigma_interval"] = {iv.lo, iv.hi};
        inv["diagnostic"] = iv.diagnostic;
        manifest["inversion"] = inv;
        if (iv.empty)
            std::printf("zeta %s: empty interval (%s)\n", io::num(*cfg.disorder.zeta).c_str(), iv.diagnostic.c_str());
        else
            std::printf("zeta %s: sigma in [%s, %s]\n", io::num(*cfg.disorder.zeta).c_str(), io::num(iv.lo).c_str(),
                        io::num(iv.hi).c_str());
    }
    out.json("manifest.json", manifest);
}

void cmd_circuit(const RunConfig& cfg, Output& out, const Options& o) {
    if (!cfg.circuit) throw ConfigError(cfg.source, 0, "circuit needs a [circuit] section");
    const CircuitSettings& c = *cfg.circuit;
    const CircuitCell cell{c.L, c.C};
    Json r;
    r["f_c"] = cell.f_c();
    const auto d = dimer_eigenfrequencies(cell, c.M);
    r["dimer_M"] = {d.first, d.second};
    r["J_from_M"] = coupling_rate(cell, c.M);
    r["Jp_from_Mp"] = coupling_rate(cell, c.Mp);
    const Passbands pb = passband_edges(cell.f_c(), coupling_rate(cell, c.M), coupling_rate(cell, c.Mp));
    r["passband_lpb"] = {pb.lpb[0], pb.lpb[1]};
    r["passband_upb"] = {pb.upb[0], pb.upb[1]};
    double lo_min = 1e300, lo_max = 0.0, hi_min = 1e300, hi_max = 0.0;
    for (int j = 0; j <= 2048; ++j) {
        const auto b = infinite_chain_band(-M_PI + 2.0 * M_PI * j / 2048, cell, c.M, c.Mp);
        lo_min = std::min(lo_min, b.first);
        lo_max = std::max(lo_max, b.first);
        hi_min = std::min(hi_min, b.second);
        hi_max = std::max(hi_max, b.second);
    }
    r["chain_band_lower"] = {lo_min, lo_max};
    r["chain_band_upper"] = {hi_min, hi_max};
    if (c.loop_radius > 0.0 && c.loop_separation > 0.0) {
        const WireCurve a = circular_loop(c.loop_radius, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(), c.n_segments);
        const WireCurve b =
            circular_loop(c.loop_radius, Eigen::Vector3d(0, 0, c.loop_separation), Eigen::Vector3d::UnitZ(), c.n_segments);
        r["coaxial_loops_mutual_inductance"] = mutual_inductance_neumann(a, b, c.n_segments);
    }
    if (!o.wire_a.empty() || !o.wire_b.empty()) {
        if (o.wire_a.empty() || o.wire_b.empty()) throw InputError("--wire-a and --wire-b go together");
        const WireCurve a = io::wire_from_csv(io::read_text(o.wire_a));
        const WireCurve b = io::wire_from_csv(io::read_text(o.wire_b));
        r["wire_mutual_inductance"] = mutual_inductance_neumann(a, b, c.n_segments);
    }
    if (!c.drum_radius.empty()) {
        Json f = Json::array();
        for (double rad : c.drum_radius) f.push_back(drumhead_frequency(rad, c.stress, c.density));
        r["drumhead_frequencies"] = f;
    }
    out.open();
    out.json("circuit_report.json", r);
    std::printf("f_c %s\n", io::num(cell.f_c()).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optomechanical lattice analysis"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "master seed (overrides [run] seed)");
        sub->add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    };
    auto* spectrum = app.add_subcommand("spectrum", "eigenfrequencies and modeshapes");
    auto* topology = app.add_subcommand("topology", "bulk invariants and edge-state predictions");
    auto* measure = app.add_subcommand("measure-sim", "synthetic power-sweep dataset");
    auto* recover = app.add_subcommand("recover", "Hamiltonian reconstruction from a dataset");
    auto* disorder = app.add_subcommand("disorder", "disorder ensemble and zeta inversion");
    auto* circuit = app.add_subcommand("circuit", "lumped-circuit parameter report");
    for (auto* s : {spectrum, topology, measure, recover, disorder, circuit}) add_common(s);
    recover->add_option("--dataset", o.dataset, "dataset directory (default <out>/dataset)");
    circuit->add_option("--wire-a", o.wire_a, "CSV polyline of the first wire");
    circuit->add_option("--wire-b", o.wire_b, "CSV polyline of the second wire");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    for (auto* s : {spectrum, topology, measure, recover, disorder, circuit})
        if (s->count("--seed")) o.seed_given = true;

    Output out(o.out, o.format);
    try {
        const RunConfig cfg = load_run_config(o.config);
        if (*spectrum) cmd_spectrum(cfg, out);
        if (*topology) cmd_topology(cfg, out);
        if (*measure) cmd_measure_sim(cfg, out, o);
        if (*recover) cmd_recover(cfg, out, o);
        if (*disorder) cmd_disorder(cfg, out, o);
        if (*circuit) cmd_circuit(cfg, out, o);
    } catch (const NumericalError& e) {
        out.cleanup();
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const InputError& e) {
        out.cleanup();
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const fs::filesystem_error& e) {
        out.cleanup();
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        out.cleanup();
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
