#include "optolattice/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace optolattice::io {

namespace fs = std::filesystem;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num(Complex v, bool real) {
    if (real) return num(v.real());
    std::string s = num(v.real());
    if (!(std::signbit(v.imag()))) s += '+';
    return s + num(v.imag()) + 'j';
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
    if (!out) throw InputError("write failed for " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
    std::string s;
    for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? "," : "") + labels[i];
    return s;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string l;
    while (std::getline(ss, l)) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
        if (!l.empty()) out.push_back(l);
    }
    return out;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InputError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw InputError("not a number: '" + s + "'");
    return v;
}

Complex parse_complex(const std::string& s) {
    if (s.empty() || s.back() != 'j') return {parse_double(s), 0.0};
    // Split at the sign introducing the imaginary part (not an exponent sign).
    for (std::size_t i = s.size() - 1; i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E')
            return {parse_double(s.substr(0, i)), parse_double(s.substr(i, s.size() - i - 1))};
    }
    throw InputError("malformed complex value: '" + s + "'");
}

Json vec(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json mat(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec(m.row(r).transpose()));
    return a;
}

Eigen::VectorXd to_vec(const Json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

}  // namespace

std::string hamiltonian_csv(const CouplingHamiltonian& h) {
    const bool real = h.is_real();
    std::string s = join_labels(h.site_labels) + "\n";
    for (Eigen::Index r = 0; r < h.size(); ++r) {
        for (Eigen::Index c = 0; c < h.size(); ++c) s += (c ? "," : "") + num(h.matrix(r, c), real);
        s += "\n";
    }
    return s;
}

Json hamiltonian_json(const CouplingHamiltonian& h) {
    Json j;
    j["site_labels"] = h.site_labels;
    j["real"] = mat(h.matrix.real());
    j["imag"] = mat(h.matrix.imag());
    return j;
}

CouplingHamiltonian hamiltonian_from_csv(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw InputError("empty Hamiltonian CSV");
    CouplingHamiltonian h;
    h.site_labels = split(lines[0]);
    const auto n = static_cast<Eigen::Index>(h.site_labels.size());
    if (static_cast<Eigen::Index>(lines.size()) != n + 1) throw InputError("Hamiltonian CSV is not square");
    h.matrix.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto cells = split(lines[static_cast<std::size_t>(r + 1)]);
        if (static_cast<Eigen::Index>(cells.size()) != n) throw InputError("Hamiltonian CSV row has wrong length");
        for (Eigen::Index c = 0; c < n; ++c) h.matrix(r, c) = parse_complex(cells[static_cast<std::size_t>(c)]);
    }
    return h;
}

std::string eigenfreqs_csv(const ModeSet& m) {
    std::string s = "mode,eigenfreq\n";
    for (Eigen::Index k = 0; k < m.size(); ++k) s += std::to_string(k + 1) + "," + num(m.eigenfreqs(k)) + "\n";
    return s;
}

std::string modeshapes_csv(const ModeSet& m, const std::vector<std::string>& labels) {
    std::string s = "mode,eigenfreq," + join_labels(labels) + "\n";
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        s += std::to_string(k + 1) + "," + num(m.eigenfreqs(k));
        for (Eigen::Index i = 0; i < m.modeshapes.cols(); ++i) s += "," + num(m.modeshapes(k, i), m.real);
        s += "\n";
    }
    return s;
}

Json modes_json(const ModeSet& m, const std::vector<std::string>& labels) {
    Json j;
    j["site_labels"] = labels;
    j["eigenfreqs"] = vec(m.eigenfreqs);
    j["real"] = m.real;
    j["modeshapes_real"] = mat(m.modeshapes.real());
    if (!m.real) j["modeshapes_imag"] = mat(m.modeshapes.imag());
    return j;
}

std::string participation_csv(const ParticipationMatrix& p, const std::vector<std::string>& labels) {
    std::string s = "mode," + join_labels(labels) + "\n";
    for (Eigen::Index k = 0; k < p.eta.rows(); ++k) {
        s += std::to_string(k + 1);
        for (Eigen::Index i = 0; i < p.eta.cols(); ++i) s += "," + num(p.eta(k, i));
        s += "\n";
    }
    return s;
}

std::string curve_csv(const BulkCurve& c, const std::vector<double>& offset) {
    if (!offset.empty() && offset.size() != c.k.size()) throw InputError("offset must match the curve length");
    std::string s = "k,re_rho,im_rho,e_minus,e_plus\n";
    for (std::size_t j = 0; j < c.k.size(); ++j) {
        const double o = offset.empty() ? 0.0 : offset[j];
        const double a = std::abs(c.rho[j]);
        s += num(c.k[j]) + "," + num(c.rho[j].real()) + "," + num(c.rho[j].imag()) + "," + num(o - a) + "," +
             num(o + a) + "\n";
    }
    return s;
}

Json prediction_json(const EdgePrediction& p) {
    Json j;
    j["defined"] = p.defined;
    j["winding"] = p.winding;
    j["zak_phase"] = p.zak;
    j["k_min"] = p.k_min;
    j["k_max"] = p.k_max;
    j["gap_min"] = p.gap_min;
    j["slope_at_kmin"] = p.slope_at_kmin;
    j["slope_bound"] = p.slope_bound;
    j["edge_states_exist"] = p.edge_states_exist;
    j["marginal"] = p.marginal;
    return j;
}

std::string ensemble_csv(const EnsembleResult& e) {
    std::string s = "sigma,mean,p5,p15,p85,p95\n";
    for (const auto& st : e.stats)
        s += num(st.sigma) + "," + num(st.mean) + "," + num(st.p5) + "," + num(st.p15) + "," + num(st.p85) + "," +
             num(st.p95) + "\n";
    return s;
}

std::string ensemble_spectrum_csv(const EnsembleResult& e) {
    std::string s = "sigma";
    const Eigen::Index n = e.stats.empty() ? 0 : e.stats.front().freq_mean.size();
    for (Eigen::Index k = 1; k <= n; ++k) s += ",mean_" + std::to_string(k) + ",std_" + std::to_string(k);
    s += "\n";
    for (const auto& st : e.stats) {
        s += num(st.sigma);
        for (Eigen::Index k = 0; k < n; ++k) s += "," + num(st.freq_mean(k)) + "," + num(st.freq_std(k));
        s += "\n";
    }
    return s;
}

Json ensemble_json(const EnsembleResult& e) {
    Json j;
    j["master_seed"] = e.master_seed;
    j["samples_per_point"] = e.samples_per_point;
    j["seed_rule"] = "derive_seed(master_seed, sigma_index, sample_index)";
    Json pts = Json::array();
    for (std::size_t s = 0; s < e.stats.size(); ++s) {
        const auto& st = e.stats[s];
        Json p;
        p["sigma_index"] = s;
        p["sigma"] = st.sigma;
        p["mean"] = st.mean;
        p["stddev"] = st.stddev;
        p["p5"] = st.p5;
        p["p15"] = st.p15;
        p["p85"] = st.p85;
        p["p95"] = st.p95;
        p["failures"] = st.failures;
        p["rank_overlap"] = st.rank_overlap;
        pts.push_back(p);
    }
    j["points"] = pts;
    return j;
}

Json recovery_json(const RecoveryResult& r) {
    Json j;
    j["sinkhorn_iterations"] = r.iterations_used;
    j["sinkhorn_residual"] = r.sinkhorn_residual;
    j["orthogonality_defect"] = r.orthogonality_defect;
    j["branch_margin"] = r.branch_margin;
    j["flipped_row"] = r.flipped_row < 0 ? Json(nullptr) : Json(r.flipped_row + 1);
    Json fl = Json::array();
    for (const auto& [k, i] : r.floored) fl.push_back({k + 1, i + 1});
    j["floored_entries"] = fl;
    j["eta_hat"] = mat(r.eta_hat.eta);
    j["u_hat"] = mat(r.u_hat);
    return j;
}

void save_dataset(const std::string& dir, const MeasurementDataset& d,
                  const std::optional<CouplingHamiltonian>& truth) {
    fs::create_directories(fs::path(dir) / "traces");
    Json m;
    m["seed"] = d.seed;
    m["noiseless"] = d.noiseless;
    m["n_modes"] = d.n_modes;
    m["n_sites"] = d.n_sites;
    m["eigenfreqs"] = vec(d.eigenfreqs);
    m["trace_seed_rule"] = "derive_seed(seed, mode_index, site_index, power_index)";
    Json pts = Json::array();
    for (const auto& p : d.points) {
        if (p.traces.size() != p.flux.size()) throw InputError("save_dataset needs the ringdown traces");
        char name[64];
        std::snprintf(name, sizeof name, "k%02d_i%02d.csv", p.mode + 1, p.site + 1);
        Json jp;
        jp["mode"] = p.mode + 1;
        jp["site"] = p.site + 1;
        jp["file"] = std::string("traces/") + name;
        jp["drive_flux"] = p.flux;
        jp["seeds"] = p.seeds;
        jp["gamma_true"] = p.gamma_true;
        jp["detuning"] = p.config.detuning;
        jp["kappa_tot"] = p.config.kappa_tot;
        jp["kappa_1"] = p.config.kappa_1;
        jp["kappa_2"] = p.config.kappa_2;
        jp["transmittance"] = p.config.transmittance;
        jp["mech_freq"] = p.config.mech_freq;
        jp["mech_linewidth"] = p.config.mech_linewidth;
        pts.push_back(jp);

        std::string csv;
        for (std::size_t q = 0; q < p.traces.size(); ++q)
            csv += std::string(q ? "," : "") + "t" + std::to_string(q + 1) + ",p" + std::to_string(q + 1);
        csv += "\n";
        const std::size_t rows = p.traces.front().times.size();
        for (const auto& tr : p.traces)
            if (tr.times.size() != rows) throw InputError("traces of one sweep must have equal length");
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t q = 0; q < p.traces.size(); ++q)
                csv += std::string(q ? "," : "") + num(p.traces[q].times[r]) + "," + num(p.traces[q].powers[r]);
            csv += "\n";
        }
        write_text((fs::path(dir) / "traces" / name).string(), csv);
    }
    m["points"] = pts;
    write_text((fs::path(dir) / "manifest.json").string(), m.dump(2) + "\n");

    std::string eta = "mode";
    for (int i = 1; i <= d.n_sites; ++i) eta += ",site" + std::to_string(i);
    eta += "\n";
    const Eigen::MatrixXd e = d.eta_tilde();
    for (Eigen::Index k = 0; k < e.rows(); ++k) {
        eta += std::to_string(k + 1);
        for (Eigen::Index i = 0; i < e.cols(); ++i) eta += "," + num(e(k, i));
        eta += "\n";
    }
    write_text((fs::path(dir) / "eta_tilde.csv").string(), eta);
    if (truth) write_text((fs::path(dir) / "truth.csv").string(), hamiltonian_csv(*truth));
}

LoadedDataset load_dataset(const std::string& dir) {
    LoadedDataset out;
    Json m;
    try {
        m = Json::parse(read_text((fs::path(dir) / "manifest.json").string()));
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed dataset manifest: ") + e.what());
    }
    try {
        MeasurementDataset& d = out.data;
        d.seed = m.at("seed").get<std::uint64_t>();
        d.noiseless = m.at("noiseless").get<bool>();
        d.n_modes = m.at("n_modes").get<int>();
        d.n_sites = m.at("n_sites").get<int>();
        d.eigenfreqs = to_vec(m.at("eigenfreqs"));
        for (const auto& jp : m.at("points")) {
            SweepPoint p;
            p.mode = jp.at("mode").get<int>() - 1;
            p.site = jp.at("site").get<int>() - 1;
            p.flux = jp.at("drive_flux").get<std::vector<double>>();
            p.seeds = jp.at("seeds").get<std::vector<std::uint64_t>>();
            p.gamma_true = jp.at("gamma_true").get<std::vector<double>>();
            p.config.detuning = jp.at("detuning").get<double>();
            p.config.kappa_tot = jp.at("kappa_tot").get<double>();
            p.config.kappa_1 = jp.at("kappa_1").get<double>();
            p.config.kappa_2 = jp.at("kappa_2").get<double>();
            p.config.transmittance = jp.at("transmittance").get<double>();
            p.config.mech_freq = jp.at("mech_freq").get<double>();
            p.config.mech_linewidth = jp.at("mech_linewidth").get<double>();
            p.config.drive_flux = p.flux.empty() ? 0.0 : p.flux.back();
            const auto lines = lines_of(read_text((fs::path(dir) / jp.at("file").get<std::string>()).string()));
            const std::size_t nq = p.flux.size();
            p.traces.resize(nq);
            for (std::size_t r = 1; r < lines.size(); ++r) {
                const auto cells = split(lines[r]);
                if (cells.size() != 2 * nq) throw InputError("trace row has wrong length in " + jp.at("file").get<std::string>());
                for (std::size_t q = 0; q < nq; ++q) {
                    p.traces[q].times.push_back(parse_double(cells[2 * q]));
                    p.traces[q].powers.push_back(parse_double(cells[2 * q + 1]));
                }
            }
            for (std::size_t q = 0; q < nq && q < p.gamma_true.size(); ++q) p.traces[q].true_gamma = p.gamma_true[q];
            d.points.push_back(std::move(p));
        }
        if (static_cast<int>(d.points.size()) != d.n_modes * d.n_sites)
            throw InputError("dataset does not cover every (mode, site) pair");
        for (std::size_t idx = 0; idx < d.points.size(); ++idx) {
            const auto& p = d.points[idx];
            if (static_cast<std::size_t>(p.mode * d.n_sites + p.site) != idx)
                throw InputError("dataset points are not in mode-major order");
        }
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed dataset manifest: ") + e.what());
    }
    const fs::path truth = fs::path(dir) / "truth.csv";
    if (fs::exists(truth)) out.truth = hamiltonian_from_csv(read_text(truth.string()));
    return out;
}

WireCurve wire_from_csv(const std::string& text) {
    WireCurve w;
    const auto lines = lines_of(text);
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto cells = split(lines[r]);
        if (cells.size() != 3) throw InputError("wire CSV needs x,y,z per row (line " + std::to_string(r + 1) + ")");
        try {
            w.points.emplace_back(parse_double(cells[0]), parse_double(cells[1]), parse_double(cells[2]));
        } catch (const InputError&) {
            if (r == 0) continue;
            throw InputError("wire CSV line " + std::to_string(r + 1) + " is not numeric");
        }
    }
    w.validate();
    return w;
}

}  // namespace optolattice::io
