#include "optolattice/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace optolattice {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_error(const std::string& source, int line, const std::string& what) {
    std::ostringstream os;
    os << source;
    if (line > 0) os << ":" << line;
    os << ": " << what;
    return os.str();
}

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"run", {"seed"}},
        {"lattice", {"kind", "n_sites", "cavity_freq", "orientation", "k_par"}},
        {"couplings", {"J", "Jp", "J2", "J3", "J3p"}},
        {"sites", {"cavity_freq", "mech_freq", "mech_linewidth", "g0"}},
        {"measurement",
         {"kappa_tot", "kappa_1", "kappa_2", "transmittance", "n_powers", "max_cooperativity", "snr",
          "samples_per_trace", "decay_constants", "noise_floor", "transient_fraction", "noiseless",
          "truth_disorder"}},
        {"recovery", {"tol", "max_iter", "anchor_site", "anchor_g0"}},
        {"topology", {"bz_points", "ribbon_width", "k_points", "graphene_grid"}},
        {"disorder", {"sigma_grid", "samples", "zeta", "confidence"}},
        {"circuit",
         {"L", "C", "M", "Mp", "loop_radius", "loop_separation", "n_segments", "drum_radius", "stress", "density"}},
    };
    return s;
}

class Reader {
public:
    explicit Reader(const ConfigDocument& d) : doc_(d) {}

    [[nodiscard]] const ConfigEntry* find(const std::string& sec, const std::string& key) const {
        auto s = doc_.sections.find(sec);
        if (s == doc_.sections.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    [[noreturn]] void fail(const ConfigEntry& e, const std::string& sec, const std::string& key,
                           const std::string& what) const {
        throw ConfigError(doc_.source, e.line, "[" + sec + "] " + key + ": " + what);
    }

    double to_double(const std::string& text, const ConfigEntry& e, const std::string& sec,
                     const std::string& key) const {
        const std::string t = trim(text);
        if (t.empty()) fail(e, sec, key, "empty number");
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
            fail(e, sec, key, "not a finite number: '" + t + "'");
        return v;
    }

    std::optional<double> num(const std::string& sec, const std::string& key) const {
        const auto* e = find(sec, key);
        if (!e) return std::nullopt;
        return to_double(e->value, *e, sec, key);
    }

    std::optional<long long> integer(const std::string& sec, const std::string& key) const {
        const auto* e = find(sec, key);
        if (!e) return std::nullopt;
        const std::string t = trim(e->value);
        char* end = nullptr;
        errno = 0;
        const long long v = std::strtoll(t.c_str(), &end, 10);
        if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) fail(*e, sec, key, "not an integer: '" + t + "'");
        return v;
    }

    std::optional<std::uint64_t> unsigned64(const std::string& sec, const std::string& key) const {
        const auto* e = find(sec, key);
        if (!e) return std::nullopt;
        const std::string t = trim(e->value);
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
        if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE)
            fail(*e, sec, key, "not an unsigned integer: '" + t + "'");
        return v;
    }

    std::optional<bool> boolean(const std::string& sec, const std::string& key) const {
        const auto* e = find(sec, key);
        if (!e) return std::nullopt;
        const std::string t = trim(e->value);
        if (t == "true") return true;
        if (t == "false") return false;
        fail(*e, sec, key, "expected true or false");
    }

    std::optional<std::vector<double>> list(const std::string& sec, const std::string& key) const {
        const auto* e = find(sec, key);
        if (!e) return std::nullopt;
        std::vector<double> out;
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(item, *e, sec, key));
        if (out.empty()) fail(*e, sec, key, "empty list");
        return out;
    }

    std::optional<std::string> text(const std::string& sec, const std::string& key) const {
        const auto* e = find(sec, key);
        if (!e) return std::nullopt;
        return trim(e->value);
    }

    /// A list of length n, or a single value broadcast to n entries.
    std::optional<std::vector<double>> per_item(const std::string& sec, const std::string& key, int n) const {
        auto v = list(sec, key);
        if (!v) return std::nullopt;
        if (v->size() == 1) return std::vector<double>(static_cast<std::size_t>(n), v->front());
        if (static_cast<int>(v->size()) != n) {
            std::ostringstream os;
            os << "expected 1 or " << n << " values, got " << v->size();
            fail(*find(sec, key), sec, key, os.str());
        }
        return v;
    }

    [[noreturn]] void fail_section(const std::string& sec, const std::string& what) const {
        int line = 0;
        auto s = doc_.sections.find(sec);
        if (s != doc_.sections.end() && !s->second.empty()) {
            line = s->second.begin()->second.line;
            for (const auto& [k, e] : s->second) line = std::min(line, e.line);
        }
        throw ConfigError(doc_.source, line, "[" + sec + "] " + what);
    }

    [[nodiscard]] bool has_section(const std::string& sec) const { return doc_.sections.count(sec) > 0; }

private:
    const ConfigDocument& doc_;
};

LatticeSpec read_lattice(const Reader& r) {
    LatticeSpec spec;
    const auto kind = r.text("lattice", "kind");
    if (!kind) r.fail_section("lattice", "missing key 'kind'");
    try {
        spec.kind = parse_topology_kind(*kind);
    } catch (const InputError& e) {
        r.fail(*r.find("lattice", "kind"), "lattice", "kind", e.what());
    }
    const auto n = r.integer("lattice", "n_sites");
    if (!n) r.fail_section("lattice", "missing key 'n_sites'");
    if (*n < 1 || *n > 100000) r.fail(*r.find("lattice", "n_sites"), "lattice", "n_sites", "out of range");
    spec.n_sites = static_cast<int>(*n);
    if (auto o = r.text("lattice", "orientation")) {
        try {
            spec.orientation = parse_orientation(*o);
        } catch (const InputError& e) {
            r.fail(*r.find("lattice", "orientation"), "lattice", "orientation", e.what());
        }
    }
    if (auto k = r.num("lattice", "k_par")) spec.k_par = *k;

    Couplings& c = spec.couplings;
    if (auto v = r.num("couplings", "J")) c.J = *v;
    if (auto v = r.num("couplings", "Jp")) c.Jp = *v;
    if (auto v = r.num("couplings", "J2")) c.J2 = *v;
    if (auto v = r.num("couplings", "J3")) c.J3 = *v;
    if (auto v = r.num("couplings", "J3p")) c.J3p = *v;

    spec.sites.assign(static_cast<std::size_t>(spec.n_sites), SiteParams{});
    const bool uniform = r.find("lattice", "cavity_freq") != nullptr;
    const bool per_site = r.find("sites", "cavity_freq") != nullptr;
    if (uniform && per_site)
        r.fail(*r.find("sites", "cavity_freq"), "sites", "cavity_freq", "also given in [lattice]; keep one");
    std::vector<double> wc;
    if (uniform) wc = *r.per_item("lattice", "cavity_freq", 1);
    if (uniform) wc.assign(static_cast<std::size_t>(spec.n_sites), wc.front());
    if (per_site) wc = *r.per_item("sites", "cavity_freq", spec.n_sites);
    for (std::size_t i = 0; i < wc.size(); ++i) spec.sites[i].cavity_freq = wc[i];
    if (auto v = r.per_item("sites", "mech_freq", spec.n_sites))
        for (std::size_t i = 0; i < v->size(); ++i) spec.sites[i].mech_freq = (*v)[i];
    if (auto v = r.per_item("sites", "mech_linewidth", spec.n_sites))
        for (std::size_t i = 0; i < v->size(); ++i) spec.sites[i].mech_linewidth = (*v)[i];
    if (auto v = r.per_item("sites", "g0", spec.n_sites))
        for (std::size_t i = 0; i < v->size(); ++i) spec.sites[i].g0 = (*v)[i];
    try {
        spec.validate();
    } catch (const InputError& e) {
        r.fail_section("lattice", e.what());
    }
    return spec;
}

ExperimentPlan read_measurement(const Reader& r, const LatticeSpec& spec) {
    ExperimentPlan p;
    const int n = spec.n_sites;
    const auto need = [&](const std::string& key) {
        auto v = r.per_item("measurement", key, n);
        if (!v) r.fail_section("measurement", "missing key '" + key + "'");
        return *v;
    };
    const auto kt = need("kappa_tot"), k1 = need("kappa_1"), k2 = need("kappa_2"), tr = need("transmittance");
    for (int k = 0; k < n; ++k) {
        const auto u = static_cast<std::size_t>(k);
        p.modes.push_back({kt[u], k1[u], k2[u], tr[u]});
    }
    for (const auto& s : spec.sites) {
        p.mech_freq.push_back(s.mech_freq);
        p.mech_linewidth.push_back(s.mech_linewidth);
        p.g0.push_back(s.g0);
    }
    if (auto v = r.integer("measurement", "n_powers")) p.n_powers = static_cast<int>(*v);
    if (auto v = r.num("measurement", "max_cooperativity")) p.max_cooperativity = *v;
    if (auto v = r.num("measurement", "snr")) p.snr = *v;
    if (auto v = r.integer("measurement", "samples_per_trace")) p.samples_per_trace = static_cast<int>(*v);
    if (auto v = r.num("measurement", "decay_constants")) p.decay_constants = *v;
    if (auto v = r.num("measurement", "noise_floor")) p.noise_floor = *v;
    if (auto v = r.num("measurement", "transient_fraction")) p.transient_fraction = *v;
    if (auto v = r.boolean("measurement", "noiseless")) p.noiseless = *v;
    try {
        p.validate(n);
    } catch (const InputError& e) {
        r.fail_section("measurement", e.what());
    }
    return p;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : InputError(format_error(source, line, what)), line_(line) {}

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

ConfigDocument parse_config_text(const std::string& text, const std::string& source) {
    ConfigDocument doc;
    doc.source = source;
    std::stringstream ss(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string l = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (l.empty()) continue;
        if (l.front() == '[') {
            if (l.back() != ']') throw ConfigError(source, line, "unterminated section header");
            section = trim(l.substr(1, l.size() - 2));
            if (section.empty()) throw ConfigError(source, line, "empty section name");
            if (doc.sections.count(section)) throw ConfigError(source, line, "duplicate section [" + section + "]");
            doc.sections[section];
            doc.section_lines[section] = line;
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
        const std::string key = trim(l.substr(0, eq));
        const std::string value = trim(l.substr(eq + 1));
        if (key.empty()) throw ConfigError(source, line, "missing key before '='");
        if (value.empty()) throw ConfigError(source, line, "missing value for '" + key + "'");
        if (section.empty()) throw ConfigError(source, line, "key '" + key + "' outside any section");
        auto& sec = doc.sections[section];
        if (sec.count(key)) throw ConfigError(source, line, "duplicate key '" + key + "'");
        sec[key] = {value, line};
    }
    return doc;
}

RunConfig parse_run_config(const ConfigDocument& doc) {
    const auto& sch = schema();
    for (const auto& [sec, keys] : doc.sections) {
        auto s = sch.find(sec);
        if (s == sch.end()) {
            auto l = doc.section_lines.find(sec);
            const int line = l == doc.section_lines.end() ? 0 : l->second;
            throw ConfigError(doc.source, line, "unknown section [" + sec + "]");
        }
        for (const auto& [key, e] : keys)
            if (!s->second.count(key)) throw ConfigError(doc.source, e.line, "[" + sec + "] unknown key '" + key + "'");
    }

    const Reader r(doc);
    RunConfig cfg;
    cfg.source = doc.source;
    if (auto v = r.unsigned64("run", "seed")) {
        cfg.seed = *v;
        cfg.has_seed = true;
    }
    if (r.has_section("lattice")) {
        cfg.lattice = read_lattice(r);
    } else {
        for (const char* dependent : {"couplings", "sites", "measurement"})
            if (r.has_section(dependent)) r.fail_section(dependent, "requires a [lattice] section");
    }
    if (r.has_section("measurement")) {
        cfg.measurement = read_measurement(r, *cfg.lattice);
        if (auto v = r.num("measurement", "truth_disorder")) {
            if (*v < 0.0) r.fail(*r.find("measurement", "truth_disorder"), "measurement", "truth_disorder", "must be >= 0");
            cfg.truth_disorder = *v;
        }
    }

    auto positive_int = [&](const std::string& sec, const std::string& key, int& dst, long long lo) {
        if (auto v = r.integer(sec, key)) {
            if (*v < lo || *v > 100000000) r.fail(*r.find(sec, key), sec, key, "out of range");
            dst = static_cast<int>(*v);
        }
    };
    positive_int("topology", "bz_points", cfg.topology.bz_points, 16);
    positive_int("topology", "ribbon_width", cfg.topology.ribbon_width, 1);
    positive_int("topology", "k_points", cfg.topology.k_points, 2);
    positive_int("topology", "graphene_grid", cfg.topology.graphene_grid, 3);

    if (auto v = r.list("disorder", "sigma_grid")) {
        for (double s : *v)
            if (s < 0.0) r.fail(*r.find("disorder", "sigma_grid"), "disorder", "sigma_grid", "sigma must be >= 0");
        if (!std::is_sorted(v->begin(), v->end()))
            r.fail(*r.find("disorder", "sigma_grid"), "disorder", "sigma_grid", "must be ascending");
        cfg.disorder.sigma_grid = *v;
    }
    positive_int("disorder", "samples", cfg.disorder.samples, 1);
    if (auto v = r.num("disorder", "zeta")) {
        if (*v < 0.0 || *v > 1.0) r.fail(*r.find("disorder", "zeta"), "disorder", "zeta", "must lie in [0, 1]");
        cfg.disorder.zeta = *v;
    }
    if (auto v = r.num("disorder", "confidence")) {
        if (!(*v > 0.0 && *v < 1.0)) r.fail(*r.find("disorder", "confidence"), "disorder", "confidence", "must lie in (0, 1)");
        cfg.disorder.confidence = *v;
    }

    if (auto v = r.num("recovery", "tol")) {
        if (!(*v > 0.0)) r.fail(*r.find("recovery", "tol"), "recovery", "tol", "must be positive");
        cfg.recovery.tol = *v;
    }
    positive_int("recovery", "max_iter", cfg.recovery.max_iter, 1);
    if (auto v = r.integer("recovery", "anchor_site")) {
        if (!cfg.lattice || *v < 1 || *v > cfg.lattice->n_sites)
            r.fail(*r.find("recovery", "anchor_site"), "recovery", "anchor_site", "must be a 1-based site of the lattice");
        cfg.recovery.anchor_site = static_cast<int>(*v - 1);
    }
    if (auto v = r.num("recovery", "anchor_g0")) cfg.recovery.anchor_g0 = *v;
    if ((cfg.recovery.anchor_site >= 0) != (r.find("recovery", "anchor_g0") != nullptr))
        r.fail_section("recovery", "anchor_site and anchor_g0 go together");

    if (r.has_section("circuit")) {
        CircuitSettings c;
        if (auto v = r.num("circuit", "L")) c.L = *v;
        if (auto v = r.num("circuit", "C")) c.C = *v;
        if (auto v = r.num("circuit", "M")) c.M = *v;
        if (auto v = r.num("circuit", "Mp")) c.Mp = *v;
        if (auto v = r.num("circuit", "loop_radius")) c.loop_radius = *v;
        if (auto v = r.num("circuit", "loop_separation")) c.loop_separation = *v;
        positive_int("circuit", "n_segments", c.n_segments, 3);
        if (auto v = r.list("circuit", "drum_radius")) c.drum_radius = *v;
        if (auto v = r.num("circuit", "stress")) c.stress = *v;
        if (auto v = r.num("circuit", "density")) c.density = *v;
        if (!(c.L > 0.0) || !(c.C > 0.0)) r.fail_section("circuit", "L and C must be positive");
        if (std::abs(c.M) >= c.L || std::abs(c.Mp) >= c.L) r.fail_section("circuit", "|M| and |Mp| must be below L");
        cfg.circuit = c;
    }
    return cfg;
}

RunConfig parse_run_config_text(const std::string& text, const std::string& source) {
    return parse_run_config(parse_config_text(text, source));
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open configuration file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config_text(ss.str(), path);
}

}  // namespace optolattice
