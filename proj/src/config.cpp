#include "qgibbs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace qgibbs {

namespace {
std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::optional<double> to_double(const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

std::optional<long> to_long(const std::string& s) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

void err(std::vector<Diagnostic>& d, const std::string& field, const std::string& msg) {
    d.push_back({Diagnostic::Severity::Error, field, msg});
}
void warn(std::vector<Diagnostic>& d, const std::string& field, const std::string& msg) {
    d.push_back({Diagnostic::Severity::Warning, field, msg});
}

// typed getters with diagnostics
struct Reader {
    const RawConfig& raw;
    std::vector<Diagnostic>& diags;

    std::optional<std::string> get(const std::string& sec, const std::string& key) const {
        auto s = raw.sections.find(sec);
        if (s == raw.sections.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    }
    double num(const std::string& sec, const std::string& key, double dflt,
               bool required = false) const {
        auto v = get(sec, key);
        if (!v) {
            if (required) err(diags, sec + "." + key, "required key is missing");
            return dflt;
        }
        auto d = to_double(*v);
        if (!d) {
            err(diags, sec + "." + key, "not a number: '" + *v + "'");
            return dflt;
        }
        return *d;
    }
    long integer(const std::string& sec, const std::string& key, long dflt) const {
        auto v = get(sec, key);
        if (!v) return dflt;
        auto d = to_long(*v);
        if (!d) {
            err(diags, sec + "." + key, "not an integer: '" + *v + "'");
            return dflt;
        }
        return *d;
    }
    std::string str(const std::string& sec, const std::string& key, std::string dflt) const {
        auto v = get(sec, key);
        return v ? *v : dflt;
    }
    bool boolean(const std::string& sec, const std::string& key, bool dflt) const {
        auto v = get(sec, key);
        if (!v) return dflt;
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        err(diags, sec + "." + key, "not a boolean: '" + *v + "'");
        return dflt;
    }
};
}  // namespace

RawConfig parse_config_text(const std::string& text, std::vector<Diagnostic>& diags) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                err(diags, "line " + std::to_string(lineno), "malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section == "topography") raw.topography_given = true;
            continue;
        }
        if (section == "topography") {
            std::istringstream row(line);
            double j, k, re, im;
            if (row >> j >> k >> re >> im) {
                raw.topography.push_back({j, k, re, im});
            } else {
                err(diags, "topography line " + std::to_string(lineno),
                    "expected four numbers: j k re im");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            err(diags, "line " + std::to_string(lineno), "expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) {
            err(diags, key, "key outside any [section]");
            continue;
        }
        raw.sections[section][key] = val;
    }
    return raw;
}

void apply_override(RawConfig& raw, const std::string& spec, std::vector<Diagnostic>& diags) {
    const auto eq = spec.find('=');
    const auto dot = spec.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        err(diags, spec, "override must be section.key=value");
        return;
    }
    raw.sections[trim(spec.substr(0, dot))][trim(spec.substr(dot + 1, eq - dot - 1))] =
        trim(spec.substr(eq + 1));
}

RawConfig default_raw_config() {
    std::vector<Diagnostic> d;
    return parse_config_text(
        "[params]\nalpha = 1.0\nmu = 1.0\nbeta = 1.0\nN = 5\n", d);
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Diagnostic::Severity::Error) return true;
    return false;
}

RunConfig interpret_config(const RawConfig& raw, std::vector<Diagnostic>& diags) {
    Reader r{raw, diags};
    RunConfig c;
    c.alpha = r.num("params", "alpha", 0.0, true);
    c.mu = r.num("params", "mu", 0.0, true);
    c.beta = r.num("params", "beta", 0.0, true);
    c.cutoff = static_cast<int>(r.integer("params", "N", 0));
    if (!r.get("params", "N")) err(diags, "params.N", "required key is missing");

    if (r.get("params", "alpha") && !(c.alpha > 0)) err(diags, "params.alpha", "must be > 0");
    if (r.get("params", "mu") && !(c.mu > 0)) err(diags, "params.mu", "must be > 0");
    if (r.get("params", "N") && c.cutoff < 1) err(diags, "params.N", "must be >= 1");
    if (r.get("params", "beta") && c.beta == 0.0)
        warn(diags, "params.beta",
             "beta = 0 is outside the stationary-solution hypotheses; the truncated dynamics "
             "remain well defined");

    c.topography_given = raw.topography_given;
    if (raw.topography_given) {
        c.topography = raw.topography;
    } else {
        c.topography = {{1, 1, 1.0, 0.0}, {2, 1, 0.5, 0.0}};
    }
    for (const auto& t : c.topography) {
        const auto [j, k, re, im] = t;
        if (j != std::floor(j) || k != std::floor(k))
            err(diags, "topography", "mode indices must be integers");
        else if (j < 0)
            err(diags, "topography", "rows hold reduced modes (j >= 0); the conjugate at -j is implied");
        else if (k < 1)
            err(diags, "topography", "k must be >= 1");
        else if (c.cutoff >= 1 && j * j + k * k > c.cutoff)
            warn(diags, "topography",
                 "mode (" + std::to_string(int(j)) + "," + std::to_string(int(k)) +
                     ") lies outside Lambda_N and is dropped by projection");
        else if (j == 0 && im != 0.0)
            err(diags, "topography", "j = 0 coefficients must be real (conjugate symmetry)");
    }

    c.seed = static_cast<std::uint64_t>(r.integer("run", "seed", 1));
    c.experiment = r.str("run", "experiment", "all");
    c.out_dir = r.str("run", "out_dir", "runs");
    const std::vector<std::string> known = {"all",        "invariance", "conservation",
                                            "chaos",      "regularity", "residual"};
    if (std::find(known.begin(), known.end(), c.experiment) == known.end())
        err(diags, "run.experiment", "unknown experiment '" + c.experiment + "'");

    Thresholds thr;
    thr.z_max = r.num("thresholds", "z_max", thr.z_max);
    thr.flatten_frac = r.num("thresholds", "flatten_frac", thr.flatten_frac);
    thr.ratio_lo = r.num("thresholds", "ratio_lo", thr.ratio_lo);
    thr.ratio_hi = r.num("thresholds", "ratio_hi", thr.ratio_hi);
    thr.min_order = r.num("thresholds", "min_order", thr.min_order);
    thr.neutrality_max = r.num("thresholds", "neutrality_max", thr.neutrality_max);
    thr.bias_max = r.num("thresholds", "bias_max", thr.bias_max);

    c.invariance.members = r.integer("invariance", "M", c.invariance.members);
    c.invariance.t_final = r.num("invariance", "T", c.invariance.t_final);
    c.invariance.dt = r.num("invariance", "dt", c.invariance.dt);
    c.invariance.variance_scale = r.num("invariance", "variance_scale", 1.0);
    c.invariance.control_members = r.integer("invariance", "control_M", c.invariance.control_members);
    c.invariance.control_dt = r.num("invariance", "control_dt", c.invariance.control_dt);
    c.invariance.thr = thr;
    if (c.invariance.t_final > 0 && !(c.invariance.dt > 0))
        err(diags, "invariance.dt", "must be > 0");

    c.conservation.t_final = r.num("conservation", "T", c.conservation.t_final);
    c.conservation.dt = r.num("conservation", "dt", c.conservation.dt);
    c.conservation.stride = static_cast<int>(r.integer("conservation", "stride", c.conservation.stride));
    c.conservation.thr = thr;
    if (!(c.conservation.dt > 0)) err(diags, "conservation.dt", "must be > 0");

    c.chaos.samples = r.integer("chaos", "M", c.chaos.samples);
    if (auto v = r.get("chaos", "truncations")) {
        c.chaos.truncations.clear();
        for (const auto& tok : split(*v, ',')) {
            auto t = to_long(tok);
            if (!t)
                err(diags, "chaos.truncations", "not an integer: '" + tok + "'");
            else
                c.chaos.truncations.push_back(static_cast<int>(*t));
        }
    }
    c.chaos.thr = thr;

    if (auto v = r.get("regularity", "deltas")) {
        c.regularity.deltas.clear();
        for (const auto& tok : split(*v, ',')) {
            auto t = to_double(tok);
            if (!t)
                err(diags, "regularity.deltas", "not a number: '" + tok + "'");
            else
                c.regularity.deltas.push_back(*t);
        }
    }
    if (auto v = r.get("regularity", "m_list")) {
        c.regularity.m_list.clear();
        for (const auto& tok : split(*v, ',')) {
            auto t = to_long(tok);
            if (!t)
                err(diags, "regularity.m_list", "not an integer: '" + tok + "'");
            else
                c.regularity.m_list.push_back(*t);
        }
    }
    c.regularity.thr = thr;

    c.residual.t_final = r.num("residual", "T", c.residual.t_final);
    c.residual.dt = r.num("residual", "dt", c.residual.dt);
    c.residual.levels = static_cast<int>(r.integer("residual", "levels", c.residual.levels));
    c.residual.thr = thr;
    if (!(c.residual.dt > 0)) err(diags, "residual.dt", "must be > 0");

    c.grid_snapshots = r.boolean("output", "grid_snapshots", false);
    c.snapshot_nx = static_cast<int>(r.integer("output", "nx", 64));
    c.snapshot_ny = static_cast<int>(r.integer("output", "ny", 64));
    return c;
}

GibbsParams RunConfig::make_params() const {
    SpectralField h(cutoff);
    for (const auto& t : topography) {
        const ModeIndex l{static_cast<int>(t[0]), static_cast<int>(t[1])};
        if (l.norm2() <= cutoff) h.set_coeff(l, Complex(t[2], t[3]));
    }
    return GibbsParams(alpha, mu, beta, h, cutoff);
}

std::string RunConfig::canonical_text() const {
    std::ostringstream o;
    o << "[params]\n";
    o << "alpha = " << format_double(alpha) << "\n";
    o << "mu = " << format_double(mu) << "\n";
    o << "beta = " << format_double(beta) << "\n";
    o << "N = " << cutoff << "\n";
    o << "[topography]\n";
    for (const auto& t : topography)
        o << int(t[0]) << " " << int(t[1]) << " " << format_double(t[2]) << " "
          << format_double(t[3]) << "\n";
    o << "[run]\n";
    o << "seed = " << seed << "\n";
    o << "experiment = " << experiment << "\n";
    o << "[invariance]\n";
    o << "M = " << invariance.members << "\nT = " << format_double(invariance.t_final)
      << "\ndt = " << format_double(invariance.dt)
      << "\nvariance_scale = " << format_double(invariance.variance_scale)
      << "\ncontrol_M = " << invariance.control_members
      << "\ncontrol_dt = " << format_double(invariance.control_dt) << "\n";
    o << "[conservation]\n";
    o << "T = " << format_double(conservation.t_final) << "\ndt = " << format_double(conservation.dt)
      << "\nstride = " << conservation.stride << "\n";
    o << "[chaos]\nM = " << chaos.samples << "\ntruncations = ";
    for (size_t i = 0; i < chaos.truncations.size(); ++i)
        o << (i ? "," : "") << chaos.truncations[i];
    o << "\n[regularity]\ndeltas = ";
    for (size_t i = 0; i < regularity.deltas.size(); ++i)
        o << (i ? "," : "") << format_double(regularity.deltas[i]);
    o << "\nm_list = ";
    for (size_t i = 0; i < regularity.m_list.size(); ++i)
        o << (i ? "," : "") << regularity.m_list[i];
    o << "\n[residual]\nT = " << format_double(residual.t_final)
      << "\ndt = " << format_double(residual.dt) << "\nlevels = " << residual.levels << "\n";
    o << "[thresholds]\nz_max = " << format_double(invariance.thr.z_max)
      << "\nflatten_frac = " << format_double(regularity.thr.flatten_frac)
      << "\nratio_lo = " << format_double(conservation.thr.ratio_lo)
      << "\nratio_hi = " << format_double(conservation.thr.ratio_hi)
      << "\nmin_order = " << format_double(residual.thr.min_order)
      << "\nneutrality_max = " << format_double(conservation.thr.neutrality_max)
      << "\nbias_max = " << format_double(invariance.thr.bias_max) << "\n";
    return o.str();
}

}  // namespace qgibbs
