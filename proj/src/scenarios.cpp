#include "scenarios.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

namespace disp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct PresetDef {
    const char* name;
    const char* profile;
    double tau;
    bool sweep;
};

const PresetDef kPresets[] = {
    {"fig1a", "0", 0.0, false},   {"fig1b", "-1", 0.0, false},
    {"fig1c", "-2", 0.0, false},  {"fig1d", "-3", 0.0, false},
    {"fig2", "0", 0.0, false},
    {"fig3a", "1", 0.0, false},   {"fig3b", "1+x", 0.0, false},
    {"fig3c", "1+sin", 0.0, false}, {"fig3d", "1+2x+sin2", 0.0, false},
    {"fig4", "1", 0.0, false},
    {"fig5a", "0", 1.0, false},   {"fig5b", "-1", 1.0, false},
    {"fig5c", "-2", 1.0, false},  {"fig5d", "-3", 1.0, false},
    {"fig6", "0", 1.0, false},
    {"fig7a", "1", 1.0, false},   {"fig7b", "1+x", 1.0, false},
    {"fig7c", "1+sin", 1.0, false}, {"fig7d", "1+2x+sin2", 1.0, false},
    {"fig8", "1", 1.0, false},
    {"fig9", "1", 1.0, true},     {"fig10", "1+x", 1.0, true},
    {"fig11", "1+sin", 1.0, true}, {"fig12", "1+2x+sin2", 1.0, true},
};

// unprinted in the source material; spans the demonstrated stable range
const std::vector<double> kDefaultTauSweep{0.25, 0.5, 0.75, 1.0};

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " value '" + s + "'");
    }
}

long parse_int(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " value '" + s + "'");
    }
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& p : kPresets) v.emplace_back(p.name);
        return v;
    }();
    return names;
}

RunConfig preset(const std::string& name) {
    for (const auto& p : kPresets) {
        if (name == p.name) {
            RunConfig cfg;
            cfg.params = ModelParams{0.01, 0.001, p.tau, 1.0};
            cfg.profile = profile_from_token(p.profile, 1.0);
            cfg.history = HistorySpec::constant_profile(SpaceProfile::sin_pi(1.0, 1.0));
            cfg.n = 199;
            cfg.dt = 1e-3;
            cfg.T_end = 10.0;
            cfg.bdf_order = 2;
            cfg.snapshot_every = 100;
            return cfg;
        }
    }
    std::string msg = "unknown preset '" + name + "'; available:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw ConfigError(msg);
}

std::vector<double> preset_sweep_defaults(const std::string& name) {
    for (const auto& p : kPresets)
        if (name == p.name && p.sweep) return kDefaultTauSweep;
    return {};
}

const std::vector<std::string>& profile_tokens() {
    static const std::vector<std::string> tokens{"0",  "-1",    "-2",    "-3",
                                                 "1",  "1+x",   "1+sin", "1+2x+sin2"};
    return tokens;
}

DampingProfile profile_from_token(const std::string& token, double ell) {
    if (token == "1+x") return DampingProfile::affine(1.0, 1.0, ell);
    if (token == "1+sin") return DampingProfile::sinusoidal(1.0, 1.0, 1, ell);
    if (token == "1+2x+sin2") return DampingProfile::combined(1.0, 2.0, 1.0, 2, ell);
    // any number parses as a constant profile
    try {
        size_t pos = 0;
        const double c = std::stod(token, &pos);
        if (pos == token.size()) return DampingProfile::constant(c);
    } catch (const std::exception&) {
    }
    std::string msg = "unknown profile token '" + token + "'; named tokens:";
    for (const auto& t : profile_tokens()) msg += " " + t;
    throw ConfigError(msg);
}

std::string profile_token(const DampingProfile& profile) {
    switch (profile.family()) {
        case ProfileFamily::constant: return fmt12(profile.c0());
        case ProfileFamily::affine:
            if (profile.b0() == 1.0 && profile.c1() == 1.0) return "1+x";
            return "";
        case ProfileFamily::sinusoidal:
            if (profile.b0() == 1.0 && profile.c2() == 1.0 && profile.k() == 1) return "1+sin";
            return "";
        case ProfileFamily::combined:
            if (profile.b0() == 1.0 && profile.c1() == 2.0 && profile.c2() == 1.0 &&
                profile.k() == 2)
                return "1+2x+sin2";
            return "";
        case ProfileFamily::tabulated: return "";
    }
    return "";
}

RunResult execute(const RunConfig& config, double p, const Forcing* forcing) {
    config.validate();
    RunResult res;
    res.config = config;
    res.p = p;

    RunOutput out = run(config, forcing);
    res.norms = std::move(out.norms);
    res.snapshots = std::move(out.snapshots);
    res.status = out.status;
    res.picard = out.picard;
    res.tau_effective = out.tau_effective;
    res.tau_snapped = out.tau_snapped;
    res.steps = out.steps;

    ModelParams eff = config.params;
    eff.tau = res.tau_effective;
    Workspace ws = Workspace::build(eff, config.profile, config.n);
    res.hypotheses = validate_damping(config.profile, ws.grid);
    HistoryNorms hn = history_norms(config.history, ws.grid, eff, ws.d1, ws.d2, ws.quad, config.dt);
    res.stability = build_stability_report(eff, res.hypotheses, hn, p);

    if (res.norms.size() >= 2) {
        const double t_b = res.norms.t.back();
        try {
            res.decay = fit_decay(res.norms.t, res.norms.l2_u, 0.2 * t_b, t_b);
        } catch (const RangeError&) {
        }
    }
    return res;
}

SweepAxis axis_from_name(const std::string& s) {
    if (s == "tau") return SweepAxis::tau;
    if (s == "nu") return SweepAxis::nu;
    if (s == "mu") return SweepAxis::mu;
    if (s == "profile") return SweepAxis::profile;
    throw ConfigError("unknown sweep axis '" + s + "'; use tau, nu, mu or profile");
}

const char* axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::tau: return "tau";
        case SweepAxis::nu: return "nu";
        case SweepAxis::mu: return "mu";
        case SweepAxis::profile: return "profile";
    }
    return "?";
}

std::vector<RunResult> run_sweep(const RunConfig& base, SweepAxis axis,
                                 const std::vector<std::string>& values, double p) {
    // validate the whole sweep before launching anything
    std::vector<RunConfig> configs;
    configs.reserve(values.size());
    for (const auto& v : values) {
        RunConfig cfg = base;
        switch (axis) {
            case SweepAxis::tau: cfg.params.tau = parse_double(v, "tau"); break;
            case SweepAxis::nu: cfg.params.nu = parse_double(v, "nu"); break;
            case SweepAxis::mu: cfg.params.mu = parse_double(v, "mu"); break;
            case SweepAxis::profile: cfg.profile = profile_from_token(v, cfg.params.ell); break;
        }
        cfg.validate();
        configs.push_back(std::move(cfg));
    }

    std::vector<std::future<RunResult>> futures;
    futures.reserve(configs.size());
    for (const auto& cfg : configs)
        futures.push_back(std::async(std::launch::async, [cfg, p] { return execute(cfg, p); }));
    std::vector<RunResult> results;
    results.reserve(configs.size());
    for (auto& f : futures) results.push_back(f.get());
    return results;
}

std::string sweep_dir_name(SweepAxis axis, const std::string& value) {
    std::string v;
    for (char c : value) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')
            v += c;
        else if (c == '+')
            v += 'p';
        else
            v += '_';
    }
    return std::string(axis_name(axis)) + "_" + v;
}

namespace {

json profile_to_json(const DampingProfile& p) {
    json j;
    j["family"] = family_name(p.family());
    switch (p.family()) {
        case ProfileFamily::constant: j["c0"] = p.c0(); break;
        case ProfileFamily::affine:
            j["b0"] = p.b0();
            j["c1"] = p.c1();
            break;
        case ProfileFamily::sinusoidal:
            j["b0"] = p.b0();
            j["c2"] = p.c2();
            j["k"] = p.k();
            break;
        case ProfileFamily::combined:
            j["b0"] = p.b0();
            j["c1"] = p.c1();
            j["c2"] = p.c2();
            j["k"] = p.k();
            break;
        case ProfileFamily::tabulated: j["values"] = p.samples(); break;
    }
    j["a0"] = p.a0();
    j["sup_norm"] = p.sup_norm();
    return j;
}

DampingProfile profile_from_json(const json& j, double ell) {
    const ProfileFamily f = family_from_name(j.at("family").get<std::string>());
    switch (f) {
        case ProfileFamily::constant: return DampingProfile::constant(j.at("c0").get<double>());
        case ProfileFamily::affine:
            return DampingProfile::affine(j.at("b0").get<double>(), j.at("c1").get<double>(), ell);
        case ProfileFamily::sinusoidal:
            return DampingProfile::sinusoidal(j.at("b0").get<double>(), j.at("c2").get<double>(),
                                              j.at("k").get<int>(), ell);
        case ProfileFamily::combined:
            return DampingProfile::combined(j.at("b0").get<double>(), j.at("c1").get<double>(),
                                            j.at("c2").get<double>(), j.at("k").get<int>(), ell);
        case ProfileFamily::tabulated:
            return DampingProfile::tabulated(j.at("values").get<std::vector<double>>(), ell);
    }
    throw ConfigError("bad profile json");
}

SpaceProfile space_profile_from_name(const std::string& name, double amplitude, double ell) {
    if (name == "sin_pi") return SpaceProfile::sin_pi(amplitude, ell);
    if (name == "clamped_poly") return SpaceProfile::clamped_poly(amplitude, ell);
    if (name == "zero") return SpaceProfile::zero();
    throw ConfigError("unknown history space profile '" + name +
                      "'; use sin_pi, clamped_poly or zero");
}

json history_to_json(const HistorySpec& h) {
    json j;
    switch (h.kind()) {
        case HistorySpec::Kind::constant_in_s:
            j["kind"] = "constant";
            j["phi"] = h.phi().name;
            j["amplitude"] = h.phi().amplitude;
            break;
        case HistorySpec::Kind::separable:
            j["kind"] = "separable";
            j["phi"] = h.phi().name;
            j["amplitude"] = h.phi().amplitude;
            j["psi"] = h.psi().name;
            j["rate"] = h.psi().rate;
            break;
        case HistorySpec::Kind::tabulated:
            j["kind"] = "tabulated";
            j["stamps"] = h.stamps();
            j["slots"] = h.slots();
            break;
    }
    return j;
}

HistorySpec history_from_json(const json& j, double ell) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        return HistorySpec::constant_profile(space_profile_from_name(
            j.at("phi").get<std::string>(), j.value("amplitude", 1.0), ell));
    }
    if (kind == "separable") {
        SpaceProfile phi = space_profile_from_name(j.at("phi").get<std::string>(),
                                                   j.value("amplitude", 1.0), ell);
        const std::string psi = j.value("psi", std::string("one"));
        if (psi == "one") return HistorySpec::separable(std::move(phi), TimeProfile::one());
        if (psi == "exp")
            return HistorySpec::separable(std::move(phi),
                                          TimeProfile::exp_rate(j.value("rate", 0.0)));
        throw ConfigError("unknown history time profile '" + psi + "'; use one or exp");
    }
    if (kind == "tabulated") {
        return HistorySpec::tabulated(j.at("stamps").get<std::vector<double>>(),
                                      j.at("slots").get<std::vector<std::vector<double>>>());
    }
    throw ConfigError("unknown history kind '" + kind + "'");
}

} // namespace

json config_to_json(const RunConfig& c) {
    json j;
    j["params"] = {{"nu", c.params.nu}, {"mu", c.params.mu}, {"tau", c.params.tau}, {"ell", c.params.ell}};
    j["profile"] = profile_to_json(c.profile);
    j["history"] = history_to_json(c.history);
    j["n"] = c.n;
    j["dt"] = c.dt;
    j["T_end"] = c.T_end;
    j["bdf_order"] = c.bdf_order;
    j["snapshot_every"] = c.snapshot_every;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    const auto& p = j.at("params");
    c.params.nu = p.at("nu").get<double>();
    c.params.mu = p.at("mu").get<double>();
    c.params.tau = p.at("tau").get<double>();
    c.params.ell = p.at("ell").get<double>();
    c.profile = profile_from_json(j.at("profile"), c.params.ell);
    c.history = history_from_json(j.at("history"), c.params.ell);
    c.n = j.at("n").get<int>();
    c.dt = j.at("dt").get<double>();
    c.T_end = j.at("T_end").get<double>();
    c.bdf_order = j.at("bdf_order").get<int>();
    c.snapshot_every = j.at("snapshot_every").get<int>();
    return c;
}

namespace {

json stability_to_json(const StabilityReport& r) {
    json j;
    j["p"] = r.p;
    j["gamma"] = r.gamma;
    j["M"] = r.M;
    j["omega"] = r.omega;
    j["omega_tilde"] = r.omega_tilde;
    j["tau1"] = r.tau1;
    j["tau2"] = r.tau2;
    j["sigma"] = r.sigma;
    j["tau_hat"] = r.tau_hat;
    j["delta1"] = r.delta1;
    j["delta2"] = r.delta2;
    j["delta3"] = r.delta3;
    j["M_log"] = r.M_log;
    j["M_overflow"] = r.M_overflow;
    j["flags"] = {{"a_positive", r.flag_a_positive},
                  {"a_concave", r.flag_a_concave},
                  {"a_fourth_nonneg", r.flag_a_fourth},
                  {"nu_small", r.flag_nu_small},
                  {"tau_admissible", r.flag_tau_admissible}};
    return j;
}

json decay_to_json(const DecayFit& f) {
    return json{{"window", {f.t_a, f.t_b}},
                {"slope", f.slope},
                {"intercept", f.intercept},
                {"r_squared", f.r_squared}};
}

} // namespace

json meta_json(const RunResult& r) {
    json j;
    j["artifact"] = {{"name", "dispersive"}, {"version", kVersion}};
    j["config"] = config_to_json(r.config);
    j["analysis"] = {{"p", r.p}};
    j["hypotheses"] = {{"positive_above_a0", r.hypotheses.positive_above_a0},
                       {"concave_second_derivative", r.hypotheses.concave_second_derivative},
                       {"nonneg_fourth_derivative", r.hypotheses.nonneg_fourth_derivative},
                       {"a0", r.hypotheses.a0},
                       {"sup_norm", r.hypotheses.sup_norm}};
    j["status"] = {{"state", state_name(r.status.state)},
                   {"t_event", r.status.t_event},
                   {"residual", r.status.residual},
                   {"blowup_threshold", r.status.blowup_threshold},
                   {"steady_tol", r.status.steady_tol}};
    j["stability"] = r.stability ? stability_to_json(*r.stability) : json(nullptr);
    j["decay"] = r.decay ? decay_to_json(*r.decay) : json(nullptr);
    j["metadata"] = {{"tau_effective", r.tau_effective},
                     {"tau_snapped", r.tau_snapped},
                     {"steps", r.steps},
                     {"picard", {{"total_iterations", r.picard.total_iterations},
                                 {"max_iterations", r.picard.max_iterations},
                                 {"fallbacks", r.picard.fallbacks}}}};
    return j;
}

namespace {

class ScopedFiles {
public:
    void add(const fs::path& p) { paths_.push_back(p); }
    void keep() { keep_ = true; }
    ~ScopedFiles() {
        if (keep_) return;
        std::error_code ec;
        for (const auto& p : paths_) fs::remove(p, ec);
    }

private:
    std::vector<fs::path> paths_;
    bool keep_ = false;
};

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + p.string());
}

} // namespace

void emit(const RunResult& r, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw IoError("cannot create output directory " + out_dir.string());

    ScopedFiles cleanup;
    const fs::path norms_path = out_dir / "norms.csv";
    const fs::path snaps_path = out_dir / "snapshots.csv";
    const fs::path meta_path = out_dir / "meta.json";

    {
        std::string text = "t,l2_u,h1_u,h2_u,weighted\n";
        for (std::size_t i = 0; i < r.norms.size(); ++i) {
            text += fmt12(r.norms.t[i]);
            text += ',';
            text += fmt12(r.norms.l2_u[i]);
            text += ',';
            text += fmt12(r.norms.h1_u[i]);
            text += ',';
            text += fmt12(r.norms.h2_u[i]);
            text += ',';
            text += fmt12(r.norms.weighted[i]);
            text += '\n';
        }
        cleanup.add(norms_path);
        write_text(norms_path, text);
    }
    {
        SpatialGrid grid = build_grid(r.config.params, r.config.n);
        std::string text = "t,x,u\n";
        for (const auto& snap : r.snapshots) {
            for (int i = 0; i < grid.n; ++i) {
                text += fmt12(snap.t);
                text += ',';
                text += fmt12(grid.node(i));
                text += ',';
                text += fmt12(snap.values[static_cast<size_t>(i)]);
                text += '\n';
            }
        }
        cleanup.add(snaps_path);
        write_text(snaps_path, text);
    }
    {
        cleanup.add(meta_path);
        write_text(meta_path, meta_json(r).dump(2) + "\n");
    }
    cleanup.keep();
}

RunConfig load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());

    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string line, section;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            const auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line without '=': " + line);
        sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto get = [&](const std::string& sec, const std::string& key,
                   const std::string& fallback) -> std::string {
        auto s = sections.find(sec);
        if (s == sections.end()) return fallback;
        auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    };
    auto require = [&](const std::string& sec, const std::string& key) -> std::string {
        const std::string v = get(sec, key, "");
        if (v.empty()) throw ConfigError("config is missing [" + sec + "] " + key);
        return v;
    };

    RunConfig cfg;
    cfg.params.nu = parse_double(require("params", "nu"), "nu");
    cfg.params.mu = parse_double(require("params", "mu"), "mu");
    cfg.params.tau = parse_double(get("params", "tau", "0"), "tau");
    cfg.params.ell = parse_double(get("params", "ell", "1"), "ell");

    const std::string family = get("profile", "family", "constant");
    if (family == "constant") {
        cfg.profile = DampingProfile::constant(parse_double(get("profile", "c0", "0"), "c0"));
    } else if (family == "affine") {
        cfg.profile = DampingProfile::affine(parse_double(require("profile", "b0"), "b0"),
                                             parse_double(require("profile", "c1"), "c1"),
                                             cfg.params.ell);
    } else if (family == "sinusoidal") {
        cfg.profile = DampingProfile::sinusoidal(
            parse_double(require("profile", "b0"), "b0"),
            parse_double(require("profile", "c2"), "c2"),
            static_cast<int>(parse_int(get("profile", "k", "1"), "k")), cfg.params.ell);
    } else if (family == "combined") {
        cfg.profile = DampingProfile::combined(
            parse_double(require("profile", "b0"), "b0"),
            parse_double(require("profile", "c1"), "c1"),
            parse_double(require("profile", "c2"), "c2"),
            static_cast<int>(parse_int(get("profile", "k", "1"), "k")), cfg.params.ell);
    } else if (family == "tabulated") {
        std::vector<double> values;
        std::stringstream ss(require("profile", "values"));
        std::string tok;
        while (std::getline(ss, tok, ',')) values.push_back(parse_double(tok, "profile value"));
        cfg.profile = DampingProfile::tabulated(std::move(values), cfg.params.ell);
    } else {
        throw ConfigError("unknown profile family '" + family + "'");
    }

    const std::string kind = get("history", "kind", "constant");
    SpaceProfile phi = space_profile_from_name(
        get("history", "phi", "sin_pi"),
        parse_double(get("history", "amplitude", "1"), "amplitude"), cfg.params.ell);
    if (kind == "constant") {
        cfg.history = HistorySpec::constant_profile(std::move(phi));
    } else if (kind == "separable") {
        const std::string psi = get("history", "psi", "one");
        if (psi == "one")
            cfg.history = HistorySpec::separable(std::move(phi), TimeProfile::one());
        else if (psi == "exp")
            cfg.history = HistorySpec::separable(
                std::move(phi),
                TimeProfile::exp_rate(parse_double(get("history", "rate", "0"), "rate")));
        else
            throw ConfigError("unknown history psi '" + psi + "'");
    } else {
        throw ConfigError("unknown history kind '" + kind + "' (config files support constant and separable)");
    }

    cfg.n = static_cast<int>(parse_int(get("run", "n", "199"), "n"));
    cfg.dt = parse_double(get("run", "dt", "0.001"), "dt");
    cfg.T_end = parse_double(get("run", "T_end", "10"), "T_end");
    cfg.bdf_order = static_cast<int>(parse_int(get("run", "bdf_order", "2"), "bdf_order"));
    cfg.snapshot_every =
        static_cast<int>(parse_int(get("run", "snapshot_every", "100"), "snapshot_every"));
    cfg.validate();
    return cfg;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "params.nu") cfg.params.nu = parse_double(value, key);
    else if (key == "params.mu") cfg.params.mu = parse_double(value, key);
    else if (key == "params.tau") cfg.params.tau = parse_double(value, key);
    else if (key == "params.ell") cfg.params.ell = parse_double(value, key);
    else if (key == "profile") cfg.profile = profile_from_token(value, cfg.params.ell);
    else if (key == "history.phi")
        cfg.history = HistorySpec::constant_profile(
            space_profile_from_name(value, cfg.history.phi().amplitude, cfg.params.ell));
    else if (key == "history.amplitude")
        cfg.history = HistorySpec::constant_profile(space_profile_from_name(
            cfg.history.phi().name, parse_double(value, key), cfg.params.ell));
    else if (key == "n") cfg.n = static_cast<int>(parse_int(value, key));
    else if (key == "dt") cfg.dt = parse_double(value, key);
    else if (key == "T_end") cfg.T_end = parse_double(value, key);
    else if (key == "bdf_order") cfg.bdf_order = static_cast<int>(parse_int(value, key));
    else if (key == "snapshot_every") cfg.snapshot_every = static_cast<int>(parse_int(value, key));
    else throw ConfigError("unknown override key '" + key + "'");
}

std::string report_dir(const fs::path& dir) {
    const fs::path meta_path = dir / "meta.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw IoError("cannot open " + meta_path.string());
    json meta;
    try {
        meta_in >> meta;
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + meta_path.string() + ": " + e.what());
    }

    RunConfig cfg = config_from_json(meta.at("config"));
    const double p = meta.contains("analysis") ? meta["analysis"].value("p", 1.0) : 1.0;
    const double tau_eff =
        meta.contains("metadata") ? meta["metadata"].value("tau_effective", cfg.params.tau)
                                  : cfg.params.tau;

    const fs::path norms_path = dir / "norms.csv";
    std::ifstream norms_in(norms_path);
    if (!norms_in) throw IoError("cannot open " + norms_path.string());
    NormSeries series;
    std::string line;
    std::getline(norms_in, line);  // header
    while (std::getline(norms_in, line)) {
        if (line.empty()) continue;
        NormRow row;
        std::stringstream ss(line);
        std::string tok;
        double* fields[5] = {&row.t, &row.l2_u, &row.h1_u, &row.h2_u, &row.weighted};
        for (auto* f : fields) {
            if (!std::getline(ss, tok, ',')) throw IoError("short row in norms.csv: " + line);
            *f = parse_double(tok, "norms.csv field");
        }
        series.push(row);
    }

    ModelParams eff = cfg.params;
    eff.tau = tau_eff;
    Workspace ws = Workspace::build(eff, cfg.profile, cfg.n);
    HypothesisReport hyp = validate_damping(cfg.profile, ws.grid);
    HistoryNorms hn = history_norms(cfg.history, ws.grid, eff, ws.d1, ws.d2, ws.quad, cfg.dt);
    StabilityReport stab = build_stability_report(eff, hyp, hn, p);

    json out;
    out["config"] = meta.at("config");
    out["status"] = meta.value("status", json(nullptr));
    out["hypotheses"] = {{"positive_above_a0", hyp.positive_above_a0},
                         {"concave_second_derivative", hyp.concave_second_derivative},
                         {"nonneg_fourth_derivative", hyp.nonneg_fourth_derivative},
                         {"a0", hyp.a0},
                         {"sup_norm", hyp.sup_norm}};
    out["stability"] = stability_to_json(stab);
    if (series.size() >= 2) {
        const double t_b = series.t.back();
        try {
            out["decay"] = decay_to_json(fit_decay(series.t, series.l2_u, 0.2 * t_b, t_b));
        } catch (const RangeError&) {
            out["decay"] = nullptr;
        }
    } else {
        out["decay"] = nullptr;
    }
    return out.dump(2) + "\n";
}

} // namespace disp
