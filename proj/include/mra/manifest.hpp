#pragma once

// JSON manifests describe a complete experiment: basis, model laws, time
// window, ensemble size, initial-data family, and output options.  Parsing is
// strict -- unknown keys are rejected by full path, all field errors are
// collected into a single ConfigError -- and serialization materializes every
// default, so serialize(parse(text)) is a fixed point.  Custom (lambda-backed)
// laws are deliberately not expressible here; manifests name presets only.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "attractor.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "forcing.hpp"
#include "model.hpp"
#include "presets.hpp"
#include "spectral.hpp"

namespace mra {

using ordered_json = nlohmann::ordered_json;

inline const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = {
        "check", "simulate", "ensemble", "decay", "absorb", "entry-time", "steady",
        "oracle-compare"};
    return kinds;
}

struct Manifest {
    std::string experiment;

    // basis
    double L = 3.14159265358979323846;
    int N = 0;
    int Q = 0;  // resolved to 4N when left unset

    // model
    Mode mode = Mode::deterministic;
    struct {
        std::string kind = "constant";
        double value = 1.0;  // constant
        double m = 1.0, M = 1.0;  // saturating
    } a;
    struct {
        std::string kind = "linear";
        double slope = 0.0;  // linear, cubic
        double kappa = 1.0;  // cubic
        double gain = 0.0;   // tanh
    } f;
    struct {
        std::string kind = "zero";
        double scale = 0.0, offset = 0.0;
    } sigma;
    struct {
        std::string kind = "zero";
        std::vector<double> modes;
        double nu = 0.0;
        std::vector<double> coeffs;
    } h;
    double rate = std::numeric_limits<double>::quiet_NaN();
    double eps = std::numeric_limits<double>::quiet_NaN();

    // time
    double tau = 0.0, T = 1.0, dt = 1e-3;
    std::uint64_t record_every = 1;

    // ensemble
    bool has_ensemble = false;
    std::uint64_t paths = 0;
    std::uint64_t master_seed = 0;

    // family
    bool has_family = false;
    struct {
        std::string shape = "point";
        std::vector<double> modes;   // point
        std::vector<double> std;     // gaussian
        struct {
            std::string kind = "constant";
            double c = 1.0, degree = 0.0, k = 0.0;
        } profile;                   // ball
    } family;

    // entry
    bool has_entry = false;
    struct {
        double base = 1.0, factor = 2.0, cap = 16.0;
        double target_time = 0.0;
    } entry;

    // oracle
    bool has_oracle = false;
    std::string oracle_kind;

    // output
    std::string out_dir = "out";
    bool plot = false;

    Basis to_basis() const { return build_basis(L, N, Q > 0 ? Q : 4 * N); }

    ModelParams to_params() const {
        ModelParams p;
        p.mode = mode;
        if (a.kind == "constant") p.a = DiffusionLaw::constant(a.value);
        else p.a = DiffusionLaw::saturating(a.m, a.M);
        if (f.kind == "linear") p.f = ReactionLaw::linear(f.slope);
        else if (f.kind == "cubic") p.f = ReactionLaw::cubic(f.slope, f.kappa);
        else p.f = ReactionLaw::tanh_sat(f.gain);
        if (sigma.kind == "zero") p.sigma = NoiseLaw::zero();
        else if (sigma.kind == "affine") p.sigma = NoiseLaw::affine(sigma.scale, sigma.offset);
        else p.sigma = NoiseLaw::sine_bounded(sigma.scale);
        if (h.kind == "zero") p.h = ForcingSpec::zero();
        else if (h.kind == "constant") p.h = ForcingSpec::constant(h.modes);
        else if (h.kind == "exponential") p.h = ForcingSpec::exponential(h.nu, h.modes);
        else p.h = ForcingSpec::polynomial(h.coeffs, h.modes);
        p.rate = rate;
        return p;
    }

    FamilySpec to_family() const {
        if (family.shape == "point") return FamilySpec::point(family.modes);
        if (family.shape == "gaussian") return FamilySpec::gaussian_modes(family.std);
        RadiusProfile prof;
        if (family.profile.kind == "constant")
            prof = RadiusProfile::constant(family.profile.c);
        else if (family.profile.kind == "poly")
            prof = RadiusProfile::poly_abs(family.profile.c, family.profile.degree);
        else
            prof = RadiusProfile::exp_growth(family.profile.c, family.profile.k);
        return FamilySpec::ball_uniform(prof);
    }

    DerivedConstants to_constants(const ModelParams& p, const Basis& b) const {
        if (std::isfinite(rate)) return derive_constants(p, b, rate, RateSpec::by_rate);
        if (std::isfinite(eps)) return derive_constants(p, b, eps, RateSpec::by_eps);
        throw ConfigError("manifest: this experiment needs model.rate or model.eps");
    }

    std::vector<double> entry_leads() const {
        std::vector<double> leads;
        for (double s = entry.base; s <= entry.cap * (1.0 + 1e-12); s *= entry.factor)
            leads.push_back(s);
        return leads;
    }
};

namespace detail {

class ManifestScanner {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& what) {
        errors.push_back(path + ": " + what);
    }

    void check_keys(const ordered_json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        for (const auto& item : obj.items()) {
            bool ok = false;
            for (const char* k : allowed)
                if (item.key() == k) { ok = true; break; }
            if (!ok) fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
        }
    }

    const ordered_json* section(const ordered_json& parent, const char* key,
                                bool required = false) {
        auto it = parent.find(key);
        if (it == parent.end()) {
            if (required) fail(key, "required section is missing");
            return nullptr;
        }
        if (!it->is_object()) {
            fail(key, "must be an object");
            return nullptr;
        }
        return &*it;
    }

    bool number(const ordered_json& obj, const std::string& path, const char* key, double& out,
                bool required = false) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "required number is missing");
            return false;
        }
        if (!it->is_number()) {
            fail(path + "." + key, "must be a number");
            return false;
        }
        out = it->get<double>();
        return true;
    }

    bool integer(const ordered_json& obj, const std::string& path, const char* key, int& out,
                 bool required = false) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "required integer is missing");
            return false;
        }
        if (!it->is_number_integer()) {
            fail(path + "." + key, "must be an integer");
            return false;
        }
        out = it->get<int>();
        return true;
    }

    bool unsigned64(const ordered_json& obj, const std::string& path, const char* key,
                    std::uint64_t& out, bool required = false) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "required integer is missing");
            return false;
        }
        if (!it->is_number_integer() || (it->is_number_integer() && it->get<std::int64_t>() < 0 &&
                                         !it->is_number_unsigned())) {
            fail(path + "." + key, "must be a non-negative integer");
            return false;
        }
        out = it->get<std::uint64_t>();
        return true;
    }

    bool text(const ordered_json& obj, const std::string& path, const char* key, std::string& out,
              bool required = false) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "required string is missing");
            return false;
        }
        if (!it->is_string()) {
            fail(path + "." + key, "must be a string");
            return false;
        }
        out = it->get<std::string>();
        return true;
    }

    bool boolean(const ordered_json& obj, const std::string& path, const char* key, bool& out) {
        auto it = obj.find(key);
        if (it == obj.end()) return false;
        if (!it->is_boolean()) {
            fail(path + "." + key, "must be a boolean");
            return false;
        }
        out = it->get<bool>();
        return true;
    }

    bool numbers(const ordered_json& obj, const std::string& path, const char* key,
                 std::vector<double>& out, bool required = false) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(path + "." + key, "required array is missing");
            return false;
        }
        if (!it->is_array()) {
            fail(path + "." + key, "must be an array of numbers");
            return false;
        }
        out.clear();
        for (const auto& v : *it) {
            if (!v.is_number()) {
                fail(path + "." + key, "must be an array of numbers");
                return false;
            }
            out.push_back(v.get<double>());
        }
        return true;
    }

    bool one_of(const std::string& value, std::initializer_list<const char*> allowed) {
        for (const char* k : allowed)
            if (value == k) return true;
        return false;
    }
};

} // namespace detail

inline Manifest parse_manifest(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("manifest: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("manifest: top level must be an object");

    Manifest m;
    detail::ManifestScanner sc;
    sc.check_keys(j, "", {"experiment", "basis", "model", "time", "ensemble", "family", "entry",
                          "oracle", "output"});

    if (sc.text(j, "", "experiment", m.experiment, true)) {
        bool ok = false;
        for (const auto& k : experiment_kinds()) ok = ok || k == m.experiment;
        if (!ok) sc.fail(".experiment", "unknown experiment kind \"" + m.experiment + "\"");
    }

    if (const ordered_json* basis = sc.section(j, "basis", true)) {
        sc.check_keys(*basis, "basis", {"L", "N", "Q"});
        sc.number(*basis, "basis", "L", m.L);
        if (sc.integer(*basis, "basis", "N", m.N, true) && m.N < 1)
            sc.fail("basis.N", "must be at least 1");
        if (sc.integer(*basis, "basis", "Q", m.Q) && m.Q < 2 * m.N)
            sc.fail("basis.Q", "must be at least 2 N");
        if (!(m.L > 0.0)) sc.fail("basis.L", "must be positive");
    }

    if (const ordered_json* model = sc.section(j, "model", true)) {
        sc.check_keys(*model, "model", {"mode", "a", "f", "sigma", "h", "rate", "eps"});
        std::string mode;
        if (sc.text(*model, "model", "mode", mode, true)) {
            if (mode == "deterministic") m.mode = Mode::deterministic;
            else if (mode == "stochastic") m.mode = Mode::stochastic;
            else sc.fail("model.mode", "must be \"deterministic\" or \"stochastic\"");
        }
        if (const ordered_json* a = sc.section(*model, "a", true)) {
            sc.check_keys(*a, "model.a", {"kind", "value", "m", "M"});
            if (sc.text(*a, "model.a", "kind", m.a.kind, true) &&
                !sc.one_of(m.a.kind, {"constant", "saturating"}))
                sc.fail("model.a.kind", "must be \"constant\" or \"saturating\"");
            sc.number(*a, "model.a", "value", m.a.value, m.a.kind == "constant");
            sc.number(*a, "model.a", "m", m.a.m, m.a.kind == "saturating");
            sc.number(*a, "model.a", "M", m.a.M, m.a.kind == "saturating");
            if (m.a.kind == "constant" && !(m.a.value > 0.0))
                sc.fail("model.a.value", "must be positive");
            if (m.a.kind == "saturating" && !(m.a.m > 0.0 && m.a.m <= m.a.M))
                sc.fail("model.a", "saturating law needs 0 < m <= M");
        }
        if (const ordered_json* f = sc.section(*model, "f", true)) {
            sc.check_keys(*f, "model.f", {"kind", "slope", "kappa", "gain"});
            if (sc.text(*f, "model.f", "kind", m.f.kind, true) &&
                !sc.one_of(m.f.kind, {"linear", "cubic", "tanh"}))
                sc.fail("model.f.kind", "must be \"linear\", \"cubic\" or \"tanh\"");
            sc.number(*f, "model.f", "slope", m.f.slope,
                      m.f.kind == "linear" || m.f.kind == "cubic");
            sc.number(*f, "model.f", "kappa", m.f.kappa, m.f.kind == "cubic");
            sc.number(*f, "model.f", "gain", m.f.gain, m.f.kind == "tanh");
            if (m.f.kind == "cubic" && !(m.f.kappa > 0.0))
                sc.fail("model.f.kappa", "must be positive");
        }
        if (const ordered_json* s = sc.section(*model, "sigma")) {
            sc.check_keys(*s, "model.sigma", {"kind", "scale", "offset"});
            if (sc.text(*s, "model.sigma", "kind", m.sigma.kind, true) &&
                !sc.one_of(m.sigma.kind, {"zero", "affine", "sine"}))
                sc.fail("model.sigma.kind", "must be \"zero\", \"affine\" or \"sine\"");
            sc.number(*s, "model.sigma", "scale", m.sigma.scale, m.sigma.kind != "zero");
            sc.number(*s, "model.sigma", "offset", m.sigma.offset);
        }
        if (const ordered_json* h = sc.section(*model, "h")) {
            sc.check_keys(*h, "model.h", {"kind", "modes", "nu", "coeffs"});
            if (sc.text(*h, "model.h", "kind", m.h.kind, true) &&
                !sc.one_of(m.h.kind, {"zero", "constant", "exponential", "polynomial"}))
                sc.fail("model.h.kind",
                        "must be \"zero\", \"constant\", \"exponential\" or \"polynomial\"");
            sc.numbers(*h, "model.h", "modes", m.h.modes, m.h.kind != "zero");
            sc.number(*h, "model.h", "nu", m.h.nu, m.h.kind == "exponential");
            sc.numbers(*h, "model.h", "coeffs", m.h.coeffs, m.h.kind == "polynomial");
            if (m.h.kind == "polynomial" &&
                (m.h.coeffs.empty() || m.h.coeffs.size() > 8))
                sc.fail("model.h.coeffs", "envelope degree must be between 0 and 7");
        }
        const bool has_rate = sc.number(*model, "model", "rate", m.rate);
        const bool has_eps = sc.number(*model, "model", "eps", m.eps);
        if (!has_rate) m.rate = std::numeric_limits<double>::quiet_NaN();
        if (!has_eps) m.eps = std::numeric_limits<double>::quiet_NaN();
        if (has_rate && has_eps)
            sc.fail("model", "rate and eps are mutually exclusive");
        if (m.mode == Mode::deterministic && m.sigma.kind != "zero")
            sc.fail("model.sigma", "deterministic mode requires the zero noise law");
    }

    if (const ordered_json* time = sc.section(j, "time")) {
        sc.check_keys(*time, "time", {"tau", "T", "dt", "record_every"});
        sc.number(*time, "time", "tau", m.tau);
        sc.number(*time, "time", "T", m.T);
        sc.number(*time, "time", "dt", m.dt);
        sc.unsigned64(*time, "time", "record_every", m.record_every);
        if (!(m.dt > 0.0)) sc.fail("time.dt", "must be positive");
        if (!(m.T > m.tau)) sc.fail("time.T", "must exceed time.tau");
        if (m.record_every == 0) sc.fail("time.record_every", "must be positive");
    }

    if (const ordered_json* ens = sc.section(j, "ensemble")) {
        m.has_ensemble = true;
        sc.check_keys(*ens, "ensemble", {"paths", "master_seed"});
        if (sc.unsigned64(*ens, "ensemble", "paths", m.paths, true) && m.paths == 0)
            sc.fail("ensemble.paths", "must be positive");
        sc.unsigned64(*ens, "ensemble", "master_seed", m.master_seed);
    }

    if (const ordered_json* fam = sc.section(j, "family")) {
        m.has_family = true;
        sc.check_keys(*fam, "family", {"shape", "modes", "std", "profile"});
        if (sc.text(*fam, "family", "shape", m.family.shape, true) &&
            !sc.one_of(m.family.shape, {"point", "gaussian", "ball"}))
            sc.fail("family.shape", "must be \"point\", \"gaussian\" or \"ball\"");
        sc.numbers(*fam, "family", "modes", m.family.modes, m.family.shape == "point");
        sc.numbers(*fam, "family", "std", m.family.std, m.family.shape == "gaussian");
        if (m.family.shape == "ball") {
            if (const ordered_json* prof = sc.section(*fam, "profile", true)) {
                sc.check_keys(*prof, "family.profile", {"kind", "c", "degree", "k"});
                if (sc.text(*prof, "family.profile", "kind", m.family.profile.kind, true) &&
                    !sc.one_of(m.family.profile.kind, {"constant", "poly", "exp"}))
                    sc.fail("family.profile.kind", "must be \"constant\", \"poly\" or \"exp\"");
                sc.number(*prof, "family.profile", "c", m.family.profile.c, true);
                sc.number(*prof, "family.profile", "degree", m.family.profile.degree,
                          m.family.profile.kind == "poly");
                sc.number(*prof, "family.profile", "k", m.family.profile.k,
                          m.family.profile.kind == "exp");
            }
        } else if (fam->contains("profile")) {
            sc.fail("family.profile", "only the ball shape takes a radius profile");
        }
    }

    if (const ordered_json* entry = sc.section(j, "entry")) {
        m.has_entry = true;
        sc.check_keys(*entry, "entry", {"base", "factor", "cap", "target_time"});
        sc.number(*entry, "entry", "base", m.entry.base);
        sc.number(*entry, "entry", "factor", m.entry.factor);
        sc.number(*entry, "entry", "cap", m.entry.cap);
        sc.number(*entry, "entry", "target_time", m.entry.target_time);
        if (!(m.entry.base > 0.0)) sc.fail("entry.base", "must be positive");
        if (!(m.entry.factor > 1.0)) sc.fail("entry.factor", "must exceed 1");
        if (!(m.entry.cap >= m.entry.base)) sc.fail("entry.cap", "must be at least entry.base");
    }

    if (const ordered_json* oracle = sc.section(j, "oracle")) {
        m.has_oracle = true;
        sc.check_keys(*oracle, "oracle", {"kind"});
        if (sc.text(*oracle, "oracle", "kind", m.oracle_kind, true) &&
            !sc.one_of(m.oracle_kind, {"heat-mode", "linear-moment"}))
            sc.fail("oracle.kind", "must be \"heat-mode\" or \"linear-moment\"");
    }

    if (const ordered_json* out = sc.section(j, "output")) {
        sc.check_keys(*out, "output", {"dir", "plot"});
        sc.text(*out, "output", "dir", m.out_dir);
        sc.boolean(*out, "output", "plot", m.plot);
        if (m.out_dir.empty()) sc.fail("output.dir", "must not be empty");
    }

    if (!sc.errors.empty()) {
        std::string msg = "manifest: " + std::to_string(sc.errors.size()) + " problem(s):";
        for (const auto& e : sc.errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    if (m.Q == 0) m.Q = 4 * m.N;
    return m;
}

inline Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("manifest: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

inline ordered_json serialize_manifest(const Manifest& m) {
    ordered_json j;
    j["experiment"] = m.experiment;
    j["basis"] = {{"L", m.L}, {"N", m.N}, {"Q", m.Q > 0 ? m.Q : 4 * m.N}};

    ordered_json model;
    model["mode"] = to_string(m.mode);
    if (m.a.kind == "constant")
        model["a"] = {{"kind", "constant"}, {"value", m.a.value}};
    else
        model["a"] = {{"kind", "saturating"}, {"m", m.a.m}, {"M", m.a.M}};
    if (m.f.kind == "linear")
        model["f"] = {{"kind", "linear"}, {"slope", m.f.slope}};
    else if (m.f.kind == "cubic")
        model["f"] = {{"kind", "cubic"}, {"slope", m.f.slope}, {"kappa", m.f.kappa}};
    else
        model["f"] = {{"kind", "tanh"}, {"gain", m.f.gain}};
    if (m.sigma.kind == "zero")
        model["sigma"] = {{"kind", "zero"}};
    else
        model["sigma"] = {{"kind", m.sigma.kind}, {"scale", m.sigma.scale},
                          {"offset", m.sigma.offset}};
    if (m.h.kind == "zero") {
        model["h"] = {{"kind", "zero"}};
    } else {
        ordered_json h;
        h["kind"] = m.h.kind;
        h["modes"] = m.h.modes;
        if (m.h.kind == "exponential") h["nu"] = m.h.nu;
        if (m.h.kind == "polynomial") h["coeffs"] = m.h.coeffs;
        model["h"] = h;
    }
    if (std::isfinite(m.rate)) model["rate"] = m.rate;
    if (std::isfinite(m.eps)) model["eps"] = m.eps;
    j["model"] = model;

    j["time"] = {{"tau", m.tau}, {"T", m.T}, {"dt", m.dt}, {"record_every", m.record_every}};
    if (m.has_ensemble)
        j["ensemble"] = {{"paths", m.paths}, {"master_seed", m.master_seed}};
    if (m.has_family) {
        ordered_json fam;
        fam["shape"] = m.family.shape;
        if (m.family.shape == "point") fam["modes"] = m.family.modes;
        if (m.family.shape == "gaussian") fam["std"] = m.family.std;
        if (m.family.shape == "ball") {
            ordered_json prof;
            prof["kind"] = m.family.profile.kind;
            prof["c"] = m.family.profile.c;
            if (m.family.profile.kind == "poly") prof["degree"] = m.family.profile.degree;
            if (m.family.profile.kind == "exp") prof["k"] = m.family.profile.k;
            fam["profile"] = prof;
        }
        j["family"] = fam;
    }
    if (m.has_entry)
        j["entry"] = {{"base", m.entry.base}, {"factor", m.entry.factor}, {"cap", m.entry.cap},
                      {"target_time", m.entry.target_time}};
    if (m.has_oracle) j["oracle"] = {{"kind", m.oracle_kind}};
    j["output"] = {{"dir", m.out_dir}, {"plot", m.plot}};
    return j;
}

} // namespace mra
