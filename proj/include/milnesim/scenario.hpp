#pragma once

// Scenario files, the end-to-end pipeline and result exporters.
//
// A scenario is one JSON object:
//
//   {
//     "signal":  {"amplitude": 1, "sound_speed": 1480, "wave_number": 0.1},
//     "medium":  {"omega": {...profile...}, "beta": {...profile...}},
//     "time":    {"t0": 0, "t1": 2, "stride": 10},
//     "solver":  {"method": "fixed", "dt": 1e-3},
//     "initial_condition": {"p0": 1, "pdot0": 0},          optional
//     "dynamical_params":  {"E_M": 1, "delta": 0.3, "tau": 1}, optional
//     "environment": {"surface": {...}, "bathymetry": {...}}, optional
//     "seed": 42,
//     "outputs": ["trajectory", "summary", "envelope", "transition"]
//   }
//
// The signal takes exactly one of wave_number / wavelength / angular_frequency
// (several are accepted only when mutually consistent). Unknown keys are
// rejected and every problem found is reported at once.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "milnesim/acoustic_signal.hpp"
#include "milnesim/environment.hpp"
#include "milnesim/errors.hpp"
#include "milnesim/medium.hpp"
#include "milnesim/milne.hpp"
#include "milnesim/solver.hpp"
#include "milnesim/transition.hpp"

namespace milnesim {

enum class Product { trajectory, summary, envelope, transition, spectrum, bathymetry };

inline const char* to_string(Product p) {
    switch (p) {
    case Product::trajectory: return "trajectory";
    case Product::summary: return "summary";
    case Product::envelope: return "envelope";
    case Product::transition: return "transition";
    case Product::spectrum: return "spectrum";
    case Product::bathymetry: return "bathymetry";
    }
    return "unknown";
}

inline std::optional<Product> product_from_string(const std::string& s) {
    for (auto p : {Product::trajectory, Product::summary, Product::envelope, Product::transition,
                   Product::spectrum, Product::bathymetry})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

struct SignalInput {
    double amplitude = 1.0;
    double sound_speed = 1480.0;
    std::optional<double> wave_number;
    std::optional<double> wavelength;
    std::optional<double> angular_frequency;

    friend bool operator==(const SignalInput&, const SignalInput&) = default;
};

struct TimeConfig {
    double t0 = 0.0;
    double t1 = 2.0;
    std::size_t stride = 10;

    friend bool operator==(const TimeConfig&, const TimeConfig&) = default;
};

struct DynamicalParams {
    double energy = 1.0;
    double delta = 0.0;
    double tau = 1.0;

    friend bool operator==(const DynamicalParams&, const DynamicalParams&) = default;
};

struct SurfaceConfig {
    SurfaceSpectrumParams params;
    double k_min = 1e-3;
    double k_max = 10.0;
    std::size_t samples = 512;

    friend bool operator==(const SurfaceConfig&, const SurfaceConfig&) = default;
};

struct BathymetryConfig {
    double zeta_max = 10.0;
    double peak_spacing = 50.0;
    double length = 500.0;
    double dx = 1.0;

    friend bool operator==(const BathymetryConfig&, const BathymetryConfig&) = default;
};

struct ScenarioConfig {
    SignalInput signal_input;
    SignalSpec signal = SignalSpec::from_wave_number(1.0, 1480.0, 0.1);
    MediumSpec medium;
    TimeConfig time;
    MilneSolverOptions solver;
    std::optional<MilneState> initial_condition;
    std::optional<DynamicalParams> dynamical_params;
    std::optional<SurfaceConfig> surface;
    std::optional<BathymetryConfig> bathymetry;
    std::uint64_t seed = 0;
    std::vector<Product> outputs;

    bool requests(Product p) const {
        return std::find(outputs.begin(), outputs.end(), p) != outputs.end();
    }

    BathymetrySpec bathymetry_spec() const {
        const auto& b = bathymetry.value();
        return {b.zeta_max, b.peak_spacing, b.length, b.dx, seed};
    }

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

namespace detail {

using nlohmann::json;

inline std::size_t line_of(const std::string& text, std::size_t byte) {
    const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
    return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

// Collects every problem instead of stopping at the first.
class Reader {
public:
    explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

    void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : obj.items())
            if (!allowed.count(k)) issues_.push_back("unknown key '" + path + k + "'");
    }

    bool object(const json& obj, const std::string& path) {
        if (obj.is_object()) return true;
        issues_.push_back("'" + path + "' must be an object");
        return false;
    }

    std::optional<double> number(const json& obj, const char* key, const std::string& path) {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return std::nullopt;
        if (!it->is_number()) {
            issues_.push_back("'" + path + key + "' must be a number");
            return std::nullopt;
        }
        return it->get<double>();
    }

    double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
        return number(obj, key, path).value_or(fallback);
    }

    std::optional<double> required(const json& obj, const char* key, const std::string& path) {
        if (!obj.contains(key)) {
            issues_.push_back("missing required key '" + path + key + "'");
            return std::nullopt;
        }
        return number(obj, key, path);
    }

    std::optional<std::uint64_t> unsigned_int(const json& obj, const char* key,
                                              const std::string& path) {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return std::nullopt;
        if (!it->is_number_unsigned()) {
            issues_.push_back("'" + path + key + "' must be a non-negative integer");
            return std::nullopt;
        }
        return it->get<std::uint64_t>();
    }

    std::optional<std::string> string(const json& obj, const char* key, const std::string& path) {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) {
            issues_.push_back("'" + path + key + "' must be a string");
            return std::nullopt;
        }
        return it->get<std::string>();
    }

    std::optional<bool> boolean(const json& obj, const char* key, const std::string& path) {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return std::nullopt;
        if (!it->is_boolean()) {
            issues_.push_back("'" + path + key + "' must be true or false");
            return std::nullopt;
        }
        return it->get<bool>();
    }

    std::vector<std::string>& issues() { return issues_; }

private:
    std::vector<std::string>& issues_;
};

inline std::optional<ProfileKind> profile_kind_from(const std::string& s) {
    for (auto k : {ProfileKind::constant, ProfileKind::gaussian_bump, ProfileKind::sech2_bump,
                   ProfileKind::table})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

inline CoefficientProfile read_profile(Reader& r, const json& obj, const std::string& path,
                                       double default_base) {
    CoefficientProfile p = CoefficientProfile::constant(default_base);
    if (!r.object(obj, path)) return p;
    r.allow(obj, path + ".", {"kind", "base", "amplitude", "center", "width", "table"});
    const auto kind_name = r.string(obj, "kind", path + ".");
    if (!kind_name) {
        r.issues().push_back("missing required key '" + path + ".kind'");
        return p;
    }
    const auto kind = profile_kind_from(*kind_name);
    if (!kind) {
        r.issues().push_back("'" + path + ".kind' must be one of constant, gaussian-bump, sech2-bump, table");
        return p;
    }
    p.kind = *kind;
    p.base = r.number_or(obj, "base", path + ".", default_base);
    p.amplitude = r.number_or(obj, "amplitude", path + ".", 0.0);
    p.center = r.number_or(obj, "center", path + ".", 0.0);
    p.width = r.number_or(obj, "width", path + ".", 1.0);
    if (p.kind == ProfileKind::table) {
        auto it = obj.find("table");
        if (it == obj.end() || !it->is_array()) {
            r.issues().push_back("'" + path + ".table' must be an array of [t, value] pairs");
        } else {
            for (const auto& knot : *it) {
                if (!knot.is_array() || knot.size() != 2 || !knot[0].is_number() ||
                    !knot[1].is_number()) {
                    r.issues().push_back("'" + path + ".table' entries must be [t, value] pairs");
                    break;
                }
                p.table.emplace_back(knot[0].get<double>(), knot[1].get<double>());
            }
        }
        if (!obj.contains("base") && !p.table.empty()) p.base = p.table.front().second;
    } else if (obj.contains("table")) {
        r.issues().push_back("'" + path + ".table' is only valid for kind 'table'");
    }
    return p;
}

inline json profile_json(const CoefficientProfile& p) {
    json j;
    j["kind"] = to_string(p.kind);
    j["base"] = p.base;
    if (p.kind == ProfileKind::table) {
        json knots = json::array();
        for (const auto& [t, v] : p.table) knots.push_back({t, v});
        j["table"] = knots;
    } else if (p.is_bump()) {
        j["amplitude"] = p.amplitude;
        j["center"] = p.center;
        j["width"] = p.width;
    }
    return j;
}

inline bool consistent(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

} // namespace detail

inline const std::vector<Product>& default_outputs() {
    static const std::vector<Product> outs{Product::trajectory, Product::summary,
                                           Product::envelope, Product::transition};
    return outs;
}

inline ScenarioConfig load_config_json(const nlohmann::json& root) {
    using detail::json;
    std::vector<std::string> issues;
    detail::Reader r(issues);
    ScenarioConfig cfg;
    if (!root.is_object()) throw ValidationError({"scenario must be a JSON object"});
    r.allow(root, "", {"signal", "medium", "time", "solver", "initial_condition",
                       "dynamical_params", "environment", "seed", "outputs"});

    // signal
    if (!root.contains("signal")) {
        issues.push_back("missing required key 'signal'");
    } else if (const auto& js = root["signal"]; r.object(js, "signal")) {
        r.allow(js, "signal.", {"amplitude", "sound_speed", "wave_number", "wavelength",
                                "angular_frequency"});
        auto& in = cfg.signal_input;
        in.amplitude = r.number_or(js, "amplitude", "signal.", 1.0);
        in.sound_speed = r.number_or(js, "sound_speed", "signal.", 1480.0);
        in.wave_number = r.number(js, "wave_number", "signal.");
        in.wavelength = r.number(js, "wavelength", "signal.");
        in.angular_frequency = r.number(js, "angular_frequency", "signal.");
        const std::size_t before = issues.size();
        if (!(in.amplitude > 0)) issues.push_back("signal.amplitude must be positive");
        if (!(in.sound_speed > 0)) issues.push_back("signal.sound_speed must be positive");
        std::vector<std::pair<const char*, double>> ks;
        if (in.wave_number) ks.emplace_back("signal.wave_number", *in.wave_number);
        if (in.wavelength) ks.emplace_back("signal.wavelength", 2 * std::numbers::pi / *in.wavelength);
        if (in.angular_frequency && in.sound_speed > 0)
            ks.emplace_back("signal.angular_frequency", *in.angular_frequency / in.sound_speed);
        if (ks.empty()) {
            issues.push_back("signal needs one of wave_number, wavelength, angular_frequency");
        }
        for (const auto& [name, k] : ks)
            if (!(k > 0) || !std::isfinite(k)) issues.push_back(std::string(name) + " must be positive");
        for (std::size_t i = 1; i < ks.size(); ++i)
            if (!detail::consistent(ks[0].second, ks[i].second))
                issues.push_back(std::string("inconsistent ") + ks[0].first + " and " + ks[i].first +
                                 " (k = w/c = 2 pi / lambda)");
        if (issues.size() == before) {
            cfg.signal = SignalSpec::from_wave_number(in.amplitude, in.sound_speed, ks[0].second);
        }
    }

    // medium
    if (root.contains("medium")) {
        const auto& jm = root["medium"];
        if (r.object(jm, "medium")) {
            r.allow(jm, "medium.", {"omega", "beta", "zero_omega"});
            if (jm.contains("omega")) cfg.medium.omega = detail::read_profile(r, jm["omega"], "medium.omega", 1.0);
            if (jm.contains("beta")) cfg.medium.beta = detail::read_profile(r, jm["beta"], "medium.beta", 0.0);
            cfg.medium.zero_omega = r.boolean(jm, "zero_omega", "medium.").value_or(false);
        }
    }
    cfg.medium.sound_speed = cfg.signal_input.sound_speed;
    {
        auto more = medium_issues(cfg.medium);
        // sound speed is reported under signal.
        more.erase(std::remove(more.begin(), more.end(), std::string("sound_speed must be positive")), more.end());
        issues.insert(issues.end(), more.begin(), more.end());
    }

    // time
    if (root.contains("time")) {
        const auto& jt = root["time"];
        if (r.object(jt, "time")) {
            r.allow(jt, "time.", {"t0", "t1", "stride"});
            cfg.time.t0 = r.number_or(jt, "t0", "time.", cfg.time.t0);
            cfg.time.t1 = r.number_or(jt, "t1", "time.", cfg.time.t1);
            if (auto s = r.unsigned_int(jt, "stride", "time.")) cfg.time.stride = *s;
        }
    }
    if (!(cfg.time.t1 > cfg.time.t0)) issues.push_back("time.t1 must exceed time.t0");
    if (cfg.time.stride == 0) issues.push_back("time.stride must be positive");
    cfg.solver.stride = std::max<std::size_t>(cfg.time.stride, 1);

    // solver
    if (root.contains("solver")) {
        const auto& jv = root["solver"];
        if (r.object(jv, "solver")) {
            r.allow(jv, "solver.", {"method", "dt", "rtol", "atol", "blowup_threshold", "max_steps"});
            if (auto m = r.string(jv, "method", "solver.")) {
                if (*m == "fixed") cfg.solver.method = Method::fixed;
                else if (*m == "adaptive") cfg.solver.method = Method::adaptive;
                else issues.push_back("'solver.method' must be 'fixed' or 'adaptive'");
            }
            cfg.solver.dt = r.number_or(jv, "dt", "solver.", cfg.solver.dt);
            cfg.solver.rtol = r.number_or(jv, "rtol", "solver.", cfg.solver.rtol);
            cfg.solver.atol = r.number_or(jv, "atol", "solver.", cfg.solver.atol);
            cfg.solver.blowup_threshold = r.number(jv, "blowup_threshold", "solver.");
            if (auto n = r.unsigned_int(jv, "max_steps", "solver.")) cfg.solver.max_steps = *n;
        }
    }
    if (!(cfg.solver.dt > 0)) issues.push_back("solver.dt must be positive");
    if (!(cfg.solver.rtol > 0)) issues.push_back("solver.rtol must be positive");
    if (!(cfg.solver.atol > 0)) issues.push_back("solver.atol must be positive");
    if (cfg.solver.blowup_threshold && !(*cfg.solver.blowup_threshold > 0))
        issues.push_back("solver.blowup_threshold must be positive");
    if (cfg.solver.max_steps == 0) issues.push_back("solver.max_steps must be positive");

    if (root.contains("initial_condition")) {
        const auto& ji = root["initial_condition"];
        if (r.object(ji, "initial_condition")) {
            r.allow(ji, "initial_condition.", {"p0", "pdot0"});
            auto p0 = r.required(ji, "p0", "initial_condition.");
            auto v0 = r.required(ji, "pdot0", "initial_condition.");
            if (p0 && v0) cfg.initial_condition = MilneState{*p0, *v0};
        }
    }

    if (root.contains("dynamical_params")) {
        const auto& jd = root["dynamical_params"];
        if (r.object(jd, "dynamical_params")) {
            r.allow(jd, "dynamical_params.", {"E_M", "delta", "tau"});
            auto e = r.required(jd, "E_M", "dynamical_params.");
            auto d = r.required(jd, "delta", "dynamical_params.");
            auto t = r.required(jd, "tau", "dynamical_params.");
            if (t && !(*t > 0)) issues.push_back("dynamical_params.tau must be positive");
            if (e && d && t) cfg.dynamical_params = DynamicalParams{*e, *d, *t};
        }
    }

    if (root.contains("environment")) {
        const auto& je = root["environment"];
        if (r.object(je, "environment")) {
            r.allow(je, "environment.", {"surface", "bathymetry"});
            if (je.contains("surface") && r.object(je["surface"], "environment.surface")) {
                const auto& js = je["surface"];
                const std::string path = "environment.surface.";
                r.allow(js, path, {"alpha", "beta", "gravity", "wind_speed", "k_min", "k_max", "samples"});
                SurfaceConfig s;
                s.params.alpha = r.number_or(js, "alpha", path, s.params.alpha);
                s.params.beta = r.number_or(js, "beta", path, s.params.beta);
                s.params.gravity = r.number_or(js, "gravity", path, s.params.gravity);
                if (auto u = r.required(js, "wind_speed", path)) s.params.wind_speed = *u;
                s.k_min = r.number_or(js, "k_min", path, s.k_min);
                s.k_max = r.number_or(js, "k_max", path, s.k_max);
                if (auto n = r.unsigned_int(js, "samples", path)) s.samples = *n;
                for (auto& msg : spectrum_issues(s.params)) issues.push_back("environment." + msg);
                if (!(s.k_min > 0) || !(s.k_max > s.k_min))
                    issues.push_back("environment.surface needs 0 < k_min < k_max");
                if (s.samples < 2) issues.push_back("environment.surface.samples must be at least 2");
                cfg.surface = s;
            }
            if (je.contains("bathymetry") && r.object(je["bathymetry"], "environment.bathymetry")) {
                const auto& jb = je["bathymetry"];
                const std::string path = "environment.bathymetry.";
                r.allow(jb, path, {"zeta_max", "lh", "length", "dx"});
                BathymetryConfig b;
                if (auto v = r.required(jb, "zeta_max", path)) b.zeta_max = *v;
                if (auto v = r.required(jb, "lh", path)) b.peak_spacing = *v;
                if (auto v = r.required(jb, "length", path)) b.length = *v;
                b.dx = r.number_or(jb, "dx", path, b.dx);
                for (auto& msg : bathymetry_issues({b.zeta_max, b.peak_spacing, b.length, b.dx, 0}))
                    issues.push_back("environment." + msg);
                cfg.bathymetry = b;
            }
        }
    }

    if (auto s = r.unsigned_int(root, "seed", "")) cfg.seed = *s;

    if (root.contains("outputs")) {
        const auto& jo = root["outputs"];
        if (!jo.is_array()) {
            issues.push_back("'outputs' must be an array of product names");
        } else {
            for (const auto& item : jo) {
                auto p = item.is_string() ? product_from_string(item.get<std::string>()) : std::nullopt;
                if (!p) {
                    issues.push_back("unknown product in outputs: " + item.dump());
                    continue;
                }
                if (cfg.requests(*p))
                    issues.push_back(std::string("product listed twice in outputs: ") + to_string(*p));
                else
                    cfg.outputs.push_back(*p);
            }
        }
    } else {
        cfg.outputs = default_outputs();
    }
    if (cfg.requests(Product::spectrum) && !cfg.surface)
        issues.push_back("outputs requests 'spectrum' but environment.surface is missing");
    if (cfg.requests(Product::bathymetry) && !cfg.bathymetry)
        issues.push_back("outputs requests 'bathymetry' but environment.bathymetry is missing");

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return cfg;
}

inline ScenarioConfig load_config(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario parse error: ") + e.what(),
                         detail::line_of(text, e.byte), "");
    }
    return load_config_json(root);
}

inline ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

inline nlohmann::json config_json(const ScenarioConfig& cfg) {
    using detail::json;
    json j;
    const auto& in = cfg.signal_input;
    json sig = {{"amplitude", in.amplitude}, {"sound_speed", in.sound_speed}};
    if (in.wave_number) sig["wave_number"] = *in.wave_number;
    if (in.wavelength) sig["wavelength"] = *in.wavelength;
    if (in.angular_frequency) sig["angular_frequency"] = *in.angular_frequency;
    j["signal"] = sig;
    json med = {{"omega", detail::profile_json(cfg.medium.omega)},
                {"beta", detail::profile_json(cfg.medium.beta)}};
    if (cfg.medium.zero_omega) med["zero_omega"] = true;
    j["medium"] = med;
    j["time"] = {{"t0", cfg.time.t0}, {"t1", cfg.time.t1}, {"stride", cfg.time.stride}};
    json sv = {{"method", cfg.solver.method == Method::fixed ? "fixed" : "adaptive"},
               {"dt", cfg.solver.dt},
               {"rtol", cfg.solver.rtol},
               {"atol", cfg.solver.atol},
               {"max_steps", cfg.solver.max_steps}};
    if (cfg.solver.blowup_threshold) sv["blowup_threshold"] = *cfg.solver.blowup_threshold;
    j["solver"] = sv;
    if (cfg.initial_condition)
        j["initial_condition"] = {{"p0", cfg.initial_condition->p}, {"pdot0", cfg.initial_condition->p_dot}};
    if (cfg.dynamical_params)
        j["dynamical_params"] = {{"E_M", cfg.dynamical_params->energy},
                                 {"delta", cfg.dynamical_params->delta},
                                 {"tau", cfg.dynamical_params->tau}};
    if (cfg.surface || cfg.bathymetry) {
        json env = json::object();
        if (const auto& s = cfg.surface)
            env["surface"] = {{"alpha", s->params.alpha},     {"beta", s->params.beta},
                              {"gravity", s->params.gravity}, {"wind_speed", s->params.wind_speed},
                              {"k_min", s->k_min},            {"k_max", s->k_max},
                              {"samples", s->samples}};
        if (const auto& b = cfg.bathymetry)
            env["bathymetry"] = {{"zeta_max", b->zeta_max}, {"lh", b->peak_spacing},
                                 {"length", b->length},     {"dx", b->dx}};
        j["environment"] = env;
    }
    j["seed"] = cfg.seed;
    json outs = json::array();
    for (auto p : cfg.outputs) outs.push_back(to_string(p));
    j["outputs"] = outs;
    return j;
}

inline std::string save_config(const ScenarioConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

struct TransitionSample {
    double t = 0.0;
    TransitionMatrix composed;
    TransitionMatrix expanded;
    double discrepancy = 0.0;
};

struct ProductRecord {
    Product product;
    bool present = false;
    std::string skip_reason;
};

struct ScenarioResult {
    ScenarioConfig config;
    std::optional<solver::Trajectory> trajectory;
    std::optional<SignalSummary> summary;
    // Milne energy evaluated on the last trajectory sample.
    std::optional<double> final_energy;
    std::vector<EnvelopeSample> envelope;
    std::vector<TransitionSample> transitions;
    std::vector<SpectrumPoint> spectrum;
    std::vector<BathymetrySample> bathymetry;
    std::vector<ProductRecord> products;

    const ProductRecord* record(Product p) const {
        for (const auto& r : products)
            if (r.product == p) return &r;
        return nullptr;
    }
    bool has(Product p) const {
        const auto* r = record(p);
        return r && r->present;
    }
    bool any_skipped() const {
        return std::any_of(products.begin(), products.end(), [](const auto& r) { return !r.present; });
    }
};

// Envelope/transition sample times when no trajectory was integrated.
inline std::vector<double> sample_grid(const ScenarioConfig& cfg) {
    std::vector<double> ts;
    const double step = cfg.solver.dt * static_cast<double>(cfg.time.stride);
    const auto n = static_cast<std::size_t>(std::ceil((cfg.time.t1 - cfg.time.t0) / step - 1e-9));
    for (std::size_t i = 0; i < n; ++i) ts.push_back(cfg.time.t0 + static_cast<double>(i) * step);
    ts.push_back(cfg.time.t1);
    return ts;
}

inline PeriodPhaseOptions period_options_for(const MediumSpec& m) {
    PeriodPhaseOptions o;
    if (m.omega.is_bump() && !m.zero_omega) {
        o.exclude_center = m.omega.center;
        o.exclude_half_width = 5 * m.omega.width;
    }
    return o;
}

inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.config = cfg;
    const bool wants_params = cfg.requests(Product::summary) || cfg.requests(Product::envelope) ||
                              cfg.requests(Product::transition);
    const bool integrate = cfg.requests(Product::trajectory) || (wants_params && !cfg.dynamical_params);

    if (integrate) {
        res.trajectory = integrate_milne(cfg.signal, cfg.medium, {cfg.time.t0, cfg.time.t1},
                                         cfg.initial_condition, cfg.solver);
        const auto& tr = *res.trajectory;
        if (!tr.empty())
            res.final_energy = milne_energy({tr.states.back()[0], tr.states.back()[1]}, cfg.signal,
                                            cfg.medium, tr.times.back());
    }

    std::string summary_reason;
    if (cfg.dynamical_params) {
        const auto& d = *cfg.dynamical_params;
        res.summary = make_summary(d.energy, d.tau, d.delta, ParamSource::supplied);
    } else if (res.trajectory) {
        try {
            const auto pp = estimate_period_phase(*res.trajectory, period_options_for(cfg.medium));
            if (!res.final_energy) throw InsufficientData("empty trajectory");
            res.summary = make_summary(*res.final_energy, pp.tau, pp.delta, ParamSource::computed);
        } catch (const Error& e) {
            summary_reason = e.what();
        }
    }

    const std::vector<double> times = res.trajectory ? res.trajectory->times : sample_grid(cfg);
    std::map<Product, std::string> skipped;

    if (cfg.requests(Product::envelope)) {
        if (!res.summary) {
            skipped[Product::envelope] = "summary unavailable: " + summary_reason;
        } else {
            try {
                for (double t : times)
                    res.envelope.push_back(envelope_q(res.summary->energy, res.summary->tau,
                                                      cfg.signal, cfg.medium, t));
            } catch (const Error& e) {
                res.envelope.clear();
                skipped[Product::envelope] = e.what();
            }
        }
    }
    if (cfg.requests(Product::transition)) {
        if (!res.summary) {
            skipped[Product::transition] = "summary unavailable: " + summary_reason;
        } else {
            try {
                const auto& s = *res.summary;
                for (double t : times) {
                    auto cmp = compare_forms(s.energy, s.delta, s.tau, cfg.signal, cfg.medium, t);
                    res.transitions.push_back({t, cmp.composed, cmp.expanded, cmp.discrepancy});
                }
            } catch (const Error& e) {
                res.transitions.clear();
                skipped[Product::transition] = e.what();
            }
        }
    }
    if (cfg.requests(Product::summary) && !res.summary) skipped[Product::summary] = summary_reason;
    if (cfg.requests(Product::spectrum)) {
        const auto& s = *cfg.surface;
        res.spectrum = spectrum_sweep(s.params, s.k_min, s.k_max, s.samples);
    }
    if (cfg.requests(Product::bathymetry)) res.bathymetry = bathymetry_profile(cfg.bathymetry_spec());

    for (auto p : cfg.outputs) {
        auto it = skipped.find(p);
        res.products.push_back({p, it == skipped.end(), it == skipped.end() ? "" : it->second});
    }
    return res;
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

// Header row then one row per sample; numbers carry 17 significant digits.
inline void write_csv(const ScenarioResult& res, Product p, std::ostream& os) {
    const auto* rec = res.record(p);
    if (!rec) throw NotComputed(std::string(to_string(p)) + " was not requested");
    if (!rec->present)
        throw NotComputed(std::string(to_string(p)) + " was not computed: " + rec->skip_reason);
    using detail::fmt17;
    switch (p) {
    case Product::trajectory: {
        os << "t,p,p_dot\n";
        const auto& tr = *res.trajectory;
        for (std::size_t i = 0; i < tr.size(); ++i)
            os << fmt17(tr.times[i]) << ',' << fmt17(tr.states[i][0]) << ','
               << fmt17(tr.states[i][1]) << '\n';
        break;
    }
    case Product::envelope:
        os << "t,q_squared,magnitude,imaginary_branch\n";
        for (const auto& e : res.envelope)
            os << fmt17(e.t) << ',' << fmt17(e.q_squared) << ',' << fmt17(e.magnitude) << ','
               << (e.imaginary_branch ? "true" : "false") << '\n';
        break;
    case Product::transition:
        os << "t,m11,m12,m21,m22,provenance,discrepancy\n";
        for (const auto& s : res.transitions) {
            for (const auto* m : {&s.composed, &s.expanded})
                os << fmt17(s.t) << ',' << fmt17(m->m(0, 0)) << ',' << fmt17(m->m(0, 1)) << ','
                   << fmt17(m->m(1, 0)) << ',' << fmt17(m->m(1, 1)) << ',' << to_string(m->provenance)
                   << ',' << fmt17(s.discrepancy) << '\n';
        }
        break;
    case Product::spectrum:
        os << "k,S\n";
        for (const auto& s : res.spectrum) os << fmt17(s.k) << ',' << fmt17(s.S) << '\n';
        break;
    case Product::bathymetry:
        os << "x,zeta\n";
        for (const auto& b : res.bathymetry) os << fmt17(b.x) << ',' << fmt17(b.zeta) << '\n';
        break;
    case Product::summary: {
        const auto& s = *res.summary;
        os << "E_M,tau,delta,source,e_m_bound_violated\n"
           << fmt17(s.energy) << ',' << fmt17(s.tau) << ',' << fmt17(s.delta) << ','
           << (s.source == ParamSource::supplied ? "supplied" : "computed") << ','
           << (s.e_m_bound_violated ? "true" : "false") << '\n';
        break;
    }
    }
}

inline void export_csv(const ScenarioResult& res, Product p, const std::string& path) {
    std::ostringstream os;
    write_csv(res, p, os);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << os.str();
}

inline std::size_t product_rows(const ScenarioResult& res, Product p) {
    switch (p) {
    case Product::trajectory: return res.trajectory ? res.trajectory->size() : 0;
    case Product::summary: return res.summary ? 1 : 0;
    case Product::envelope: return res.envelope.size();
    case Product::transition: return 2 * res.transitions.size();
    case Product::spectrum: return res.spectrum.size();
    case Product::bathymetry: return res.bathymetry.size();
    }
    return 0;
}

inline nlohmann::json result_json(const ScenarioResult& res) {
    using detail::json;
    json j;
    j["schema_version"] = "1";
    j["config"] = config_json(res.config);

    json sv;
    if (res.trajectory) {
        const auto& tr = *res.trajectory;
        sv["integrated"] = true;
        sv["status"] = solver::to_string(tr.status);
        sv["message"] = tr.message;
        sv["steps"] = tr.steps;
        sv["samples"] = tr.size();
        sv["last_finite_time"] = tr.empty() ? json(nullptr) : json(tr.times.back());
        sv["abort_time"] = tr.abort_time ? json(*tr.abort_time) : json(nullptr);
    } else {
        sv["integrated"] = false;
        sv["status"] = "not-run";
    }
    j["solver"] = sv;

    if (res.summary) {
        const auto& s = *res.summary;
        j["summary"] = {{"E_M", s.energy},
                        {"tau", s.tau},
                        {"delta", s.delta},
                        {"source", s.source == ParamSource::supplied ? "supplied" : "computed"},
                        {"flags", {{"e_m_bound_violated", s.e_m_bound_violated}}}};
    } else {
        j["summary"] = nullptr;
    }
    j["final_milne_energy"] = res.final_energy ? json(*res.final_energy) : json(nullptr);

    json prods = json::array();
    for (const auto& r : res.products) {
        json pj = {{"name", to_string(r.product)}, {"status", r.present ? "present" : "skipped"}};
        if (r.present) {
            pj["rows"] = product_rows(res, r.product);
        } else {
            pj["reason"] = r.skip_reason;
        }
        prods.push_back(pj);
    }
    j["products"] = prods;
    return j;
}

inline void export_json(const ScenarioResult& res, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << result_json(res).dump(2) << '\n';
}

} // namespace milnesim
