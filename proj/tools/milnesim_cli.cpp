// milnesim command-line front end.
//
//   milnesim simulate   --config <path> [--out-dir <dir>] [--seed <u64>]
//   milnesim spectrum   --wind-speed <f> [--k-min <f>] [--k-max <f>] [--samples <n>] [--out <path>]
//   milnesim bathymetry --zeta-max <f> --lh <f> --length <f> [--dx <f>] [--seed <u64>] [--out <path>]
//   milnesim envelope   --em <f> --tau <f> --config <path> [--t0 <f>] [--t1 <f>] [--out <path>]
//   milnesim transition --em <f> --delta <f> --tau <f> --t <f> --config <path>
//
// Exit codes: 0 success, 1 validation error, 2 runtime error (partial outputs written).

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "milnesim/environment.hpp"
#include "milnesim/milne.hpp"
#include "milnesim/scenario.hpp"
#include "milnesim/transition.hpp"

namespace fs = std::filesystem;
using namespace milnesim;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    auto cfg = load_config_file(config_path);
    if (seed) cfg.seed = *seed;
    const auto res = run_scenario(cfg);

    fs::create_directories(out_dir);
    for (const auto& rec : res.products) {
        if (!rec.present) {
            std::cerr << "skipped " << to_string(rec.product) << ": " << rec.skip_reason << '\n';
            continue;
        }
        if (rec.product == Product::summary) continue; // lives in result.json
        export_csv(res, rec.product, (fs::path(out_dir) / (std::string(to_string(rec.product)) + ".csv")).string());
    }
    export_json(res, (fs::path(out_dir) / "result.json").string());

    if (res.trajectory)
        std::cout << "trajectory: " << solver::to_string(res.trajectory->status) << ", "
                  << res.trajectory->size() << " samples\n";
    if (res.summary)
        std::cout << "E_M=" << fmt17(res.summary->energy) << " tau=" << fmt17(res.summary->tau)
                  << " delta=" << fmt17(res.summary->delta)
                  << (res.summary->e_m_bound_violated ? " (E_M < 1)" : "") << '\n';
    return res.any_skipped() ? kRuntime : kOk;
}

int run_spectrum(double wind, double k_min, double k_max, std::size_t samples, const std::string& out) {
    SurfaceSpectrumParams p;
    p.wind_speed = wind;
    if (auto issues = spectrum_issues(p); !issues.empty()) throw ValidationError(issues);
    std::ostringstream os;
    os << "k,S\n";
    for (const auto& s : spectrum_sweep(p, k_min, k_max, samples))
        os << fmt17(s.k) << ',' << fmt17(s.S) << '\n';
    write_text(out, os.str());
    return kOk;
}

int run_bathymetry(const BathymetrySpec& spec, const std::string& out) {
    std::ostringstream os;
    os << "x,zeta\n";
    for (const auto& s : bathymetry_profile(spec)) os << fmt17(s.x) << ',' << fmt17(s.zeta) << '\n';
    write_text(out, os.str());
    return kOk;
}

int run_envelope(double em, double tau, const std::string& config_path, std::optional<double> t0,
                 std::optional<double> t1, const std::string& out) {
    auto cfg = load_config_file(config_path);
    if (t0) cfg.time.t0 = *t0;
    if (t1) cfg.time.t1 = *t1;
    if (!(cfg.time.t1 > cfg.time.t0)) throw ValidationError({"--t1 must exceed --t0"});
    if (!(tau > 0)) throw ValidationError({"--tau must be positive"});

    std::ostringstream os;
    os << "t,q_squared,magnitude,imaginary_branch\n";
    int code = kOk;
    for (double t : sample_grid(cfg)) {
        try {
            const auto e = envelope_q(em, tau, cfg.signal, cfg.medium, t);
            os << fmt17(e.t) << ',' << fmt17(e.q_squared) << ',' << fmt17(e.magnitude) << ','
               << (e.imaginary_branch ? "true" : "false") << '\n';
        } catch (const SingularityError& e) {
            std::cerr << e.what() << '\n';
            code = kRuntime;
            break;
        }
    }
    write_text(out, os.str());
    return code;
}

void print_matrix(std::ostream& os, const char* label, const Matrix2& m) {
    os << label << ":\n"
       << "  " << fmt17(m(0, 0)) << "  " << fmt17(m(0, 1)) << '\n'
       << "  " << fmt17(m(1, 0)) << "  " << fmt17(m(1, 1)) << '\n';
}

int run_transition(double em, double delta, double tau, double t, const std::string& config_path) {
    const auto cfg = load_config_file(config_path);
    const auto cmp = compare_forms(em, delta, tau, cfg.signal, cfg.medium, t);
    print_matrix(std::cout, "composed", cmp.composed.m);
    print_matrix(std::cout, "expanded", cmp.expanded.m);
    std::cout << "discrepancy: " << fmt17(cmp.discrepancy) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acoustic signal propagation through a parametric-oscillator medium"};
    app.require_subcommand(1);

    std::string config, out_dir = ".", out;
    std::optional<std::uint64_t> seed;

    auto* sim = app.add_subcommand("simulate", "Run the full scenario pipeline");
    sim->add_option("--config", config, "Scenario JSON file")->required();
    sim->add_option("--out-dir", out_dir, "Directory for CSV/JSON outputs");
    sim->add_option("--seed", seed, "Override the scenario seed");

    double wind = 0, k_min = 1e-3, k_max = 10.0;
    std::size_t samples = 512;
    auto* spec = app.add_subcommand("spectrum", "Sweep the sea-surface spectrum S(k)");
    spec->add_option("--wind-speed", wind, "Wind speed at 19.5 m (m/s)")->required();
    spec->add_option("--k-min", k_min, "Smallest wavenumber (rad/m)");
    spec->add_option("--k-max", k_max, "Largest wavenumber (rad/m)");
    spec->add_option("--samples", samples, "Number of log-spaced samples");
    spec->add_option("--out", out, "Output CSV (stdout when omitted)");

    BathymetrySpec bathy;
    auto* bat = app.add_subcommand("bathymetry", "Generate a procedural seafloor profile");
    bat->add_option("--zeta-max", bathy.zeta_max, "Maximum hill elevation (m)")->required();
    bat->add_option("--lh", bathy.peak_spacing, "Distance between adjacent peaks (m)")->required();
    bat->add_option("--length", bathy.length, "Profile length (m)")->required();
    bat->add_option("--dx", bathy.dx, "Sample spacing (m)");
    bat->add_option("--seed", bathy.seed, "PRNG seed");
    bat->add_option("--out", out, "Output CSV (stdout when omitted)");

    double em = 0, tau = 0, delta = 0, t = 0;
    std::optional<double> t0, t1;
    auto* env = app.add_subcommand("envelope", "Sweep the envelope q^2(t)");
    env->add_option("--em", em, "Milne energy E_M")->required();
    env->add_option("--tau", tau, "Effective period")->required();
    env->add_option("--config", config, "Scenario JSON providing signal and medium")->required();
    env->add_option("--t0", t0, "Sweep start (defaults to the scenario's t0)");
    env->add_option("--t1", t1, "Sweep end (defaults to the scenario's t1)");
    env->add_option("--out", out, "Output CSV (stdout when omitted)");

    auto* tr = app.add_subcommand("transition", "Print both transition-matrix forms");
    tr->add_option("--em", em, "Milne energy E_M")->required();
    tr->add_option("--delta", delta, "Effective phase shift")->required();
    tr->add_option("--tau", tau, "Effective period")->required();
    tr->add_option("--t", t, "Evaluation time")->required();
    tr->add_option("--config", config, "Scenario JSON providing signal and medium")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*sim) return run_simulate(config, out_dir, seed);
        if (*spec) return run_spectrum(wind, k_min, k_max, samples, out);
        if (*bat) return run_bathymetry(bathy, out);
        if (*env) return run_envelope(em, tau, config, t0, t1, out);
        if (*tr) return run_transition(em, delta, tau, t, config);
    } catch (const ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        std::cerr << e.what() << " (line " << e.line << ")\n";
        return kValidation;
    } catch (const DomainError& e) {
        std::cerr << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
