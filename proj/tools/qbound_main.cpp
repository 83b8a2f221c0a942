// qbound CLI: exact chained-correlation predictions, hidden-variable bounds,
// coincidence-count simulation and analysis, and the nonsignaling-polytope
// LP explorer. Exit codes: 0 success, 1 runtime/IO failure, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbound/chained.hpp"
#include "qbound/experiment.hpp"
#include "qbound/hv.hpp"
#include "qbound/io.hpp"
#include "qbound/nonsignaling.hpp"
#include "qbound/qudit.hpp"
#include "qbound/rng.hpp"

namespace {

using namespace qbound;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_n_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const int n = std::stoi(text);
            if (n < 1) throw UsageError("--n must be >= 1");
            return {n};
        }
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (lo < 1 || hi < lo) throw UsageError("bad --n range '" + text + "'");
        std::vector<int> range;
        for (int n = lo; n <= hi; ++n) range.push_back(n);
        return range;
    } catch (const std::invalid_argument&) {
        throw UsageError("bad --n value '" + text + "'");
    } catch (const std::out_of_range&) {
        throw UsageError("bad --n value '" + text + "'");
    }
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    return file;
}

int run_predict(int d, const std::string& n_text, const std::string& out_path) {
    if (d < 2 || d > 16) throw UsageError("--d must be in [2, 16]");
    const auto range = parse_n_range(n_text);
    if (range.back() > 64) throw UsageError("--n must stay within [1, 64]");

    std::ofstream file;
    auto& out = open_output(file, out_path);
    const double gamma = gamma_constant(d);
    out << "# d=" << d << " gamma=" << format_double(gamma) << "\n";
    out << "N,exact,asymptotic\n";
    for (int n : range)
        out << n << ',' << format_double(ideal_in(d, n)) << ','
            << format_double(2.0 * gamma / n) << "\n";
    return 0;
}

int run_bounds(int d, const std::string& n_text, const std::string& out_path) {
    if (d < 2) throw UsageError("--d must be >= 2");
    const auto range = parse_n_range(n_text);
    if (range.size() != 1) throw UsageError("bounds takes a single --n");
    const int n = range.front();

    std::ofstream file;
    auto& out = open_output(file, out_path);
    out << "model,kind,n,bound\n";
    out << "bell,analytic," << n << ',' << format_double(bell_bound_analytic(d).bound) << "\n";
    try {
        const double brute = bell_bound_bruteforce(d, n).bound;
        out << "bell,brute-force," << n << ',' << format_double(brute) << "\n";
    } catch (const std::length_error&) {
        std::cerr << "note: brute-force bound skipped, d^(2N) exceeds the 10^7 guard\n";
    }
    if (d == 2) {
        out << "leggett-uniform-sphere,analytic," << n << ','
            << format_double(leggett_bound({n, LeggettU::uniform_sphere}).bound) << "\n";
        out << "leggett-fixed-in-plane,analytic," << n << ','
            << format_double(leggett_bound({n, LeggettU::fixed_in_plane}).bound) << "\n";
    }
    return 0;
}

ScanSummary summarize(int d, const MinimumScan& scan) {
    ScanSummary summary;
    summary.dim = d;
    summary.scan = scan;
    const double std_err = scan.scanned.at(scan.argmin_n).std_err;
    if (std_err > 0.0) {
        summary.margin_bm_analytic =
            violation_margin(scan.i_star, std_err, bell_bound_analytic(d));
        try {
            summary.margin_bm_bruteforce =
                violation_margin(scan.i_star, std_err, bell_bound_bruteforce(d, scan.argmin_n));
        } catch (const std::length_error&) {
        }
        if (d == 2)
            summary.margin_lm = violation_margin(
                scan.i_star, std_err, leggett_bound({scan.argmin_n, LeggettU::uniform_sphere}));
    }
    return summary;
}

struct SimulateConfig {
    int d = 2;
    std::string n_text = "2..6";
    std::uint64_t seed = 1;
    double visibility = 1.0;
    double target_istar = -1.0;  // > 0 fits the visibility to this value
    double rate = 1e6;
    double dark = 0.0;
    int half_width = 6;
    std::string shape = "exponential";
    double decay = 4.0;
    std::vector<int> modes;
    std::string method = "bootstrap";
    int resamples = 1000;
    std::string out_dir = "qbound_run";
    std::string format = "csv";
};

int run_simulate(const SimulateConfig& cfg) {
    if (cfg.d < 2 || cfg.d > 6) throw UsageError("--d must be in [2, 6] for simulation");
    const auto range = parse_n_range(cfg.n_text);
    if (cfg.rate <= 0.0 || cfg.dark < 0.0) throw UsageError("bad rate parameters");
    if (cfg.visibility <= 0.0 || cfg.visibility > 1.0)
        throw UsageError("--visibility must be in (0, 1]");
    if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv|json");
    if (cfg.method != "bootstrap" && cfg.method != "gaussian")
        throw UsageError("--method must be bootstrap|gaussian");
    if (cfg.method == "bootstrap" && cfg.resamples < 100)
        throw UsageError("--resamples must be >= 100 for the bootstrap");
    if (cfg.half_width < 0) throw UsageError("--half-width must be >= 0");
    if (cfg.decay <= 0.0) throw UsageError("--decay must be positive");

    SpiralSpectrum spec;
    spec.half_width = cfg.half_width;
    spec.shape = cfg.shape == "lorentzian" ? SpectrumShape::lorentzian : SpectrumShape::exponential;
    if (cfg.shape != "exponential" && cfg.shape != "lorentzian")
        throw UsageError("--spectrum must be exponential|lorentzian");
    spec.decay = cfg.decay;

    SubspaceSelection sel = cfg.modes.empty() ? default_subspace(cfg.d)
                                              : SubspaceSelection{cfg.d, cfg.modes};

    NoiseModel noise = NoiseModel::ideal(cfg.d, cfg.rate);
    noise.dark_rate = cfg.dark;
    noise.visibility =
        cfg.target_istar > 0.0 ? fit_visibility(cfg.d, range.back(), cfg.target_istar)
                               : cfg.visibility;

    const ErrorMethod method =
        cfg.method == "gaussian" ? ErrorMethod::gaussian : ErrorMethod::bootstrap;

    std::filesystem::create_directories(cfg.out_dir);
    const FileFormat format = cfg.format == "json" ? FileFormat::json : FileFormat::csv;

    ProtocolResult result = run_scan_protocol_detailed(spec, sel, noise, range, cfg.seed, method,
                                                       cfg.resamples);
    for (auto& [n, rec] : result.counts) {
        std::ostringstream meta;
        meta << "simulated d=" << cfg.d << " N=" << n << " visibility="
             << format_double(noise.visibility) << " seed=" << cfg.seed;
        rec.meta = meta.str();
        const std::string path = cfg.out_dir + "/counts_N" + std::to_string(n) +
                                 (format == FileFormat::json ? ".json" : ".csv");
        save_counts(rec, path, format);
    }
    const MinimumScan& scan = result.scan;

    {
        std::ofstream scan_file(cfg.out_dir + "/scan.csv");
        if (!scan_file) throw std::runtime_error("cannot write scan.csv");
        save_scan_csv(scan, scan_file);
    }
    const std::string summary = summary_to_json(summarize(cfg.d, scan));
    {
        std::ofstream summary_file(cfg.out_dir + "/summary.json");
        if (!summary_file) throw std::runtime_error("cannot write summary.json");
        summary_file << summary;
    }
    std::cout << summary;
    return 0;
}

int run_analyze(const std::vector<std::string>& files, const std::string& method_text,
                int resamples, std::uint64_t seed, const std::string& out_path) {
    if (files.empty()) throw UsageError("analyze needs at least one count file");
    if (method_text != "bootstrap" && method_text != "gaussian")
        throw UsageError("--method must be bootstrap|gaussian");
    if (method_text == "bootstrap" && resamples < 100)
        throw UsageError("--resamples must be >= 100 for the bootstrap");
    const ErrorMethod method =
        method_text == "gaussian" ? ErrorMethod::gaussian : ErrorMethod::bootstrap;

    int d = 0;
    std::map<int, ScanPoint> scan_points;
    for (const auto& path : files) {
        const CountRecord rec = load_counts_auto(path);
        if (d == 0) d = rec.dim;
        if (rec.dim != d)
            throw std::runtime_error("'" + path + "': dimension differs from the other files");
        if (scan_points.count(rec.n_settings))
            throw std::runtime_error("'" + path + "': duplicate N=" +
                                     std::to_string(rec.n_settings));
        const Estimate est = estimate_in(rec, method, resamples, derive_seed(seed, 0xe57, rec.n_settings));
        scan_points[rec.n_settings] = {est.value, est.std_err};
    }
    const ScanSummary summary = summarize(d, scan_minimum(d, scan_points));

    std::ofstream file;
    auto& out = open_output(file, out_path);
    out << summary_to_json(summary);
    return 0;
}

int run_polytope(int d, const std::string& n_text, int z, const std::string& caps_text,
                 const std::string& out_path) {
    const auto range = parse_n_range(n_text);
    if (range.size() != 1) throw UsageError("polytope takes a single --n");
    const int n = range.front();
    if (d < 2 || d > 4) throw UsageError("--d must be in [2, 4] for the LP explorer");
    if (z < 1) throw UsageError("--z must be >= 1");
    if (static_cast<long long>(d) * d * z * n * n > 4096)
        throw UsageError("LP size guard exceeded: d*d*z*N*N must be <= 4096");

    std::vector<double> caps;
    std::stringstream ss(caps_text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            caps.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw UsageError("bad --cap entry '" + field + "'");
        }
        if (caps.back() < 0.0) throw UsageError("--cap entries must be nonnegative");
    }
    if (caps.empty()) throw UsageError("--cap needs at least one value");

    std::ofstream file;
    auto& out = open_output(file, out_path);
    out << "i_cap,max_delta,bound\n";
    for (double cap : caps)
        out << format_double(cap) << ',' << format_double(lp_max_delta_all_patterns(d, n, z, cap))
            << ',' << format_double(d / 4.0 * cap) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chained-correlation predictions, hidden-variable bounds, and experiment analysis"};
    app.require_subcommand(1);

    int d = 2;
    std::string n_text = "1..12";
    std::string out_path;

    auto* predict = app.add_subcommand("predict", "exact quantum I_N and its 2*gamma/N asymptote");
    predict->add_option("--d", d, "dimension")->required();
    predict->add_option("--n", n_text, "settings count or range a..b")->required();
    predict->add_option("--out", out_path, "output file (default: stdout)");

    auto* bounds = app.add_subcommand("bounds", "hidden-variable model lower bounds on I_N");
    bounds->add_option("--d", d, "dimension")->required();
    bounds->add_option("--n", n_text, "settings count")->required();
    bounds->add_option("--out", out_path, "output file (default: stdout)");

    SimulateConfig sim;
    auto* simulate = app.add_subcommand("simulate", "simulate coincidence counts and estimate I*_N");
    simulate->add_option("--d", sim.d, "dimension")->required();
    simulate->add_option("--n", sim.n_text, "settings range a..b");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--visibility", sim.visibility, "isotropic-noise visibility in (0,1]");
    simulate->add_option("--target-istar", sim.target_istar,
                         "fit the visibility so the top-of-range I_N is this value");
    simulate->add_option("--rate", sim.rate, "expected coincidences per setting pair");
    simulate->add_option("--dark", sim.dark, "accidental coincidences per setting pair");
    simulate->add_option("--half-width", sim.half_width, "spectrum half width L");
    simulate->add_option("--spectrum", sim.shape, "exponential|lorentzian");
    simulate->add_option("--decay", sim.decay, "spectrum decay parameter");
    simulate->add_option("--modes", sim.modes, "subspace modes (default: per-d choice)")
        ->delimiter(',');
    simulate->add_option("--method", sim.method, "bootstrap|gaussian");
    simulate->add_option("--resamples", sim.resamples, "bootstrap resamples");
    simulate->add_option("--out", sim.out_dir, "output directory");
    simulate->add_option("--format", sim.format, "count file format csv|json");

    std::vector<std::string> analyze_files;
    std::string analyze_method = "bootstrap";
    int analyze_resamples = 1000;
    std::uint64_t analyze_seed = 1;
    auto* analyze = app.add_subcommand("analyze", "estimate I*_N and margins from count files");
    analyze->add_option("files", analyze_files, "count files (one per N)")->required();
    analyze->add_option("--method", analyze_method, "bootstrap|gaussian");
    analyze->add_option("--resamples", analyze_resamples, "bootstrap resamples");
    analyze->add_option("--seed", analyze_seed, "bootstrap seed");
    analyze->add_option("--out", out_path, "output file (default: stdout)");

    int z = 1;
    std::string caps_text = "0,0.25,0.5,0.75,1,1.25,1.5,1.75,2";
    auto* polytope = app.add_subcommand("polytope",
                                        "LP max of the marginal distance under an I_N cap");
    polytope->add_option("--d", d, "outcome alphabet")->required();
    polytope->add_option("--n", n_text, "settings count")->required();
    polytope->add_option("--z", z, "extra-outcome alphabet");
    polytope->add_option("--cap", caps_text, "comma-separated i_cap grid");
    polytope->add_option("--out", out_path, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (predict->parsed()) return run_predict(d, n_text, out_path);
        if (bounds->parsed()) return run_bounds(d, n_text, out_path);
        if (simulate->parsed()) return run_simulate(sim);
        if (analyze->parsed())
            return run_analyze(analyze_files, analyze_method, analyze_resamples, analyze_seed,
                               out_path);
        if (polytope->parsed()) return run_polytope(d, n_text, z, caps_text, out_path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
