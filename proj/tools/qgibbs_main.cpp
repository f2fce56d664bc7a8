// Batch front-end: config validation, experiment dispatch, artifact output.
//
// Exit codes: 0 all pass flags true, 1 experiment failure, 2 config/schema
// violation, 3 numerical abort.

#include "qgibbs/config.hpp"
#include "qgibbs/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace qgibbs;

namespace {

int thread_count_from_env() {
    if (const char* e = std::getenv("QGIBBS_THREADS")) {
        const int n = std::atoi(e);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void print_diags(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        std::cerr << (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ")
                  << d.field << ": " << d.message << "\n";
}

std::optional<RawConfig> load_raw(const std::string& path,
                                  const std::vector<std::string>& overrides,
                                  std::vector<Diagnostic>& diags) {
    RawConfig raw;
    if (path.empty()) {
        raw = default_raw_config();
    } else {
        std::ifstream in(path);
        if (!in) {
            diags.push_back({Diagnostic::Severity::Error, "config", "cannot open '" + path + "'"});
            return std::nullopt;
        }
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        raw = parse_config_text(text, diags);
    }
    for (const auto& o : overrides) apply_override(raw, o, diags);
    return raw;
}

/// Fresh run directory: <out_dir>/<UTC stamp>-<experiment>[-k]; never reuses
/// an existing one.
fs::path fresh_run_dir(const std::string& out_dir, const std::string& experiment) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%SZ", std::gmtime(&t));
    fs::path base = fs::path(out_dir) / (std::string(stamp) + "-" + experiment);
    fs::path dir = base;
    for (int k = 1; fs::exists(dir); ++k) dir = base.concat("-" + std::to_string(k));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

int run_command(const std::string& config_path, const std::vector<std::string>& overrides,
                const std::string& experiment_flag, std::optional<long> seed_flag,
                const std::string& out_dir_flag) {
    std::vector<Diagnostic> diags;
    auto raw = load_raw(config_path, overrides, diags);
    if (raw && !experiment_flag.empty()) (*raw).sections["run"]["experiment"] = experiment_flag;
    if (raw && seed_flag) (*raw).sections["run"]["seed"] = std::to_string(*seed_flag);
    if (raw && !out_dir_flag.empty()) (*raw).sections["run"]["out_dir"] = out_dir_flag;
    RunConfig cfg;
    if (raw) cfg = interpret_config(*raw, diags);
    print_diags(diags);
    if (!raw || has_errors(diags)) return 2;

    const int threads = thread_count_from_env();
    std::vector<std::string> names;
    if (cfg.experiment == "all")
        names = {"invariance", "conservation", "chaos", "regularity", "residual"};
    else
        names = {cfg.experiment};

    GibbsParams params = cfg.make_params();
    std::vector<Report> reports;
    try {
        for (const auto& name : names) {
            std::cerr << "running " << name << " ...\n";
            if (name == "invariance")
                reports.push_back(invariance_experiment(params, cfg.invariance, cfg.seed, threads));
            else if (name == "conservation")
                reports.push_back(conservation_experiment(params, cfg.conservation, cfg.seed));
            else if (name == "chaos")
                reports.push_back(chaos_experiment(params, cfg.chaos, cfg.seed, threads));
            else if (name == "regularity")
                reports.push_back(regularity_experiment(cfg.regularity));
            else if (name == "residual")
                reports.push_back(residual_experiment(params, cfg.residual, cfg.seed));
            std::cerr << "  " << (reports.back().pass ? "pass" : "FAIL") << "\n";
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    }

    const fs::path dir = fresh_run_dir(cfg.out_dir, cfg.experiment);

    Json doc;
    doc["library_version"] = kVersion;
    doc["seed"] = cfg.seed;
    bool all_pass = true;
    Json jreports = Json::array();
    for (const auto& r : reports) {
        jreports.push_back(r.summary);
        all_pass = all_pass && r.pass;
        for (const auto& t : r.tables) write_file(dir / (t.name + ".csv"), to_csv(t));
    }
    doc["reports"] = jreports;
    doc["pass"] = all_pass;
    const std::string report_text = doc.dump(2) + "\n";
    write_file(dir / "report.json", report_text);

    if (cfg.grid_snapshots) {
        const GridField g = synthesize_on_grid(params.h, cfg.snapshot_nx, cfg.snapshot_ny);
        Table t{"topography_grid", {}, {}};
        for (int ix = 0; ix < g.nx; ++ix) t.header.push_back("x" + std::to_string(ix));
        for (int iy = 0; iy < g.ny; ++iy) {
            std::vector<std::string> row;
            for (int ix = 0; ix < g.nx; ++ix) row.push_back(format_double(g.at(ix, iy)));
            t.rows.push_back(row);
        }
        write_file(dir / "topography_grid.csv", to_csv(t));
    }

    // manifest: provenance only; wall-clock data lives here, never in report.json
    Json manifest;
    manifest["library_version"] = kVersion;
    manifest["config_hash"] = fnv1a64(cfg.canonical_text());
    manifest["threads"] = threads;
    manifest["report_hash"] = fnv1a64(report_text);
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char stamp[32];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        manifest["timestamp_utc"] = stamp;
    }
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    std::cout << dir.string() << "\n";
    return all_pass ? 0 : 1;
}

int validate_command(const std::string& config_path, const std::vector<std::string>& overrides) {
    std::vector<Diagnostic> diags;
    auto raw = load_raw(config_path, overrides, diags);
    if (raw) interpret_config(*raw, diags);
    print_diags(diags);
    if (!raw || has_errors(diags)) return 2;
    std::cout << "ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qgibbs: spectral Galerkin channel model with Gibbs-ensemble verification"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, experiment, out_dir;
    std::vector<std::string> overrides;
    std::optional<long> seed;

    auto* run = app.add_subcommand("run", "run experiments and write artifacts");
    run->add_option("--config", config_path, "config file (built-in defaults when omitted)");
    run->add_option("--experiment", experiment,
                    "invariance|conservation|chaos|regularity|residual|all");
    run->add_option("--seed", seed, "master seed (overrides config)");
    run->add_option("--out-dir", out_dir, "artifact directory root");
    run->add_option("--set", overrides, "override: section.key=value")->take_all();

    auto* val = app.add_subcommand("validate", "validate a config file");
    val->add_option("--config", config_path, "config file")->required();
    val->add_option("--set", overrides, "override: section.key=value")->take_all();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(run))
        return run_command(config_path, overrides, experiment, seed, out_dir);
    return validate_command(config_path, overrides);
}
