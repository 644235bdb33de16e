#pragma once

// Command-line front end. run_cli is the whole program minus process
// plumbing, so tests drive it in-process.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>
#include <openssl/opensslv.h>

#include "recoil/config.hpp"
#include "recoil/engines.hpp"
#include "recoil/io.hpp"
#include "recoil/ladder.hpp"
#include "recoil/multimode.hpp"
#include "recoil/observables.hpp"
#include "recoil/parallel.hpp"
#include "recoil/pinem.hpp"
#include "recoil/sweep.hpp"

namespace recoil::cli {

using json = nlohmann::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_runtime = 1;
inline constexpr int exit_usage = 2;

namespace detail {

using io::format_double;

inline json versions() {
    return {{"recoil_ladder", RECOIL_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", BOOST_LIB_VERSION},
            {"openssl", OPENSSL_VERSION_TEXT}};
}

// An unreadable config is a usage error, not a runtime failure.
inline std::string read_config(const std::string& path) {
    try {
        return io::read_text_file(path);
    } catch (const io::IoError& e) {
        throw ConfigError(e.what());
    }
}

inline json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Output files of one run; the manifest is written last and lists them.
class RunOutputs {
public:
    explicit RunOutputs(std::string dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw io::IoError("cannot create output directory '" + dir_ + "': " + ec.message());
    }

    void csv(const std::string& name, const io::CsvTable& t) {
        io::write_csv_file(path(name), t);
        files_.push_back(name);
    }
    void json_file(const std::string& name, const json& j) {
        io::write_text_file(path(name), j.dump(2) + "\n");
        files_.push_back(name);
    }

    void manifest(const std::string& subcommand, const json& config, const std::string& input_text,
                  const json& resolved) {
        const json m{{"subcommand", subcommand},
                     {"config", config},
                     {"resolved", resolved},
                     {"input_sha256", io::sha256_hex(input_text)},
                     {"outputs", files_},
                     {"versions", versions()},
                     {"timestamp", utc_timestamp()}};
        io::write_text_file(path("manifest.json"), m.dump(2) + "\n");
    }

    std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }

private:
    std::string dir_;
    std::vector<std::string> files_;
};

inline json statistics_json(const PhotonStatistics& s) {
    return {{"photon_distribution", s.probabilities}, {"mean_photons", s.mean_photons}, {"g2", nullable(s.g2)}};
}

inline io::CsvTable spectrum_table(const WaveFunction& w, std::optional<double> g = std::nullopt) {
    io::CsvTable t;
    if (g) t.header.push_back("g");
    t.header.insert(t.header.end(), {"m", "probability"});
    // Exact zeros (levels never reached) are omitted.
    for (int m = w.m_min(); m <= w.m_max(); ++m) {
        const double p = w.probability(m);
        if (p == 0.0) continue;
        std::vector<std::string> row;
        if (g) row.push_back(format_double(*g));
        row.push_back(std::to_string(m));
        row.push_back(format_double(p));
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct EvolveRun {
    WaveFunction state;
    int n_max = 0;
};

inline EvolveRun run_ladder(const LadderConfig& config, const config::RunOptions& o) {
    EvolveOptions opt;
    opt.boundary_threshold = o.boundary_threshold;
    if (o.adaptive) {
        auto r = adaptive_truncation(config, o.engine, o.tail_tolerance, 4096, opt);
        return {std::move(r.state), r.n_max};
    }
    const LadderPhases phases = phases_of(config);
    return {evolve(o.engine, phases, coupling_of(config), WaveFunction::initial(phases), opt), truncation_of(config)};
}

inline json evolve_record(const EvolveRun& run, const config::RunOptions& o) {
    json rec = statistics_json(photon_statistics(run.state));
    rec["n_max"] = run.n_max;
    rec["norm_drift"] = run.state.norm_drift();
    json fid = json::object();
    for (const auto& name : o.fidelities)
        fid[name] = best_reference_fidelity(run.state, parse_observable("fidelity:" + name).reference);
    rec["fidelities"] = fid;
    return rec;
}

// --- subcommands --------------------------------------------------------------

inline int cmd_sigma(double ekin, double eph, double length, std::ostream& out) {
    const double full = sigma_full(ekin, eph, length);
    const SigmaEstimate simple = sigma_simple(ekin, eph, length);
    const json line{{"sigma_full", full},
                    {"sigma_simple", simple.value},
                    {"sigma_simple_outside_validity", simple.outside_validity},
                    {"n_eff", n_eff(full)}};
    out << line.dump() << "\n";
    return exit_ok;
}

inline int cmd_evolve(const std::string& path, const std::optional<std::string>& engine, const std::string& dir,
                      std::ostream& out) {
    const std::string text = read_config(path);
    const json doc = config::parse_document(text);
    config::LadderJob job = config::parse_ladder_job(doc);
    if (engine) job.options.engine = parse_engine(*engine);
    for (const auto& name : job.options.fidelities) parse_observable("fidelity:" + name);

    RunOutputs outputs(dir);
    json resolved{{"engine", to_string(job.options.engine)}, {"adaptive", job.options.adaptive}};
    if (job.options.g_values.empty()) {
        const EvolveRun run = run_ladder(job.config, job.options);
        outputs.csv("spectrum.csv", spectrum_table(run.state));
        outputs.json_file("statistics.json", evolve_record(run, job.options));
        resolved["n_max"] = run.n_max;
    } else {
        io::CsvTable map;
        map.header = {"g", "m", "probability"};
        json runs = json::array();
        for (double g : job.options.g_values) {
            LadderConfig c = job.config;
            std::visit([g](auto& x) { x.coupling_g_qu = g; }, c);
            std::visit([](const auto& x) { x.validate(); }, c);
            const EvolveRun run = run_ladder(c, job.options);
            const io::CsvTable t = spectrum_table(run.state, g);
            map.rows.insert(map.rows.end(), t.rows.begin(), t.rows.end());
            json rec = evolve_record(run, job.options);
            rec["g"] = g;
            runs.push_back(rec);
        }
        outputs.csv("spectrum_map.csv", map);
        outputs.json_file("statistics.json", json{{"runs", runs}});
    }
    outputs.manifest("evolve", doc, text, resolved);
    out << "wrote " << outputs.path("manifest.json") << "\n";
    return exit_ok;
}

inline io::CsvTable sweep_table(const SweepResult& r) {
    io::CsvTable t;
    for (const auto& a : r.axes) t.header.push_back(a.parameter);
    const bool spectrum = r.metadata.observable == "spectrum";
    if (spectrum) t.header.insert(t.header.end(), {"m", "probability"});
    else t.header.push_back("value");
    const std::size_t n1 = r.grids.size() == 2 ? r.grids[1].size() : 1;
    for (std::size_t k = 0; k < r.cells.size(); ++k) {
        std::vector<std::string> axes{format_double(r.grids[0][k / n1])};
        if (r.grids.size() == 2) axes.push_back(format_double(r.grids[1][k % n1]));
        const SweepCell& c = r.cells[k];
        if (!c.ok()) {
            auto row = axes;
            if (spectrum) row.push_back("");
            row.push_back("error:" + c.error);
            t.rows.push_back(std::move(row));
        } else if (spectrum) {
            for (std::size_t i = 0; i < c.row.size(); ++i) {
                auto row = axes;
                row.push_back(std::to_string(c.row_m_min + static_cast<int>(i)));
                row.push_back(format_double(c.row[i]));
                t.rows.push_back(std::move(row));
            }
        } else {
            auto row = axes;
            row.push_back(format_double(*c.value));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

inline json sweep_metadata(const SweepResult& r) {
    json axes = json::array();
    for (std::size_t a = 0; a < r.axes.size(); ++a)
        axes.push_back({{"parameter", r.axes[a].parameter},
                        {"min", r.axes[a].min},
                        {"max", r.axes[a].max},
                        {"count", r.axes[a].count},
                        {"scale", r.axes[a].scale == AxisScale::Log ? "log" : "linear"},
                        {"grid", r.grids[a]}});
    std::size_t failed = 0;
    for (const auto& c : r.cells) failed += c.ok() ? 0 : 1;
    return {{"axes", axes},
            {"engine", r.metadata.engine},
            {"observable", r.metadata.observable},
            {"rel_tol", r.metadata.rel_tol},
            {"abs_tol", r.metadata.abs_tol},
            {"boundary_threshold", r.metadata.boundary_threshold},
            {"adaptive", r.metadata.adaptive},
            {"version", r.metadata.version},
            {"failed_cells", failed}};
}

inline int cmd_sweep(const std::string& path, int workers, const std::string& dir, std::ostream& out) {
    const std::string text = read_config(path);
    const json doc = config::parse_document(text);
    const SweepSpec spec = config::parse_sweep_spec(doc);
    const SweepResult result = run_sweep(spec, workers);
    RunOutputs outputs(dir);
    outputs.csv("grid.csv", sweep_table(result));
    outputs.json_file("metadata.json", sweep_metadata(result));
    outputs.manifest("sweep", doc, text, {{"workers", workers}, {"cells", result.cells.size()}});
    out << "wrote " << outputs.path("manifest.json") << "\n";
    return exit_ok;
}

inline int cmd_pinem(const std::string& path, int workers, const std::string& dir, std::ostream& out) {
    const std::string text = read_config(path);
    const json doc = config::parse_document(text);
    const config::PinemJob job = config::parse_pinem_job(doc);
    const auto scan = pinem_scan(job.scan, workers);

    io::CsvTable trace;
    trace.header = {"g", "m", "probability"};
    json sidebands = json::array();
    for (const auto& p : scan) {
        sidebands.push_back(p.sidebands);
        for (std::size_t i = 0; i < p.spectrum.levels.size(); ++i)
            trace.rows.push_back({format_double(p.g), std::to_string(p.spectrum.levels[i]),
                                  format_double(p.spectrum.probabilities[i])});
    }
    json revivals = json::array();
    const bool uniform = [&] {
        try {
            if (job.scan.g_values.size() < 3) return false;
            detect_revivals(job.scan.g_values, revival_trace(scan, job.trace), job.prominence);
            return true;
        } catch (const DomainError&) {
            return false;
        }
    }();
    if (uniform)
        for (double g : detect_revivals(job.scan.g_values, revival_trace(scan, job.trace), job.prominence))
            revivals.push_back(g);

    RunOutputs outputs(dir);
    outputs.csv("pinem_trace.csv", trace);
    json rev{{"trace", job.trace == RevivalTrace::MatchedPair ? "matched_pair" : "zero_loss"},
             {"prominence", job.prominence},
             {"revivals", uniform ? revivals : json(nullptr)}};
    if (job.scan.matched_order == 1 && std::isfinite(job.scan.sigma)) {
        rev["first_revival_fit"] = first_revival_fit(job.scan.sigma);
        rev["second_revival_fit"] = second_revival_fit(job.scan.sigma);
    }
    outputs.json_file("revivals.json", rev);
    outputs.manifest("pinem", doc, text, {{"workers", workers}, {"sidebands", sidebands}});
    out << "wrote " << outputs.path("manifest.json") << "\n";
    return exit_ok;
}

inline int cmd_twomode(const std::string& path, const std::string& dir, std::ostream& out) {
    const std::string text = read_config(path);
    const json doc = config::parse_document(text);
    const config::TwoModeJob job = config::parse_two_mode_job(doc);
    EvolveOptions opt;
    opt.boundary_threshold = job.boundary_threshold;
    const TwoModeWaveFunction state = evolve_two_mode(job.phases, job.g1, complex(job.g2),
                                                      TwoModeWaveFunction::initial(job.phases.shape()), opt);
    const TwinStatistics ts = twin_statistics(state);

    io::CsvTable lattice;
    lattice.header = {"n1", "n2", "probability"};
    for (int a = 0; a <= state.n_max(); ++a)
        for (int b = 0; b <= state.n_max(); ++b)
            lattice.rows.push_back({std::to_string(a), std::to_string(b), format_double(state.probability(a, b))});

    json fid = json::object();
    for (const auto& name : job.fidelities) {
        const int n = state.n_max();
        if (name == "ghz") {
            fid[name] = best_phase_fidelity(state, [n](double ph) { return ghz_reference(ph, n); }).fidelity;
        } else {
            const double mean = ts.mode1.mean_photons;
            fid[name] = best_phase_fidelity(state, [&](double ph) { return twin_beam_from_mean(mean, ph, n); })
                            .fidelity;
        }
    }
    const json stats{{"mode1", statistics_json(ts.mode1)},
                     {"mode2", statistics_json(ts.mode2)},
                     {"diagonal", ts.diagonal},
                     {"diagonal_weight", ts.diagonal_weight},
                     {"geometric_ratio", nullable(ts.geometric_ratio)},
                     {"norm_drift", state.norm_drift()},
                     {"shell_population", state.shell_population()},
                     {"fidelities", fid}};

    RunOutputs outputs(dir);
    outputs.csv("lattice.csv", lattice);
    outputs.json_file("statistics.json", stats);
    outputs.manifest("twomode", doc, text,
                     {{"n_max", job.phases.n_max()}, {"g1", job.g1}, {"g2", job.g2},
                      {"closure_defect", job.phases.closure_defect()}});
    out << "wrote " << outputs.path("manifest.json") << "\n";
    return exit_ok;
}

}  // namespace detail

/// Parses `args` (without the program name) and runs the subcommand.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Free-electron / cavity-photon ladder simulator with electron recoil", "recoil_ladder"};
    app.set_version_flag("--version", RECOIL_VERSION);
    app.require_subcommand(1);

    double ekin = 0, eph = 0, length = 0;
    auto* sigma = app.add_subcommand("sigma", "Recoil parameter and effective level count");
    sigma->add_option("--ekin-kev", ekin, "Electron kinetic energy (keV)")->required();
    sigma->add_option("--eph-ev", eph, "Photon energy (eV)")->required();
    sigma->add_option("--length-um", length, "Interaction length (um)")->required();

    std::string config_path, out_dir = ".";
    std::optional<std::string> engine;
    std::optional<int> workers;

    auto* evolve_cmd = app.add_subcommand("evolve", "Evolve one physical or reduced config");
    evolve_cmd->add_option("config", config_path, "JSON config")->required();
    evolve_cmd->add_option("--engine", engine, "exact, ode or sinc (overrides the config)");
    evolve_cmd->add_option("--out", out_dir, "Output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep");
    sweep_cmd->add_option("spec", config_path, "JSON config with a sweep section")->required();
    sweep_cmd->add_option("--workers", workers, "Worker threads (default: RECOIL_LADDER_THREADS or all cores)");
    sweep_cmd->add_option("--out", out_dir, "Output directory");

    auto* pinem_cmd = app.add_subcommand("pinem", "Classical-field (PINEM) coupling scan");
    pinem_cmd->add_option("config", config_path, "JSON config with mode pinem")->required();
    pinem_cmd->add_option("--workers", workers, "Worker threads");
    pinem_cmd->add_option("--out", out_dir, "Output directory");

    auto* twomode_cmd = app.add_subcommand("twomode", "Two-mode (twin-beam / GHZ) evolution");
    twomode_cmd->add_option("config", config_path, "JSON config with mode two_mode")->required();
    twomode_cmd->add_option("--out", out_dir, "Output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        const int w = workers ? *workers : default_worker_count();
        if (w < 1) throw ConfigError("--workers must be positive");
        if (*sigma) return detail::cmd_sigma(ekin, eph, length, out);
        if (*evolve_cmd) return detail::cmd_evolve(config_path, engine, out_dir, out);
        if (*sweep_cmd) return detail::cmd_sweep(config_path, w, out_dir, out);
        if (*pinem_cmd) return detail::cmd_pinem(config_path, w, out_dir, out);
        if (*twomode_cmd) return detail::cmd_twomode(config_path, out_dir, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return exit_usage;
    } catch (const Error& e) {
        err << e.kind() << ": " << e.what() << "\n";
        if (const auto* t = dynamic_cast<const TruncationOverflow*>(&e))
            err << "boundary population " << t->boundary_population() << "\n";
        return exit_runtime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}

}  // namespace recoil::cli
