// tube-spectra: spectra, eps-sweeps and nodal sets of thin Dirichlet tubes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "tube/config.hpp"
#include "tube/errors.hpp"
#include "tube/format.hpp"
#include "tube/operators.hpp"
#include "tube/report.hpp"
#include "tube/sweep.hpp"
#include "tube/validation.hpp"

namespace fs = std::filesystem;
using namespace tube;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfigError = 2;

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) { open_output(path) << j.dump(2) << '\n'; }

void export_matrices(const RunConfig& cfg, double eps) {
    const AssembledOperators ops = assemble_operators(cfg.sweep, eps);
    const std::string tag = "_eps" + format_shortest(eps);
    auto out_t = open_output(cfg.output.dir / ("T" + tag + ".coo"));
    write_coo(ops.T, out_t);
    auto out_s = open_output(cfg.output.dir / ("S" + tag + ".coo"));
    write_coo(ops.S, out_s);
}

void print_row(const ConvergenceRow& r) {
    std::printf("  eps=%-8g n=%-2zu sigma=%-14.8g mu=%-14.8g gap=%-10.3e residual=%-9.2e %s\n", r.epsilon, r.n, r.sigma,
                r.mu, r.gap, r.residual, r.ok() ? "" : ("error: " + r.error).c_str());
}

int run_spectrum(const RunConfig& cfg) {
    const double eps = cfg.sweep.eps.front();
    if (cfg.sweep.eps.size() > 1) std::fprintf(stderr, "spectrum: using the first eps value %g\n", eps);
    const EpsilonAnalysis a = analyze_epsilon(cfg.sweep, eps);
    auto csv = open_output(cfg.output.dir / "report.csv");
    write_spectrum_csv(csv, a, cfg.sweep);
    write_json(cfg.output.dir / "summary.json", spectrum_json(a, cfg.sweep));
    for (std::size_t n = 1; n <= a.psi.size(); ++n) {
        auto dat = open_output(cfg.output.dir / ("psi_" + std::to_string(n) + ".dat"));
        write_eigenfunction_dat(dat, a, n);
    }
    if (cfg.output.export_matrices) export_matrices(cfg, eps);
    std::printf("spectrum at eps = %g on grid %s\n", eps, grid_label(*a.grid).c_str());
    for (const auto& r : a.rows) print_row(r);
    if (!a.summary.error.empty()) std::printf("  note: %s\n", a.summary.error.c_str());
    const bool all_failed = std::none_of(a.rows.begin(), a.rows.end(), [](const auto& r) { return r.ok(); });
    return all_failed ? kFailed : kOk;
}

int run_sweep(const RunConfig& cfg) {
    const ConvergenceReport report = sweep_epsilon(cfg.sweep);
    auto csv = open_output(cfg.output.dir / "report.csv");
    write_report_csv(csv, report, cfg.sweep);
    write_json(cfg.output.dir / "summary.json", summary_json(report, cfg.sweep));
    if (cfg.output.export_matrices)
        for (double eps : cfg.sweep.eps) export_matrices(cfg, eps);
    std::printf("sweep over %zu eps values on grid %s\n", cfg.sweep.eps.size(), grid_label(cfg.sweep.grid()).c_str());
    for (const auto& r : report.rows) print_row(r);
    std::printf("slopes:\n");
    for (const auto& s : report.slopes) {
        if (s.fit)
            std::printf("  %-20s n=%zu slope=%.4f +- %.4f %s\n", s.metric.c_str(), s.n, s.fit->slope, s.fit->stderr_slope,
                        s.note.c_str());
        else
            std::printf("  %-20s n=%zu skipped: %s\n", s.metric.c_str(), s.n, s.note.c_str());
    }
    return report.failed_rows() == report.rows.size() ? kFailed : kOk;
}

int run_nodal(const RunConfig& cfg) {
    std::vector<EpsilonAnalysis> analyses;
    for (double eps : cfg.sweep.eps) analyses.push_back(analyze_epsilon(cfg.sweep, eps));
    std::vector<ConvergenceRow> rows;
    for (const auto& a : analyses) rows.insert(rows.end(), a.rows.begin(), a.rows.end());
    for (std::size_t n = 1; n <= cfg.sweep.n; ++n) {
        auto out = open_output(cfg.output.dir / ("nodal_" + std::to_string(n) + ".csv"));
        write_nodal_csv(out, analyses, n, cfg.sweep);
    }
    ConvergenceReport report;
    for (const auto& a : analyses) report.epsilons.push_back(a.summary);
    report.rows = rows;
    auto csv = open_output(cfg.output.dir / "report.csv");
    write_report_csv(csv, report, cfg.sweep);
    write_json(cfg.output.dir / "summary.json", summary_json(report, cfg.sweep));
    std::printf("nodal sets on grid %s\n", grid_label(cfg.sweep.grid()).c_str());
    for (const auto& r : rows)
        std::printf("  eps=%-8g n=%-2zu displacement=%-10.3e margin=%-10.3e violations=%zu domains=%zu %s\n",
                    r.epsilon, r.n, r.nodal_displacement, r.empirical_margin, r.violations, r.sign_domains,
                    r.ok() ? "" : ("error: " + r.error).c_str());
    return report.failed_rows() == rows.size() ? kFailed : kOk;
}

int run_validate(const RunConfig& cfg) {
    ValidationOptions options;
    options.seed = cfg.sweep.solver.seed;
    const ValidationReport report = run_validation(options);
    write_json(cfg.output.dir / "summary.json", to_json(report));
    for (const auto& c : report.checks)
        std::printf("%-4s %-20s %7.2fs  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.seconds, c.detail.c_str());
    std::printf("%s\n", report.pass() ? "all checks passed" : "validation FAILED");
    return report.pass() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra and nodal sets of thin Dirichlet tubes and strips"};
    app.require_subcommand(1);

    std::string config_path, out_dir, eps_list;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    bool export_flag = false;

    const std::pair<const char*, const char*> commands[] = {
        {"spectrum", "eigenvalues and eigenfunctions at the first eps"},
        {"sweep", "convergence report over the eps list with fitted slopes"},
        {"nodal", "nodal crossings of psi_n against the zeros of phi_n"},
        {"validate", "invariant suite: oracles, Sturm, Poincare, unitarity, Kronecker sum"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto* cfg_opt = sub->add_option("--config,-c", config_path, "TOML run description");
        if (std::string(name) != "validate") cfg_opt->required();
        sub->add_option("--out,-o", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--seed", seed, "solver seed (overrides solver.seed)");
        sub->add_option("--eps", eps_list, "comma-separated eps values (overrides sweep.eps)");
        sub->add_option("--n", n, "number of eigenpairs (overrides sweep.n)");
        sub->add_flag("--export-matrices", export_flag, "write T and S in coordinate format");
    }
    CLI11_PARSE(app, argc, argv);
    const std::string mode = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        cfg.mode = mode;
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        if (seed) cfg.sweep.solver.seed = *seed;
        if (!eps_list.empty()) cfg.sweep.eps = parse_eps_list(eps_list);
        if (n) cfg.sweep.n = *n;
        if (export_flag) cfg.output.export_matrices = true;
        if (mode != "validate" && cfg.sweep.kind == GeometryKind::Tube && !cfg.sweep.curve)
            throw ConfigError("curve: a [curve] or [surface] table is required");
        validate_run_config(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const Error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    }

    try {
        fs::create_directories(cfg.output.dir);
        if (mode == "spectrum") return run_spectrum(cfg);
        if (mode == "sweep") return run_sweep(cfg);
        if (mode == "nodal") return run_nodal(cfg);
        return run_validate(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailed;
    }
}
