#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tube/sweep.hpp"

namespace tube {

struct OutputOptions {
    std::filesystem::path dir = "out";
    bool export_matrices = false;
};

/// Parsed run description. Keys (all tables optional unless noted):
///
///   mode = "sweep"                              spectrum | sweep | nodal | validate
///   [curve]     kind, dim, length, c_gamma, profile parameters; [[curve.higher]] for kappa_2..
///   [cross_section] kind = "interval" (half_width) | "rectangle" (sides)
///   [surface]   length; [surface.kappa] profile; [surface.gauss] kind = constant | cosine | product
///   [sweep]     eps (list), n
///   [grid]      s_nodes, t_nodes (integer or list)
///   [solver]    tol, seed
///   [output]    dir, export_matrices, floor, bracket
///
/// Profiles: kind = "constant" (value), "sine" (amplitude, frequency, phase),
/// "bump" (amplitude, center, half_width) or "sampled" (file: CSV with columns s,kappa on a uniform grid).
struct RunConfig {
    std::string mode = "sweep";
    SweepConfig sweep;
    OutputOptions output;
};

/// Throws ConfigError with "file:line: field: problem" diagnostics. Mode-dependent checks are left
/// to validate_run_config so that command-line overrides can be applied first.
RunConfig load_config(const std::filesystem::path& path);
/// Relative sample files are resolved against base_dir.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".",
                       std::string_view source_name = "config");

/// eps strictly decreasing and positive, N >= 1, at least 8 nodes per axis, known mode.
/// Throws ConfigError.
void validate_run_config(const RunConfig& config);

/// Comma-separated list of positive numbers, e.g. "0.2,0.1,0.05". Throws ConfigError.
std::vector<double> parse_eps_list(std::string_view text);

}  // namespace tube
