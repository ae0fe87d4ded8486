#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tube/sweep.hpp"
#include "tube/validation.hpp"

namespace tube {

/// "400x60" style label of the grid sizes.
std::string grid_label(const TensorGrid& grid);

/// '#'-prefixed reproducibility header: geometry, grid, tolerance, seed.
void write_metadata(std::ostream& out, const SweepConfig& config, const std::string& title);

/// One row per (eps, n) with every metric; floats with 17 significant digits.
void write_report_csv(std::ostream& out, const ConvergenceReport& report, const SweepConfig& config);

/// One-eps eigenvalue table: n, sigma, mu, lambda, gap, residual and the remaining row metrics.
void write_spectrum_csv(std::ostream& out, const EpsilonAnalysis& analysis, const SweepConfig& config);

/// Zero crossings of psi_n along every s-line, with their distance to the zeros of phi_n, for each eps.
void write_nodal_csv(std::ostream& out, const std::vector<EpsilonAnalysis>& analyses, std::size_t n,
                     const SweepConfig& config);

/// Gnuplot data blocks "s t... psi psi0", one block per s-node.
void write_eigenfunction_dat(std::ostream& out, const EpsilonAnalysis& analysis, std::size_t n);

nlohmann::json to_json(const ConvergenceRow& row);
nlohmann::json to_json(const EpsilonSummary& summary);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json config_json(const SweepConfig& config);
nlohmann::json summary_json(const ConvergenceReport& report, const SweepConfig& config);
nlohmann::json spectrum_json(const EpsilonAnalysis& analysis, const SweepConfig& config);

}  // namespace tube
