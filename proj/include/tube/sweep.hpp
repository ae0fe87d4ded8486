#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tube/analysis.hpp"
#include "tube/cross_section.hpp"
#include "tube/eigensolve.hpp"
#include "tube/geometry.hpp"
#include "tube/operators.hpp"
#include "tube/surface.hpp"

namespace tube {

enum class GeometryKind { Tube, Surface };

std::string to_string(GeometryKind kind);

/// Everything needed to run the pipeline at one or more eps values.
struct SweepConfig {
    GeometryKind kind = GeometryKind::Tube;
    std::optional<CurveSpec> curve;          ///< tube geometry
    CrossSection omega = CrossSection::interval(1.0);
    std::optional<SurfaceStripSpec> surface; ///< strip geometry; its epsilon is replaced per row
    std::vector<double> eps;
    std::size_t n = 3;
    std::size_t s_nodes = 400;
    std::vector<std::size_t> t_nodes{60};
    SolverOptions solver;
    bool compute_floor = true;   ///< rerun on the 2x coarser grid to estimate the discretization floor
    bool check_bracket = true;   ///< solve the comparison operators T- and T+ as well

    double length() const;
    std::size_t dim() const { return kind == GeometryKind::Surface ? 2 : curve->dim(); }
    TensorGrid grid() const;
    /// Same box with every axis coarsened by about 2; nullopt if an axis would drop below 8 nodes.
    std::optional<TensorGrid> coarse_grid() const;
    /// Throws PreconditionError on inconsistent settings.
    void validate() const;
};

/// One (eps, n) line of the report.
struct ConvergenceRow {
    double epsilon = 0.0;
    std::size_t n = 0;
    double sigma = 0.0;   ///< n-th eigenvalue of T
    double sigma0 = 0.0;  ///< n-th eigenvalue of T0 on the same grid (Kronecker sum)
    double mu = 0.0;      ///< n-th eigenvalue of S
    double lambda = 0.0;  ///< sigma + eps^-2 E1: eigenvalue of the Dirichlet Laplacian
    double gap = 0.0;        ///< |sigma - sigma0|
    double raw_gap = 0.0;    ///< |sigma - mu|, includes the transverse discretization shift
    double lambda_gap = 0.0; ///< |lambda - (mu + eps^-2 E1)|
    double floor = 0.0;      ///< discretization and roundoff floor of gap
    bool above_floor = false;
    double residual = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    double overlap = 0.0;
    double sup_error = 0.0;
    double weighted_error = 0.0;
    double nodal_displacement = 0.0;
    std::size_t flagged_lines = 0;
    double empirical_margin = 0.0;
    std::size_t violations = 0;  ///< disagreements beyond the margin eps
    std::size_t sign_domains = 0;
    int boundary_terminations = -1;  ///< d = 2 only
    double unitarity_error = 0.0;
    double poincare_ratio = 0.0;     ///< sum over s-slices of transverse energy / ||psi||^2
    double poincare_constant = 0.0;  ///< discrete E1 of the stencil
    bool poincare_ok = false;
    bool clustered = false;
    std::string error;  ///< non-empty if this row could not be completed

    bool ok() const { return error.empty(); }
};

/// Per-eps quantities that do not depend on n.
struct EpsilonSummary {
    double epsilon = 0.0;
    AssumptionConstants constants;
    double min_h = 0.0;
    double max_h = 0.0;
    ValidityReport validity;
    bool bracket_checked = false;
    bool bracket_ok = false;
    double bracket_excess = 0.0;  ///< max_n of max(sigma-_n - sigma_n, sigma_n - sigma+_n), <= 0 when it holds
    bool simple = false;          ///< no clustered pair among sigma_1..sigma_N
    bool courant_ok = false;      ///< sign_domains == n for every completed row
    std::size_t solver_seed = 0;
    double seconds = 0.0;
    std::string error;
};

/// Full output of the pipeline at one eps, including the vectors for file export.
struct EpsilonAnalysis {
    EpsilonSummary summary;
    std::vector<ConvergenceRow> rows;
    std::optional<TensorGrid> grid;
    std::vector<Eigen::VectorXd> psi;   ///< sign-fixed, normalized eigenvectors of T
    std::vector<Eigen::VectorXd> psi0;  ///< phi_n (x) J1
    std::vector<Eigen::VectorXd> phi;   ///< eigenvectors of S
    std::vector<std::optional<NodalData1D>> nodal;
    std::vector<NodalDisplacement> crossings;
};

struct SlopeSummary {
    std::string metric;
    std::size_t n = 0;
    std::optional<RateFit> fit;
    bool floor_limited = false;
    std::string note;
};

struct ConvergenceReport {
    std::vector<EpsilonSummary> epsilons;
    std::vector<ConvergenceRow> rows;
    std::vector<SlopeSummary> slopes;
    bool simple_at_smallest = false;
    bool courant_at_smallest = false;

    const ConvergenceRow* find(double epsilon, std::size_t n) const;
    const SlopeSummary* slope(const std::string& metric, std::size_t n) const;
    std::size_t failed_rows() const;
};

/// The operator T and the one-dimensional S for the configured geometry at one eps.
struct AssembledOperators {
    DiscreteOperator T;
    DiscreteOperator S;
};
AssembledOperators assemble_operators(const SweepConfig& config, double epsilon);

/// Runs the pipeline at one eps. Failures are recorded in the summary and rows rather than thrown,
/// except for configuration errors.
EpsilonAnalysis analyze_epsilon(const SweepConfig& config, double epsilon);

/// analyze_epsilon for every eps, then least-squares slopes of gap, sup_error, weighted_error and
/// nodal_displacement. Requires at least three eps values.
ConvergenceReport sweep_epsilon(const SweepConfig& config);

/// Sorted lowest n eigenvalues of S (x) 1 + 1 (x) eps^-2 (-Lap_t - E1) from the two factors' spectra.
std::vector<double> kronecker_sum(const std::vector<double>& mu, const std::vector<double>& transverse,
                                  double epsilon, double e1, std::size_t n);

/// Lowest n eigenvalues of the transverse stencil on grid, sorted.
std::vector<double> discrete_transverse_values(const CrossSection& omega, const TensorGrid& grid, std::size_t n);

/// Transverse Rayleigh quotient of psi summed over s-slices.
double transverse_poincare_ratio(const CrossSection& omega, const TensorGrid& grid, const Eigen::VectorXd& psi);

}  // namespace tube
