#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tube/cross_section.hpp"
#include "tube/eigensolve.hpp"
#include "tube/geometry.hpp"
#include "tube/grid.hpp"

namespace tube {

/// Zeros of the n-th eigenfunction of S on I = (0, L).
struct NodalData1D {
    std::size_t index = 1;
    double length = 0.0;
    std::vector<double> zeros;  ///< interior zeros, strictly increasing
    double min_gap = 0.0;       ///< smallest distance between consecutive points of {0, zeros, L}

    /// {0, zeros..., L}
    std::vector<double> partition() const;
    /// dist(s, zeros); +inf when there are no interior zeros.
    double distance(double s) const;
    /// dist(s, {0, zeros, L}), the distance to the boundary of the nodal subinterval containing s.
    double subinterval_distance(double s) const;
};

/// Sign changes between adjacent nodes, located by linear interpolation. A node value
/// of exactly zero between opposite signs counts as one zero at that node.
/// Throws SturmViolation unless exactly n-1 interior zeros are found.
NodalData1D nodal_points_1d(std::span<const double> phi, const Axis& s_axis, std::size_t n);

/// Outcome of the checks on the spectrum of S.
struct PropertyReport {
    bool zero_counts_ok = true;
    bool bracket_ok = true;        ///< |mu_n - (n pi/L)^2| <= C + tolerance
    double max_bracket_excess = 0; ///< max_n |mu_n - (n pi/L)^2| - C
    bool gaps_ok = true;           ///< mu_{n+1} - mu_n > 0
    double min_gap = 0.0;
    bool spacing_ok = true;        ///< zero spacing bounded below by a positive constant
    double min_zero_spacing = 0.0;
    bool ratio_ok = true;          ///< |phi_n(s)| >= c dist(s, boundary of I_n) with c > 0
    double min_boundary_ratio = 0.0;
    std::vector<double> c2_norms;  ///< measured ||phi_n||_{C^2} (finite differences)
    std::string failure;

    bool pass() const { return zero_counts_ok && bracket_ok && gaps_ok && spacing_ok && ratio_ok; }
};

/// Checks the Sturm-Liouville structure of converged eigenpairs of S with bound C = ||v0||_inf.
PropertyReport verify_sturm_properties(const EigenResult& s_result, double bound, const Axis& s_axis,
                                       double tolerance = 1e-3);

/// phi (x) J1 on the tensor grid, normalized in the discrete L^2 product.
Eigen::VectorXd product_state(std::span<const double> phi, std::span<const double> j1, const TensorGrid& grid);

struct PairedEigenfunction {
    Eigen::VectorXd psi;
    Eigen::VectorXd psi0;
    double overlap = 0.0;  ///< <psi, psi0> after the sign fix, positive
    bool flipped = false;
};

/// Normalizes both vectors and flips psi so that <psi, psi0> > 0.
/// Throws PairingAmbiguity when |<psi, psi0>| < 0.5.
PairedEigenfunction pair_and_sign(const Eigen::VectorXd& psi, const Eigen::VectorXd& psi0, double weight);

struct EigenfunctionErrors {
    double sup = 0.0;       ///< max |psi - psi0|
    double weighted = 0.0;  ///< max |psi - psi0| / dist(t, boundary of omega)
};

EigenfunctionErrors eigenfunction_errors(const Eigen::VectorXd& psi, const Eigen::VectorXd& psi0,
                                         const CrossSection& omega, const TensorGrid& grid);

struct ViolationReport {
    std::size_t violations = 0;   ///< disagreeing nodes with dist(s, N(phi)) > margin
    std::size_t checked = 0;      ///< nodes with dist(s, N(phi)) > margin
    double empirical_margin = 0;  ///< smallest margin with zero violations
};

/// Compares sgn psi(s,t) with sgn phi(s) away from the nodal set of phi.
ViolationReport sign_agreement(const Eigen::VectorXd& psi, std::span<const double> phi, const NodalData1D& nodal,
                               const TensorGrid& grid, double margin);

struct NodalCrossing {
    std::size_t tau = 0;  ///< transverse node of the s-line
    double s = 0.0;
    double displacement = 0.0;  ///< dist(s, N(phi))
};

struct NodalDisplacement {
    double max_displacement = 0.0;
    std::vector<NodalCrossing> crossings;
    std::size_t flagged_lines = 0;  ///< s-lines whose crossing count differs from n-1
};

/// Zero crossings of psi along every s-line and their distance to the zeros of phi.
NodalDisplacement nodal_displacement(const Eigen::VectorXd& psi, const NodalData1D& nodal, const TensorGrid& grid);

/// Connected components of {psi > 0} and {psi < 0} on the grid graph (nearest-neighbour edges).
std::size_t sign_domains(const Eigen::VectorXd& psi, const TensorGrid& grid);

/// Sign changes of psi around the ring of nodes adjacent to the boundary of a planar
/// (d = 2) grid: the number of points where the nodal set reaches the boundary.
std::size_t boundary_terminations(const Eigen::VectorXd& psi, const TensorGrid& grid);

struct LaplacianEigenfunction {
    Eigen::VectorXd psi;   ///< eps^{-(d-1)/2} h^{-1/2} psi
    Eigen::VectorXd psi0;  ///< same map applied to the product state
    double norm_transformed = 0.0;  ///< ||psi||_{L^2(Omega)}
    double norm_physical = 0.0;     ///< ||Psi|| in the measure eps^{d-1} h ds dt
    double unitarity_error() const { return std::abs(norm_physical - norm_transformed); }
};

/// Inverts the unitary psi -> |G|^{1/4} psi. Throws GeometryError if h <= 0 anywhere.
LaplacianEigenfunction reconstruct_laplacian_eigenfunction(const Eigen::VectorXd& psi, const Eigen::VectorXd& psi0,
                                                           const JacobianField& jf);

struct RateFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    std::size_t used = 0;
    std::vector<std::string> notes;
};

/// Least squares on (log eps, log metric). Non-positive metrics are dropped with a note;
/// fewer than three remaining points raise PreconditionError.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

}  // namespace tube
