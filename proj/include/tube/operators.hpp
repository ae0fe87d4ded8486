#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <iosfwd>
#include <string>

#include "tube/cross_section.hpp"
#include "tube/geometry.hpp"
#include "tube/grid.hpp"

namespace tube {

/// Potential samples: v0 on the s-nodes and, when available, V on every grid node.
struct PotentialField {
    Eigen::VectorXd v0;
    Eigen::VectorXd full;

    bool has_full() const { return full.size() > 0; }
    /// sup |V - v0 (x) 1| over the grid; requires has_full().
    double deviation(const TensorGrid& grid) const;
};

/// v0(s) = -kappa1(s)^2 / 4 on the s-nodes.
PotentialField effective_potential(const CurveSpec& curve, const Axis& s_axis);

/// V = -kappa1^2/(4h^2) + d11h/(2h^3) - (5/4) d1h^2/h^4 for the tube's affine h, together with v0.
PotentialField full_potential(const JacobianField& jf, const CurveSpec& curve);

/// Potential for a general diagonal metric diag(h^2, eps^2, ...):
/// V = -(5/4) d1h^2/h^4 + d11h/(2h^3) - |grad_t h|^2/(4 eps^2 h^2) + lap_t h/(2 eps^2 h).
Eigen::VectorXd general_potential(const JacobianField& jf);

enum class OperatorKind { T, T0, S, H, Bound };

std::string to_string(OperatorKind kind);

/// Sparse symmetric finite-difference operator with Dirichlet conditions on a tensor grid.
///
/// Only the lower triangle (with the diagonal) is stored, so the represented
/// matrix equals its transpose exactly.
class DiscreteOperator {
public:
    DiscreteOperator(OperatorKind kind, double epsilon, TensorGrid grid, Eigen::SparseMatrix<double> lower);

    OperatorKind kind() const { return kind_; }
    double epsilon() const { return epsilon_; }
    const TensorGrid& grid() const { return grid_; }
    std::size_t dimension() const { return static_cast<std::size_t>(lower_.rows()); }
    /// Quadrature weight of one node; discrete L^2 inner products are sum(u v) * weight().
    double weight() const { return grid_.cell_volume(); }

    const Eigen::SparseMatrix<double>& lower() const { return lower_; }
    Eigen::SparseMatrix<double> full() const;
    Eigen::MatrixXd dense() const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    /// Infinity norm (max absolute row sum) of the full matrix.
    double norm_inf() const;
    /// Lower end of the Gershgorin interval.
    double gershgorin_lower() const;

private:
    OperatorKind kind_;
    double epsilon_;
    TensorGrid grid_;
    Eigen::SparseMatrix<double> lower_;
};

/// T = -d1 h^{-2} d1 + eps^-2 (-Lap_t - E1) + V in flux form (h^{-2} at s-midpoints).
DiscreteOperator assemble_T(const JacobianField& jf, const PotentialField& v, const CrossSection& omega,
                            double epsilon, const TensorGrid& grid);

/// H = T + eps^-2 E1: the unitarily transformed Dirichlet Laplacian of the tube.
DiscreteOperator assemble_H(const JacobianField& jf, const PotentialField& v, const CrossSection& omega,
                            double epsilon, const TensorGrid& grid);

/// Decoupled comparison operator S (x) 1 + 1 (x) eps^-2 (-Lap_t - E1).
DiscreteOperator assemble_T0(const PotentialField& v, const CrossSection& omega, double epsilon,
                             const TensorGrid& grid);

/// S = -d^2/ds^2 + v0 on the s-axis, 3-point stencil.
DiscreteOperator assemble_S(const PotentialField& v, const Axis& s_axis);

/// Comparison operators (1 +- C eps)(-d1^2 + v0) + eps^-2(-Lap_t - E1) +- C(1+C) eps, sign = +1 or -1.
DiscreteOperator assemble_T_bound(const PotentialField& v, const CrossSection& omega, double epsilon,
                                  const TensorGrid& grid, double constant, int sign);

/// Common assembly: -d1 a d1 + eps^-2(-Lap_t) + diag, with a given at s-midpoints (rows) x transverse nodes (cols).
DiscreteOperator assemble_flux_operator(OperatorKind kind, const TensorGrid& grid, double epsilon,
                                        const Eigen::MatrixXd& a_mid, const Eigen::VectorXd& diagonal,
                                        double longitudinal_scale = 1.0);

/// Measured constants of the convergence assumption for a given geometry.
struct AssumptionConstants {
    double inf_a = 0.0;       ///< inf h^{-2}
    double a_minus_1_c1 = 0;  ///< ||h^{-2} - 1||_{C^1} on the grid
    double v_deviation = 0;   ///< sup |V - v0|
    double v0_sup = 0.0;
    double constant = 0.0;    ///< smallest C satisfying all four conditions at this eps
    /// C for which the discrete bracketing T- <= T <= T+ holds exactly on the grid.
    double bracket_constant = 0.0;
};

AssumptionConstants measure_assumption_constants(const JacobianField& jf, const PotentialField& v);

/// Coordinate-format export: one "i j value" line per stored entry of the full matrix, zero-based.
void write_coo(const DiscreteOperator& op, std::ostream& out);

}  // namespace tube
