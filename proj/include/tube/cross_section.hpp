#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tube/grid.hpp"

namespace tube {

/// Admissible cross-section: a centred interval (d = 2) or hyperrectangle (d >= 3).
class CrossSection {
public:
    enum class Kind { Interval, Rectangle };

    /// (-half_width, half_width); the default is (-1, 1).
    static CrossSection interval(double half_width = 1.0);
    /// prod_k (-sides[k]/2, sides[k]/2); a single side gives an interval.
    static CrossSection rectangle(std::vector<double> sides);

    Kind kind() const { return kind_; }
    const std::vector<double>& sides() const { return sides_; }
    std::size_t transverse_dims() const { return sides_.size(); }
    /// sup |t| over omega: half the width or half the diagonal.
    double radius() const;

    /// Whether the box of `grid` is this cross-section.
    bool matches(const TensorGrid& grid) const;

private:
    CrossSection(Kind kind, std::vector<double> sides);
    Kind kind_;
    std::vector<double> sides_;
};

/// n-th Dirichlet eigenpair of the cross-section, by the sine-product formula.
struct TransverseEigenpair {
    std::size_t index = 1;
    double value = 0.0;
    std::vector<std::size_t> modes;  ///< mode number per transverse axis (all >= 1)
    std::vector<double> sides;

    /// L^2(omega)-normalized eigenfunction, prod_k sqrt(2/b_k) sin(m_k pi (t_k + b_k/2) / b_k).
    double operator()(std::span<const double> t) const;
    /// The eigenfunction sampled at the grid's transverse nodes.
    std::vector<double> sample(const TensorGrid& grid) const;
    /// Eigenvalue of the same mode for the 3-point stencil on the grid's transverse axes.
    double discrete_value(const TensorGrid& grid) const;
};

/// Eigenpairs sorted non-decreasingly with multiplicity; ties broken lexicographically by mode.
TransverseEigenpair transverse_eigenpair(const CrossSection& omega, std::size_t n);

/// Rayleigh quotient of the transverse stencil: ||grad psi||^2 / ||psi||^2 with psi = 0 off the grid.
/// psi holds one value per transverse node of `grid`.
double poincare_ratio(const CrossSection& omega, const TensorGrid& grid, std::span<const double> psi);

/// Lowest eigenvalue of the transverse 3-point stencil on the grid (the sharp discrete Poincare constant).
double discrete_poincare_constant(const TensorGrid& grid);

/// inf over transverse nodes of J_1(t) / dist(t, boundary); a positive value checks the linear lower bound on J_1.
double ground_state_boundary_ratio(const CrossSection& omega, const TensorGrid& grid);

}  // namespace tube
