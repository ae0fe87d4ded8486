#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "tube/operators.hpp"

namespace tube {

/// Lowest eigenpairs of a symmetric operator.
///
/// Vectors are columns normalized in the discrete L^2 product sum(u v) * weight.
struct EigenResult {
    std::vector<double> values;
    Eigen::MatrixXd vectors;
    std::vector<double> residuals;  ///< ||A y - sigma y|| for the Euclidean-normalized y
    std::vector<bool> converged;
    std::size_t iterations = 0;     ///< operator applications (solves) used
    std::uint64_t seed = 0;
    double shift = 0.0;             ///< shift used for the inverse iteration
    bool inertia_verified = false;  ///< LDL^T inertia confirms no eigenvalue below the returned ones was missed
    double weight = 1.0;

    std::size_t size() const { return values.size(); }
    bool all_converged() const;
    /// Column n-1 as a vector.
    Eigen::VectorXd vector(std::size_t n) const { return vectors.col(static_cast<Eigen::Index>(n - 1)); }
};

struct SolverOptions {
    double tol = 1e-9;
    std::uint64_t seed = 20240607;
    std::size_t max_restarts = 300;
};

/// n smallest eigenpairs by shift-invert thick-restart Lanczos on a sparse LDL^T factorization.
///
/// The shift is placed just below the lowest eigenvalue and checked with Sylvester's
/// law of inertia. Non-converged pairs are returned with converged = false.
EigenResult lowest_eigenpairs(const DiscreteOperator& op, std::size_t n, const SolverOptions& options = {});
inline EigenResult lowest_eigenpairs(const DiscreteOperator& op, std::size_t n, double tol) {
    SolverOptions o;
    o.tol = tol;
    return lowest_eigenpairs(op, n, o);
}

/// Dense reference: full symmetric eigendecomposition, first n pairs. Dimension capped at 4000.
EigenResult dense_oracle(const DiscreteOperator& op, std::size_t n);

/// Number of eigenvalues of the operator strictly below `sigma` (inertia of A - sigma I).
std::size_t count_below(const DiscreteOperator& op, double sigma);

/// Indices i (zero-based) such that values[i] and values[i+1] are closer than rel * max(1, |value|).
std::vector<std::size_t> clustered_pairs(const std::vector<double>& values, double rel = 1e-6);

}  // namespace tube
