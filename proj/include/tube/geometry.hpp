#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tube/grid.hpp"

namespace tube {

/// Scalar function on [0,L] together with its first two derivatives.
///
/// Analytic presets carry closed-form derivatives; sampled data is turned
/// into a uniform cubic B-spline and differentiated through the spline.
class CurvatureProfile {
public:
    using Fn = std::function<double(double)>;

    CurvatureProfile(std::string name, Fn f, Fn df, Fn d2f);

    static CurvatureProfile constant(double value);
    /// amplitude * sin(frequency * s + phase)
    static CurvatureProfile sine(double amplitude, double frequency, double phase = 0.0);
    /// Smooth compactly supported bump amplitude * exp(1 - 1/(1-x^2)), x = (s-center)/half_width.
    static CurvatureProfile bump(double amplitude, double center, double half_width);
    /// Cubic spline through uniformly spaced samples (s_i, v_i).
    static CurvatureProfile sampled(const std::vector<double>& s, const std::vector<double>& values);

    double value(double s) const { return f_(s); }
    double derivative(double s) const { return df_(s); }
    double second_derivative(double s) const { return d2f_(s); }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    Fn f_, df_, d2f_;
};

/// Sup norms of the curvatures and their derivatives sampled on a fine grid.
struct CurvatureNorms {
    double kappa1_c0 = 0.0;
    double kappa1_c1 = 0.0;  ///< max(sup|k1|, sup|k1'|)
    double kappa1_c2 = 0.0;  ///< max(sup|k1|, sup|k1'|, sup|k1''|)
    double higher_c1 = 0.0;  ///< max over mu >= 2 of the C^1 norm of k_mu
};

/// Intrinsic description of the reference curve: dimension, length and curvatures.
class CurveSpec {
public:
    /// Throws PreconditionError when the data violates the curvature bound c_gamma
    /// (checked by sampling) or is not finite. Without c_gamma the measured bound is used.
    CurveSpec(std::size_t dim, double length, CurvatureProfile kappa1, std::vector<CurvatureProfile> higher = {},
              std::optional<double> c_gamma = std::nullopt);

    std::size_t dim() const { return dim_; }
    double length() const { return length_; }
    double c_gamma() const { return c_gamma_; }
    const CurvatureProfile& kappa1() const { return kappa1_; }
    const std::vector<CurvatureProfile>& higher() const { return higher_; }
    const CurvatureNorms& norms() const { return norms_; }

    /// i-th curvature, i in 1..dim-1.
    double kappa(std::size_t i, double s) const;
    double kappa_dot(std::size_t i, double s) const;

private:
    std::size_t dim_;
    double length_;
    CurvatureProfile kappa1_;
    std::vector<CurvatureProfile> higher_;
    CurvatureNorms norms_;
    double c_gamma_;
};

/// Serret-Frenet generator K(s): skew, K_{i,i+1} = kappa_i, zero beyond the first super-diagonal.
struct FrenetMatrix {
    Eigen::MatrixXd entries;

    /// Block (K_{mu nu}) with mu, nu >= 2, i.e. rows/cols 1..d-1 in zero-based indexing.
    Eigen::MatrixXd lower_block() const {
        const auto d = entries.rows();
        return entries.bottomRightCorner(d - 1, d - 1);
    }
};

FrenetMatrix frenet_matrix(const CurveSpec& curve, double s);
/// Entrywise s-derivative of K(s).
FrenetMatrix frenet_matrix_derivative(const CurveSpec& curve, double s);

/// Tang-frame rotations R'(s) sampled on a uniform grid of [0,L].
struct RotationPath {
    std::vector<double> s;
    std::vector<Eigen::MatrixXd> matrices;
    double max_drift = 0.0;         ///< largest ||R R^T - 1||_F seen before correction
    std::size_t corrections = 0;    ///< number of re-orthonormalizations applied
    std::vector<std::string> warnings;

    std::size_t steps() const { return s.empty() ? 0 : s.size() - 1; }
};

/// Integrates dR'/ds = -R' K'(s), R'(0) = 1, with classical RK4 on n_steps uniform steps.
RotationPath solve_tang_frame(const CurveSpec& curve, std::size_t n_steps);

/// Nearest rotation to a nearly orthogonal matrix (polar factor, by averaging R and R^{-T}).
Eigen::MatrixXd nearest_rotation(const Eigen::MatrixXd& r);

/// h and its longitudinal derivatives on a tensor grid, plus h at the s-midpoints
/// used by the flux-form discretization.
struct JacobianField {
    TensorGrid grid;
    double epsilon = 0.0;
    Eigen::VectorXd h;     ///< at every grid node
    Eigen::VectorXd d1h;   ///< dh/ds
    Eigen::VectorXd d11h;  ///< d^2h/ds^2
    /// Row k = s-midpoint k (0..m_s), column = transverse index.
    Eigen::MatrixXd h_mid;
    /// |grad_t h|^2 and Laplacian_t h at every node.
    Eigen::VectorXd grad_t_sq;
    Eigen::VectorXd lap_t;

    double min_h() const { return h.minCoeff(); }
    double max_h() const { return h.maxCoeff(); }
};

/// Rotation path length required by jacobian_field for a given grid: nodes and midpoints.
inline std::size_t tang_frame_steps(const TensorGrid& grid) { return 2 * (grid.s().count + 1); }

/// h(s,t) = 1 - eps kappa1(s) sum_mu R_{mu 2}(s) t_mu with closed-form s-derivatives.
///
/// Requires eps < (C_Gamma a)^{-1}, a = grid.radius(); `rot` must be sampled with
/// tang_frame_steps(grid) steps over the same length.
JacobianField jacobian_field(const CurveSpec& curve, const RotationPath& rot, double epsilon, const TensorGrid& grid);

struct ValidityReport {
    double lower = 0.0;      ///< 1 - C_Gamma a eps
    double upper = 0.0;      ///< 1 + C_Gamma a eps
    double threshold = 0.0;  ///< (C_Gamma a)^{-1}
    bool pass = false;
};

ValidityReport check_immersion(double c_gamma, double omega_radius, double epsilon);
inline ValidityReport check_immersion(const CurveSpec& curve, double omega_radius, double epsilon) {
    return check_immersion(curve.c_gamma(), omega_radius, epsilon);
}

}  // namespace tube
