#pragma once

#include <functional>
#include <string>

#include "tube/cross_section.hpp"
#include "tube/geometry.hpp"
#include "tube/operators.hpp"

namespace tube {

/// Gauss curvature K(s,r) of the ambient surface at arc length s and signed geodesic distance r
/// from the curve, with two s-derivatives. On the strip it is read at r = eps t.
class GaussCurvature {
public:
    using Fn = std::function<double(double, double)>;

    GaussCurvature(std::string name, Fn k, Fn ks, Fn kss);

    static GaussCurvature constant(double value);
    /// amplitude * cos(frequency * s + phase)
    static GaussCurvature cosine(double amplitude, double frequency, double phase = 0.0);
    /// amplitude * cos(frequency * s) * (1 + slope * r)
    static GaussCurvature product(double amplitude, double frequency, double slope);

    double value(double s, double t) const { return k_(s, t); }
    double ds(double s, double t) const { return ks_(s, t); }
    double dss(double s, double t) const { return kss_(s, t); }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    Fn k_, ks_, kss_;
};

/// Strip of half-width eps about a curve of geodesic curvature kappa on a surface; omega = (-1, 1).
struct SurfaceStripSpec {
    double length = 1.0;
    CurvatureProfile kappa = CurvatureProfile::constant(0.0);
    GaussCurvature gauss = GaussCurvature::constant(0.0);
    double epsilon = 0.1;

    static CrossSection cross_section() { return CrossSection::interval(1.0); }
    /// Throws PreconditionError for non-finite samples of kappa (with two derivatives) or K.
    void validate() const;
};

/// Solves d_t^2 h + eps^2 K(s, eps t) h = 0, h(s,0) = 1, d_t h(s,0) = -eps kappa(s), outward from t = 0 with RK4
/// on the grid's t-nodes, at every s-node and s-midpoint. The s-derivatives come from the
/// differentiated (variational) Jacobi equations; Lap_t h = -eps^2 K(s, eps t) h is substituted exactly.
/// Throws GeometryError if h <= 0 is met (a focal point inside the strip).
JacobianField solve_jacobi_h(const SurfaceStripSpec& spec, const TensorGrid& grid);

/// v0(s) = -kappa(s)^2/4 - K(s,0)/2.
PotentialField surface_effective_potential(const SurfaceStripSpec& spec, const Axis& s_axis);

/// v0 together with the general potential of the metric diag(h^2, eps^2).
PotentialField surface_potential(const SurfaceStripSpec& spec, const JacobianField& jf);

/// H - eps^-2 E1 for the strip, sharing the flux-form assembly of the tube operator.
DiscreteOperator assemble_surface_T(const SurfaceStripSpec& spec, const JacobianField& jf, const TensorGrid& grid);
DiscreteOperator assemble_surface_T(const SurfaceStripSpec& spec, const TensorGrid& grid);

}  // namespace tube
