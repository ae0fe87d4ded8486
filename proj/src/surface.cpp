#include "tube/surface.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "tube/errors.hpp"

namespace tube {

GaussCurvature::GaussCurvature(std::string name, Fn k, Fn ks, Fn kss)
    : name_(std::move(name)), k_(std::move(k)), ks_(std::move(ks)), kss_(std::move(kss)) {}

GaussCurvature GaussCurvature::constant(double value) {
    return {"constant", [value](double, double) { return value; }, [](double, double) { return 0.0; },
            [](double, double) { return 0.0; }};
}

GaussCurvature GaussCurvature::cosine(double amplitude, double frequency, double phase) {
    return {"cosine", [=](double s, double) { return amplitude * std::cos(frequency * s + phase); },
            [=](double s, double) { return -amplitude * frequency * std::sin(frequency * s + phase); },
            [=](double s, double) { return -amplitude * frequency * frequency * std::cos(frequency * s + phase); }};
}

GaussCurvature GaussCurvature::product(double amplitude, double frequency, double slope) {
    return {"product", [=](double s, double t) { return amplitude * std::cos(frequency * s) * (1.0 + slope * t); },
            [=](double s, double t) { return -amplitude * frequency * std::sin(frequency * s) * (1.0 + slope * t); },
            [=](double s, double t) {
                return -amplitude * frequency * frequency * std::cos(frequency * s) * (1.0 + slope * t);
            }};
}

void SurfaceStripSpec::validate() const {
    if (!(length > 0.0)) throw PreconditionError("SurfaceStripSpec: length must be positive");
    if (!(epsilon > 0.0)) throw PreconditionError("SurfaceStripSpec: epsilon must be positive");
    constexpr int samples = 801;
    for (int i = 0; i < samples; ++i) {
        const double s = length * i / (samples - 1.0);
        if (!std::isfinite(kappa.value(s)) || !std::isfinite(kappa.derivative(s)) ||
            !std::isfinite(kappa.second_derivative(s)))
            throw PreconditionError("SurfaceStripSpec: geodesic curvature is not finite");
        for (double t : {-epsilon, 0.0, epsilon})
            if (!std::isfinite(gauss.value(s, t)) || !std::isfinite(gauss.ds(s, t)) || !std::isfinite(gauss.dss(s, t)))
                throw PreconditionError("SurfaceStripSpec: Gauss curvature is not finite");
    }
}

namespace {

/// (h, h_t, h_s, h_st, h_ss, h_sst)
using JacobiState = std::array<double, 6>;

/// K is read at the geodesic distance eps * t from the curve.
JacobiState jacobi_rhs(const GaussCurvature& gauss, double eps, double s, double t, const JacobiState& y) {
    const double eps2 = eps * eps, r = eps * t;
    const double k = gauss.value(s, r), ks = gauss.ds(s, r), kss = gauss.dss(s, r);
    return {y[1], -eps2 * k * y[0], y[3], -eps2 * (ks * y[0] + k * y[2]), y[5],
            -eps2 * (kss * y[0] + 2.0 * ks * y[2] + k * y[4])};
}

JacobiState rk4_step(const GaussCurvature& gauss, double eps, double s, double t, const JacobiState& y, double dt) {
    auto axpy = [](const JacobiState& a, double c, const JacobiState& b) {
        JacobiState r;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    const JacobiState k1 = jacobi_rhs(gauss, eps, s, t, y);
    const JacobiState k2 = jacobi_rhs(gauss, eps, s, t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const JacobiState k3 = jacobi_rhs(gauss, eps, s, t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const JacobiState k4 = jacobi_rhs(gauss, eps, s, t + dt, axpy(y, dt, k3));
    JacobiState out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

/// Jacobi solution along one geodesic s = const, at every t-node.
std::vector<JacobiState> integrate_line(const SurfaceStripSpec& spec, const Axis& t_axis, double s) {
    const double eps = spec.epsilon;
    const JacobiState start{1.0, -eps * spec.kappa.value(s), 0.0, -eps * spec.kappa.derivative(s), 0.0,
                            -eps * spec.kappa.second_derivative(s)};
    std::vector<JacobiState> out(t_axis.count);
    // March outward from t = 0 in each direction, visiting the nodes in order.
    for (int dir : {1, -1}) {
        JacobiState y = start;
        double t = 0.0;
        for (std::size_t step = 0; step < t_axis.count; ++step) {
            const std::size_t j = dir > 0 ? step : t_axis.count - 1 - step;
            const double target = t_axis.node(j);
            if ((dir > 0 && target < 0.0) || (dir < 0 && target >= 0.0)) continue;
            if (target != t) y = rk4_step(spec.gauss, eps, s, t, y, target - t);
            t = target;
            out[j] = y;
        }
    }
    return out;
}

void require_positive(double h, double s, double t) {
    if (!(h > 0.0)) {
        std::ostringstream msg;
        msg << "solve_jacobi_h: h = " << h << " at (s,t) = (" << s << ", " << t
            << "); the strip reaches a focal point of the boundary geodesics";
        throw GeometryError(msg.str());
    }
}

}  // namespace

JacobianField solve_jacobi_h(const SurfaceStripSpec& spec, const TensorGrid& grid) {
    spec.validate();
    if (grid.dim() != 2) throw AssemblyError("solve_jacobi_h: strips need a planar (d = 2) grid");
    if (!SurfaceStripSpec::cross_section().matches(grid)) throw AssemblyError("solve_jacobi_h: omega must be (-1, 1)");
    if (std::abs(grid.s().hi - spec.length) > 1e-12 * spec.length || grid.s().lo != 0.0)
        throw AssemblyError("solve_jacobi_h: grid does not span [0, L]");
    const Axis& t_axis = grid.t().front();
    const double eps = spec.epsilon, eps2 = eps * eps;
    const std::size_t ms = grid.s().count, nt = t_axis.count;

    JacobianField jf;
    jf.grid = grid;
    jf.epsilon = eps;
    const auto total = static_cast<Eigen::Index>(grid.size());
    jf.h.resize(total);
    jf.d1h.resize(total);
    jf.d11h.resize(total);
    jf.grad_t_sq.resize(total);
    jf.lap_t.resize(total);
    jf.h_mid.resize(static_cast<Eigen::Index>(ms + 1), static_cast<Eigen::Index>(nt));

    for (std::size_t i = 0; i < ms; ++i) {
        const double s = grid.s().node(i);
        const auto line = integrate_line(spec, t_axis, s);
        for (std::size_t j = 0; j < nt; ++j) {
            const double t = t_axis.node(j);
            const auto idx = static_cast<Eigen::Index>(grid.index(i, j));
            const JacobiState& y = line[j];
            require_positive(y[0], s, t);
            jf.h(idx) = y[0];
            jf.d1h(idx) = y[2];
            jf.d11h(idx) = y[4];
            jf.grad_t_sq(idx) = y[1] * y[1];
            jf.lap_t(idx) = -eps2 * spec.gauss.value(s, spec.epsilon * t) * y[0];
        }
    }
    for (std::size_t k = 0; k <= ms; ++k) {
        const double s = grid.s().midpoint(k);
        const auto line = integrate_line(spec, t_axis, s);
        for (std::size_t j = 0; j < nt; ++j) {
            require_positive(line[j][0], s, t_axis.node(j));
            jf.h_mid(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = line[j][0];
        }
    }
    return jf;
}

PotentialField surface_effective_potential(const SurfaceStripSpec& spec, const Axis& s_axis) {
    PotentialField v;
    v.v0.resize(static_cast<Eigen::Index>(s_axis.count));
    for (std::size_t i = 0; i < s_axis.count; ++i) {
        const double s = s_axis.node(i);
        const double k = spec.kappa.value(s);
        v.v0(static_cast<Eigen::Index>(i)) = -0.25 * k * k - 0.5 * spec.gauss.value(s, 0.0);
    }
    return v;
}

PotentialField surface_potential(const SurfaceStripSpec& spec, const JacobianField& jf) {
    PotentialField v = surface_effective_potential(spec, jf.grid.s());
    v.full = general_potential(jf);
    return v;
}

DiscreteOperator assemble_surface_T(const SurfaceStripSpec& spec, const JacobianField& jf, const TensorGrid& grid) {
    const PotentialField v = surface_potential(spec, jf);
    return assemble_T(jf, v, SurfaceStripSpec::cross_section(), spec.epsilon, grid);
}

DiscreteOperator assemble_surface_T(const SurfaceStripSpec& spec, const TensorGrid& grid) {
    return assemble_surface_T(spec, solve_jacobi_h(spec, grid), grid);
}

}  // namespace tube
