#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "tube/eigensolve.hpp"
#include "tube/errors.hpp"
#include "tube/surface.hpp"

using namespace tube;
using std::numbers::pi;

namespace {

TensorGrid strip_grid(double length, std::size_t m, std::size_t mt) {
    std::array<double, 1> sides{2.0};
    std::array<std::size_t, 1> counts{mt};
    return TensorGrid::box(length, m, sides, counts);
}

SurfaceStripSpec strip(double length, CurvatureProfile kappa, GaussCurvature gauss, double eps) {
    SurfaceStripSpec s;
    s.length = length;
    s.kappa = std::move(kappa);
    s.gauss = std::move(gauss);
    s.epsilon = eps;
    return s;
}

// h(s, t_end) from h'' = -eps^2 K h by RK4 with `steps` uniform steps from t = 0.
double jacobi_reference(const SurfaceStripSpec& spec, double s, double t_end, std::size_t steps) {
    const double e2 = spec.epsilon * spec.epsilon;
    double h = 1.0, p = -spec.epsilon * spec.kappa.value(s), t = 0.0;
    const double dt = t_end / static_cast<double>(steps);
    auto acc = [&](double tt, double hh) { return -e2 * spec.gauss.value(s, spec.epsilon * tt) * hh; };
    for (std::size_t k = 0; k < steps; ++k) {
        double k1h = p, k1p = acc(t, h);
        double k2h = p + dt / 2 * k1p, k2p = acc(t + dt / 2, h + dt / 2 * k1h);
        double k3h = p + dt / 2 * k2p, k3p = acc(t + dt / 2, h + dt / 2 * k2h);
        double k4h = p + dt * k3p, k4p = acc(t + dt, h + dt * k3h);
        h += dt / 6 * (k1h + 2 * k2h + 2 * k3h + k4h);
        p += dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        t += dt;
    }
    return h;
}

}  // namespace

TEST_SUITE("surface") {

TEST_CASE("flat surface recovers the planar jacobian") {
    auto spec = strip(3.0, CurvatureProfile::sine(0.8, 1.3), GaussCurvature::constant(0.0), 0.2);
    auto g = strip_grid(3.0, 30, 11);
    auto jf = solve_jacobi_h(spec, g);
    for (std::size_t i = 0; i < g.s().count; ++i)
        for (std::size_t tau = 0; tau < g.transverse_count(); ++tau) {
            double s = g.s().node(i), t = g.transverse_point(tau)[0];
            auto k = static_cast<Eigen::Index>(g.index(i, tau));
            CHECK(jf.h[k] == doctest::Approx(1 - 0.2 * spec.kappa.value(s) * t).epsilon(1e-13));
            CHECK(jf.d1h[k] == doctest::Approx(-0.2 * spec.kappa.derivative(s) * t).epsilon(1e-12));
            CHECK(jf.lap_t[k] == 0.0);
        }
}

TEST_CASE("constant Gauss curvature gives a cosine profile") {
    const double k = 2.0, eps = 0.3;
    auto spec = strip(1.0, CurvatureProfile::constant(0.0), GaussCurvature::constant(k), eps);
    auto g = strip_grid(1.0, 10, 41);
    auto jf = solve_jacobi_h(spec, g);
    for (std::size_t tau = 0; tau < g.transverse_count(); ++tau) {
        double t = g.transverse_point(tau)[0];
        CHECK(jf.h[static_cast<Eigen::Index>(g.index(4, tau))] == doctest::Approx(std::cos(std::sqrt(k) * eps * t)).epsilon(1e-9));
        CHECK(jf.lap_t[static_cast<Eigen::Index>(g.index(4, tau))] ==
              doctest::Approx(-eps * eps * k * std::cos(std::sqrt(k) * eps * t)).epsilon(1e-9));
    }
}

TEST_CASE("variable Gauss curvature against a refined reference integration") {
    auto spec = strip(2.0, CurvatureProfile::constant(0.3), GaussCurvature::cosine(1.0, 1.0), 0.4);
    auto g = strip_grid(2.0, 20, 40);
    auto jf = solve_jacobi_h(spec, g);
    double err = 0.0;
    for (std::size_t i = 0; i < g.s().count; i += 3)
        for (std::size_t tau = 0; tau < g.transverse_count(); ++tau) {
            double s = g.s().node(i), t = g.transverse_point(tau)[0];
            double ref = jacobi_reference(spec, s, t, 2000);
            err = std::max(err, std::abs(jf.h[static_cast<Eigen::Index>(g.index(i, tau))] - ref));
        }
    CHECK(err <= 1e-8);

    // s-derivatives from the variational equations agree with differences of h
    auto spec2 = strip(2.0, CurvatureProfile::sine(0.5, 1.0), GaussCurvature::product(1.0, 1.0, 0.5), 0.4);
    auto jf2 = solve_jacobi_h(spec2, g);
    const std::size_t i = 10, tau = 5;
    const double s = g.s().node(i), t = g.transverse_point(tau)[0], d = 1e-4;
    double hp = jacobi_reference(spec2, s + d, t, 4000), hm = jacobi_reference(spec2, s - d, t, 4000);
    double h0 = jacobi_reference(spec2, s, t, 4000);
    CHECK(jf2.d1h[static_cast<Eigen::Index>(g.index(i, tau))] == doctest::Approx((hp - hm) / (2 * d)).epsilon(1e-6));
    CHECK(jf2.d11h[static_cast<Eigen::Index>(g.index(i, tau))] ==
          doctest::Approx((hp - 2 * h0 + hm) / (d * d)).epsilon(1e-3));
}

TEST_CASE("focal point raises a geometry error") {
    auto spec = strip(1.0, CurvatureProfile::constant(0.0), GaussCurvature::constant(10.0), 0.6);
    CHECK_THROWS_AS(solve_jacobi_h(spec, strip_grid(1.0, 10, 21)), GeometryError);
}

TEST_CASE("effective potential examples") {
    Axis a{0.0, pi, 40};
    auto v1 = surface_effective_potential(strip(pi, CurvatureProfile::constant(0.0), GaussCurvature::constant(3.0), 0.1), a);
    CHECK((v1.v0.array() + 1.5).abs().maxCoeff() == 0.0);
    auto v2 = surface_effective_potential(strip(pi, CurvatureProfile::constant(1.0), GaussCurvature::constant(0.0), 0.1), a);
    CHECK((v2.v0.array() + 0.25).abs().maxCoeff() == 0.0);
    auto v3 = surface_effective_potential(strip(pi, CurvatureProfile::sine(1.0, 1.0), GaussCurvature::cosine(1.0, 1.0), 0.1), a);
    for (std::size_t i = 0; i < a.count; ++i) {
        double s = a.node(i);
        CHECK(v3.v0[static_cast<Eigen::Index>(i)] ==
              doctest::Approx(-std::sin(s) * std::sin(s) / 4 - std::cos(s) / 2).epsilon(1e-14));
    }
}

TEST_CASE("flat strip operator matches the planar tube operator") {
    const double eps = 0.15;
    auto kappa = CurvatureProfile::sine(1.0, 1.0, 0.4);
    auto spec = strip(pi, kappa, GaussCurvature::constant(0.0), eps);
    auto g = strip_grid(pi, 60, 19);
    Eigen::MatrixXd surf = assemble_surface_T(spec, g).dense();

    CurveSpec curve(2, pi, kappa);
    auto jf = jacobian_field(curve, solve_tang_frame(curve, tang_frame_steps(g)), eps, g);
    Eigen::MatrixXd tube = assemble_T(jf, full_potential(jf, curve), CrossSection::interval(), eps, g).dense();
    CHECK((surf - tube).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, tube.cwiseAbs().maxCoeff()));
}

TEST_CASE("V - v0 decays at least linearly for smooth K") {
    double prev = 0.0;
    for (double eps : {0.2, 0.1, 0.05}) {
        auto spec = strip(pi, CurvatureProfile::sine(0.5, 1.0), GaussCurvature::product(1.0, 1.0, 0.5), eps);
        auto g = strip_grid(pi, 60, 19);
        auto jf = solve_jacobi_h(spec, g);
        double dev = surface_potential(spec, jf).deviation(g);
        if (prev > 0.0) CHECK(dev <= 0.55 * prev);
        prev = dev;
    }
}

TEST_CASE("validation of the strip data") {
    auto bad = strip(0.0, CurvatureProfile::constant(0.0), GaussCurvature::constant(0.0), 0.1);
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    auto nan = strip(1.0, CurvatureProfile::constant(0.0), GaussCurvature::constant(std::nan("")), 0.1);
    CHECK_THROWS_AS(nan.validate(), PreconditionError);
    auto spec = strip(1.0, CurvatureProfile::constant(0.0), GaussCurvature::constant(1.0), 0.1);
    std::array<double, 1> sides{1.0};
    std::array<std::size_t, 1> counts{9};
    CHECK_THROWS_AS(solve_jacobi_h(spec, TensorGrid::box(1.0, 10, sides, counts)), AssemblyError);
}

}
