#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tube/errors.hpp"
#include "tube/sweep.hpp"

using namespace tube;
using std::numbers::pi;

namespace {

SweepConfig planar(double kappa, std::vector<double> eps, std::size_t m = 120, std::size_t mt = 24) {
    SweepConfig c;
    c.curve = CurveSpec(2, pi, CurvatureProfile::constant(kappa));
    c.eps = std::move(eps);
    c.n = 2;
    c.s_nodes = m;
    c.t_nodes = {mt};
    return c;
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("kronecker sum") {
    auto s = kronecker_sum({1.0, 4.0, 9.0}, {2.0, 5.0}, 0.5, 2.0, 4);
    CHECK(s == std::vector<double>{1.0, 4.0, 9.0, 13.0});
    CHECK(kronecker_sum({1.0}, {2.0}, 1.0, 2.0, 5).size() == 1);
}

TEST_CASE("discrete transverse values are the sorted stencil eigenvalues") {
    auto c = planar(1.0, {0.1}, 20, 15);
    auto v = discrete_transverse_values(c.omega, c.grid(), 3);
    REQUIRE(v.size() == 3);
    CHECK(v[0] < v[1]);
    CHECK(v[0] == doctest::Approx(discrete_poincare_constant(c.grid())).epsilon(1e-13));
    CHECK(v[0] < pi * pi / 4);
}

TEST_CASE("grid helpers") {
    auto c = planar(1.0, {0.2, 0.1, 0.05}, 400, 60);
    CHECK(c.grid().s().count == 400);
    auto coarse = c.coarse_grid();
    REQUIRE(coarse);
    CHECK(coarse->s().count == 199);
    CHECK(coarse->t()[0].count == 29);
    c.s_nodes = 12;
    CHECK_FALSE(c.coarse_grid());
}

TEST_CASE("constant curvature sweep on a small grid") {
    auto c = planar(1.0, {0.2, 0.1, 0.05});
    auto r = sweep_epsilon(c);
    CHECK(r.failed_rows() == 0);
    REQUIRE(r.rows.size() == 6);
    for (const auto& row : r.rows) {
        CHECK(row.converged);
        CHECK(row.poincare_ok);
        CHECK(row.unitarity_error <= 1e-10);
        CHECK(row.sign_domains == row.n);
        CHECK(row.violations == 0);
        CHECK(row.empirical_margin <= 10 * row.epsilon);
        CHECK(row.lambda == doctest::Approx(row.sigma + pi * pi / 4 / (row.epsilon * row.epsilon)));
        if (row.n == 2) CHECK(row.boundary_terminations == 2);
    }
    CHECK(r.find(0.05, 1)->overlap >= 0.99);
    CHECK(r.find(0.05, 2)->overlap >= 0.99);
    for (std::size_t n = 1; n <= 2; ++n) {
        REQUIRE(r.slope("gap", n)->fit);
        CHECK(r.slope("gap", n)->fit->slope >= 0.9);
        CHECK(r.slope("weighted_error", n)->fit->slope >= 0.8);
        // halving eps at least reduces the weighted error by the first-order factor
        CHECK(r.find(0.05, n)->weighted_error <= 0.65 * r.find(0.1, n)->weighted_error);
    }
    for (const auto& e : r.epsilons) {
        CHECK(e.bracket_ok);
        CHECK(e.simple);
        CHECK(e.courant_ok);
    }
    CHECK(r.simple_at_smallest);
    CHECK(r.courant_at_smallest);
    // constant curvature keeps the reflection symmetry, so the nodal line of psi_2 does not move
    CHECK(r.slope("nodal_displacement", 2)->floor_limited);
}

TEST_CASE("straight tube sweep is floor-limited") {
    auto r = sweep_epsilon(planar(0.0, {0.2, 0.1, 0.05}, 60, 15));
    for (const auto& row : r.rows) {
        CHECK_FALSE(row.above_floor);
        CHECK(row.gap <= row.floor);
    }
    CHECK(r.slope("gap", 1)->floor_limited);
    CHECK(r.slope("gap", 2)->floor_limited);
    CHECK(r.slope("gap", 1)->note.find("floor-limited") != std::string::npos);
}

TEST_CASE("sweep preconditions") {
    CHECK_THROWS_AS(sweep_epsilon(planar(1.0, {0.2, 0.1})), PreconditionError);
    auto c = planar(1.0, {0.2, -0.1, 0.05});
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    SweepConfig empty;
    empty.eps = {0.1, 0.05, 0.025};
    CHECK_THROWS_AS(empty.validate(), PreconditionError);
}

TEST_CASE("asymmetric curvature moves the nodal line toward its limit") {
    SweepConfig c = planar(0.0, {0.2, 0.1, 0.05}, 160, 24);
    c.curve = CurveSpec(2, pi, CurvatureProfile::sine(1.0, 0.5));
    c.compute_floor = false;
    c.check_bracket = false;
    auto r = sweep_epsilon(c);
    double prev = 1e300;
    for (double e : c.eps) {
        double d = r.find(e, 2)->nodal_displacement;
        CHECK(d < prev);
        prev = d;
    }
    CHECK(r.slope("nodal_displacement", 2)->fit->slope >= 0.8);
}

TEST_CASE("assembled operators for a strip") {
    SweepConfig c;
    c.kind = GeometryKind::Surface;
    SurfaceStripSpec s;
    s.length = pi;
    s.gauss = GaussCurvature::constant(1.0);
    c.surface = s;
    c.eps = {0.1};
    c.s_nodes = 40;
    c.t_nodes = {15};
    auto ops = assemble_operators(c, 0.1);
    CHECK(ops.T.dimension() == 600);
    CHECK(ops.S.dimension() == 40);
    auto a = analyze_epsilon(c, 0.1);
    CHECK(a.summary.error.empty());
    CHECK(a.rows.size() == 3);
    CHECK(a.rows[0].mu == doctest::Approx(1.0 - 0.5).epsilon(1e-3));
}

}
