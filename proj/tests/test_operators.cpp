#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tube/cross_section.hpp"
#include "tube/eigensolve.hpp"
#include "tube/errors.hpp"
#include "tube/geometry.hpp"
#include "tube/operators.hpp"

using namespace tube;
using std::numbers::pi;

namespace {

TensorGrid planar_grid(double length, std::size_t m, std::size_t mt) {
    std::array<double, 1> sides{2.0};
    std::array<std::size_t, 1> counts{mt};
    return TensorGrid::box(length, m, sides, counts);
}

struct Planar {
    CurveSpec curve;
    TensorGrid grid;
    JacobianField jf;
    PotentialField v;
    CrossSection omega = CrossSection::interval();
    double eps;

    Planar(CurvatureProfile kappa, double length, std::size_t m, std::size_t mt, double e)
        : curve(2, length, std::move(kappa)),
          grid(planar_grid(length, m, mt)),
          jf(jacobian_field(curve, solve_tang_frame(curve, tang_frame_steps(grid)), e, grid)),
          v(full_potential(jf, curve)),
          eps(e) {}

    DiscreteOperator T() const { return assemble_T(jf, v, omega, eps, grid); }
    DiscreteOperator H() const { return assemble_H(jf, v, omega, eps, grid); }
    DiscreteOperator T0() const { return assemble_T0(v, omega, eps, grid); }
    DiscreteOperator S() const { return assemble_S(v, grid.s()); }
};

double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

// Galerkin in the sine basis of (0,1) for -u'' - sin^2(pi s)/4 u; the basis is exact for the
// unperturbed part and the potential couples modes j, j +- 2 only.
double sine_galerkin_mu1(std::size_t modes) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(modes));
    for (std::size_t j = 1; j <= modes; ++j)
        for (std::size_t k = 1; k <= modes; ++k) {
            double v = 0.0;
            if (j == k) v += std::pow(static_cast<double>(k) * pi, 2) - 0.125;
            if (j + 2 == k || k + 2 == j) v += 0.0625;
            if (j == 1 && k == 1) v -= 0.0625;
            a(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k - 1)) = v;
        }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues()[0];
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("effective potential examples") {
    Axis axis{0.0, pi, 50};
    CHECK(effective_potential(CurveSpec(2, pi, CurvatureProfile::constant(0.0)), axis).v0.cwiseAbs().maxCoeff() == 0.0);
    auto one = effective_potential(CurveSpec(2, pi, CurvatureProfile::constant(1.0)), axis);
    CHECK((one.v0.array() + 0.25).abs().maxCoeff() == 0.0);
    auto sine = effective_potential(CurveSpec(2, pi, CurvatureProfile::sine(1.0, 1.0)), axis);
    for (std::size_t i = 0; i < axis.count; ++i) {
        double s = axis.node(i);
        CHECK(sine.v0[static_cast<Eigen::Index>(i)] == doctest::Approx(-std::sin(s) * std::sin(s) / 4).epsilon(1e-14));
    }
}

TEST_CASE("full potential examples") {
    Planar straight(CurvatureProfile::constant(0.0), pi, 20, 9, 0.1);
    CHECK(straight.v.full.cwiseAbs().maxCoeff() == 0.0);

    const double k = 1.0, eps = 0.2;
    Planar p(CurvatureProfile::constant(k), pi, 20, 9, eps);
    for (std::size_t i = 0; i < p.grid.s().count; ++i)
        for (std::size_t tau = 0; tau < p.grid.transverse_count(); ++tau) {
            double t = p.grid.transverse_point(tau)[0];
            double expect = -k * k / (4 * std::pow(1 - eps * k * t, 2));
            CHECK(p.v.full[static_cast<Eigen::Index>(p.grid.index(i, tau))] == doctest::Approx(expect).epsilon(1e-14));
        }
    CHECK(p.v.v0.cwiseAbs().maxCoeff() <= p.curve.c_gamma() * p.curve.c_gamma() / 4 + 1e-15);
}

TEST_CASE("general potential reduces to the tube potential") {
    Planar p(CurvatureProfile::sine(1.2, 2.0, 0.3), 3.0, 40, 15, 0.15);
    Eigen::VectorXd g = general_potential(p.jf);
    CHECK((g - p.v.full).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + p.v.full.cwiseAbs().maxCoeff()));
}

TEST_CASE("V - v0 decays at least linearly in eps") {
    double prev = 0.0;
    for (double eps : {0.1, 0.05, 0.025}) {
        Planar p(CurvatureProfile::sine(1.0, 1.0), pi, 100, 19, eps);
        double dev = p.v.deviation(p.grid);
        CHECK(dev <= measure_assumption_constants(p.jf, p.v).constant * eps);
        if (prev > 0.0) CHECK(dev <= 0.5 * prev * 1.1);
        prev = dev;
    }
}

TEST_CASE("assembled operators are exactly symmetric") {
    Planar p(CurvatureProfile::sine(1.0, 1.5), 2.0, 30, 11, 0.2);
    for (const auto& op : {p.T(), p.H(), p.T0(), p.S()}) {
        Eigen::SparseMatrix<double> a = op.full();
        Eigen::SparseMatrix<double> at = a.transpose();
        CHECK((a - at).norm() == 0.0);
        // stencil sign pattern: off-diagonal couplings are non-positive
        for (Eigen::Index c = 0; c < a.outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it)
                if (it.row() != it.col()) CHECK(it.value() <= 0.0);
    }
}

TEST_CASE("H - T is the eps^-2 E1 shift") {
    Planar p(CurvatureProfile::constant(1.0), pi, 30, 11, 0.1);
    Eigen::MatrixXd diff = p.H().dense() - p.T().dense();
    const double shift = std::pow(p.eps, -2) * pi * pi / 4;
    // exact up to the rounding of one addition on the diagonal
    const double ulp = 4 * std::numeric_limits<double>::epsilon() * p.H().dense().cwiseAbs().maxCoeff();
    CHECK((diff - shift * Eigen::MatrixXd::Identity(diff.rows(), diff.cols())).cwiseAbs().maxCoeff() <= ulp);
    auto h = dense_oracle(p.H(), 4);
    auto t = dense_oracle(p.T(), 4);
    for (std::size_t n = 0; n < 4; ++n)
        CHECK(std::abs(h.values[n] - t.values[n] - shift) <= 1e-12 * std::abs(h.values[n]));
}

TEST_CASE("straight tube: T equals T0 and eigenvalues converge") {
    Planar p(CurvatureProfile::constant(0.0), pi, 40, 19, 0.1);
    CHECK((p.T().dense() - p.T0().dense()).cwiseAbs().maxCoeff() == 0.0);

    std::vector<double> t_err, h_err;
    for (std::size_t r : {1u, 2u, 4u}) {
        Planar q(CurvatureProfile::constant(0.0), pi, 50 * r - 1, 20 * r - 1, 0.1);
        t_err.push_back(std::abs(lowest_eigenpairs(q.T(), 1).values[0] - 1.0));
        h_err.push_back(std::abs(lowest_eigenpairs(q.H(), 1).values[0] - (1.0 + 100 * pi * pi / 4)));
    }
    for (std::size_t i = 0; i + 1 < t_err.size(); ++i) {
        CHECK(std::log2(t_err[i] / t_err[i + 1]) >= 1.9);
        CHECK(std::log2(h_err[i] / h_err[i + 1]) >= 1.9);
    }
}

TEST_CASE("constant curvature T on 40x20 matches the dense oracle") {
    Planar p(CurvatureProfile::constant(1.0), pi, 40, 20, 0.1);
    auto it = lowest_eigenpairs(p.T(), 6, 1e-12);
    auto de = dense_oracle(p.T(), 6);
    for (std::size_t n = 0; n < 6; ++n)
        CHECK(std::abs(it.values[n] - de.values[n]) <= 1e-10 * std::max(1.0, std::abs(de.values[n])));
}

TEST_CASE("T0 spectrum is the Kronecker sum") {
    Planar p(CurvatureProfile::sine(1.0, 1.0), pi, 30, 15, 0.1);
    Eigen::VectorXd t0 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p.T0().dense(), Eigen::EigenvaluesOnly).eigenvalues();
    Eigen::VectorXd mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p.S().dense(), Eigen::EigenvaluesOnly).eigenvalues();
    const double e1 = pi * pi / 4;
    std::vector<double> sums;
    for (std::size_t j = 1; j <= 15; ++j) {
        double ej = transverse_eigenpair(p.omega, j).discrete_value(p.grid);
        for (Eigen::Index i = 0; i < mu.size(); ++i) sums.push_back(mu[i] + (ej - e1) / (p.eps * p.eps));
    }
    std::sort(sums.begin(), sums.end());
    REQUIRE(sums.size() == static_cast<std::size_t>(t0.size()));
    for (std::size_t k = 0; k < sums.size(); ++k)
        CHECK(std::abs(t0[static_cast<Eigen::Index>(k)] - sums[k]) <= 1e-9 * std::max(1.0, std::abs(sums[k])));

    // lowest eigenvalue of T0 is mu_1 shifted by the transverse discretization offset
    double e1h = transverse_eigenpair(p.omega, 1).discrete_value(p.grid);
    CHECK(std::abs(lowest_eigenpairs(p.T0(), 1).values[0] - (mu[0] + (e1h - e1) / (p.eps * p.eps))) <= 1e-9);
}

TEST_CASE("S spectrum examples") {
    Axis axis{0.0, pi, 199};
    auto free = assemble_S(effective_potential(CurveSpec(2, pi, CurvatureProfile::constant(0.0)), axis), axis);
    auto r = dense_oracle(free, 5);
    const double ds = axis.spacing();
    for (std::size_t n = 1; n <= 5; ++n) {
        double exact = 2.0 / (ds * ds) * (1 - std::cos(static_cast<double>(n) * pi * ds / pi));
        CHECK(r.values[n - 1] == doctest::Approx(exact).epsilon(1e-12));
        CHECK(std::abs(r.values[n - 1] - double(n * n)) < 1e-3 * double(n * n * n * n));
    }

    std::vector<double> err;
    for (std::size_t m : {99u, 199u, 399u}) {
        Axis a{0.0, pi, m};
        auto s = assemble_S(effective_potential(CurveSpec(2, pi, CurvatureProfile::constant(1.0)), a), a);
        err.push_back(std::abs(dense_oracle(s, 3).values[2] - (9.0 - 0.25)));
    }
    CHECK(std::log2(err[0] / err[1]) >= 1.9);
    CHECK(std::log2(err[1] / err[2]) >= 1.9);
}

TEST_CASE("mu_1 for v0 = -sin^2(pi s)/4 against a sine-Galerkin oracle") {
    CurveSpec curve(2, 1.0, CurvatureProfile::sine(1.0, pi));
    std::vector<double> mu;
    for (std::size_t m : {199u, 399u, 799u}) {
        Axis a{0.0, 1.0, m};
        mu.push_back(dense_oracle(assemble_S(effective_potential(curve, a), a), 1).values[0]);
    }
    double extrapolated = richardson(mu[1], mu[2]);
    double oracle = sine_galerkin_mu1(40);
    CHECK(std::abs(sine_galerkin_mu1(20) - oracle) < 1e-13);
    CHECK(std::abs(extrapolated - oracle) <= 1e-8);
    CHECK(std::abs(richardson(mu[0], mu[1]) - oracle) > std::abs(extrapolated - oracle));
}

TEST_CASE("spectrum of T is bounded below and bracketed by T-minus and T-plus") {
    Planar p(CurvatureProfile::sine(1.0, 2.0), 2.0, 30, 11, 0.15);
    auto c = measure_assumption_constants(p.jf, p.v);
    auto t = dense_oracle(p.T(), 8);
    CHECK(t.values[0] >= -(1.0 + c.constant));
    auto lo = dense_oracle(assemble_T_bound(p.v, p.omega, p.eps, p.grid, c.bracket_constant, -1), 8);
    auto hi = dense_oracle(assemble_T_bound(p.v, p.omega, p.eps, p.grid, c.bracket_constant, +1), 8);
    for (std::size_t n = 0; n < 8; ++n) {
        CHECK(lo.values[n] <= t.values[n] + 1e-9);
        CHECK(t.values[n] <= hi.values[n] + 1e-9);
    }
    CHECK_THROWS_AS(assemble_T_bound(p.v, p.omega, p.eps, p.grid, 1.0, 0), PreconditionError);
}

TEST_CASE("assembly rejects mismatched inputs") {
    Planar p(CurvatureProfile::constant(1.0), pi, 20, 9, 0.1);
    CHECK_THROWS_AS(assemble_T(p.jf, p.v, p.omega, 0.2, p.grid), AssemblyError);
    CHECK_THROWS_AS(assemble_T(p.jf, p.v, CrossSection::interval(0.5), p.eps, p.grid), AssemblyError);
    auto other = planar_grid(pi, 21, 9);
    CHECK_THROWS_AS(assemble_T(p.jf, p.v, p.omega, p.eps, other), AssemblyError);
}

TEST_CASE("coordinate export lists every stored entry of the full matrix") {
    Planar p(CurvatureProfile::constant(1.0), pi, 8, 8, 0.1);
    auto t = p.T();
    std::ostringstream out;
    write_coo(t, out);
    std::istringstream in(out.str());
    Eigen::MatrixXd back = Eigen::MatrixXd::Zero(t.dense().rows(), t.dense().cols());
    std::size_t lines = 0;
    long i, j;
    double v;
    while (in >> i >> j >> v) {
        back(i, j) = v;
        ++lines;
    }
    CHECK(lines == static_cast<std::size_t>(t.full().nonZeros()));
    CHECK((back - t.dense()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.norm_inf() >= t.dense().cwiseAbs().rowwise().sum().maxCoeff() * (1 - 1e-15));
    CHECK(t.gershgorin_lower() <= dense_oracle(t, 1).values[0]);
}

}
