#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "tube/cross_section.hpp"
#include "tube/errors.hpp"

using namespace tube;
using std::numbers::pi;

namespace {

TensorGrid section_grid(const CrossSection& omega, std::size_t m) {
    std::vector<std::size_t> counts(omega.transverse_dims(), m);
    return TensorGrid::box(1.0, 8, omega.sides(), counts);
}

// Dense 3-point Dirichlet Laplacian on the transverse box of `grid`.
Eigen::VectorXd dense_transverse_spectrum(const TensorGrid& grid) {
    const auto n = grid.transverse_count();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t p = 0; p < n; ++p) {
        auto mp = grid.transverse_multi_index(p);
        for (std::size_t q = 0; q < n; ++q) {
            auto mq = grid.transverse_multi_index(q);
            double v = 0.0;
            std::size_t differ = 0, axis = 0;
            for (std::size_t k = 0; k < mp.size(); ++k)
                if (mp[k] != mq[k]) {
                    ++differ;
                    axis = k;
                }
            if (differ == 0) {
                for (const auto& ax : grid.t()) v += 2.0 / (ax.spacing() * ax.spacing());
            } else if (differ == 1 && (mp[axis] + 1 == mq[axis] || mq[axis] + 1 == mp[axis])) {
                double h = grid.t()[axis].spacing();
                v = -1.0 / (h * h);
            }
            a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = v;
        }
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_SUITE("cross_section") {

TEST_CASE("interval eigenpairs") {
    auto omega = CrossSection::interval();
    CHECK(omega.radius() == 1.0);
    auto e1 = transverse_eigenpair(omega, 1);
    CHECK(e1.value == doctest::Approx(pi * pi / 4).epsilon(1e-15));
    for (double t : {-0.7, 0.0, 0.4}) {
        std::array<double, 1> p{t};
        CHECK(e1(p) == doctest::Approx(std::cos(pi * t / 2)).epsilon(1e-14));
    }
    auto e2 = transverse_eigenpair(omega, 2);
    CHECK(e2.value == doctest::Approx(pi * pi).epsilon(1e-15));
    CHECK(e2.value - e1.value == doctest::Approx(3 * pi * pi / 4));
}

TEST_CASE("square eigenpairs") {
    auto omega = CrossSection::rectangle({1.0, 1.0});
    CHECK(omega.radius() == doctest::Approx(std::sqrt(0.5)));
    CHECK(transverse_eigenpair(omega, 1).value == doctest::Approx(2 * pi * pi));
    auto e2 = transverse_eigenpair(omega, 2);
    auto e3 = transverse_eigenpair(omega, 3);
    CHECK(e2.value == doctest::Approx(5 * pi * pi));
    CHECK(e3.value == doctest::Approx(5 * pi * pi));
    CHECK(e2.modes < e3.modes);
}

TEST_CASE("ground state is normalized, positive and linear at the boundary") {
    for (auto omega : {CrossSection::interval(), CrossSection::interval(0.5), CrossSection::rectangle({1.0, 2.0})}) {
        auto g = section_grid(omega, 199);
        auto j = transverse_eigenpair(omega, 1).sample(g);
        double sum = 0.0;
        for (double v : j) {
            CHECK(v > 0.0);
            sum += v * v;
        }
        // the midpoint rule is spectrally accurate for a product of squared sines
        CHECK(sum * g.transverse_cell() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(ground_state_boundary_ratio(omega, g) > 0.0);
    }
}

TEST_CASE("analytic eigenvalues match the dense stencil at second order") {
    for (auto omega : {CrossSection::interval(), CrossSection::rectangle({1.0, 2.0})}) {
        std::size_t m1 = omega.transverse_dims() == 1 ? 39 : 15;
        auto coarse = dense_transverse_spectrum(section_grid(omega, m1));
        auto fine = dense_transverse_spectrum(section_grid(omega, 2 * m1 + 1));
        for (std::size_t n = 1; n <= 10; ++n) {
            double exact = transverse_eigenpair(omega, n).value;
            double ec = std::abs(coarse[static_cast<Eigen::Index>(n - 1)] - exact);
            double ef = std::abs(fine[static_cast<Eigen::Index>(n - 1)] - exact);
            CHECK(std::log2(ec / ef) >= 1.9);
            CHECK(transverse_eigenpair(omega, n).discrete_value(section_grid(omega, m1)) ==
                  doctest::Approx(coarse[static_cast<Eigen::Index>(n - 1)]).epsilon(1e-10));
        }
        CHECK(discrete_poincare_constant(section_grid(omega, m1)) == doctest::Approx(coarse[0]).epsilon(1e-12));
    }
}

TEST_CASE("poincare ratio examples") {
    auto omega = CrossSection::interval();
    double prev1 = 1e300, prev2 = 1e300;
    for (std::size_t m : {49u, 99u, 199u}) {
        auto g = section_grid(omega, m);
        double r1 = std::abs(poincare_ratio(omega, g, transverse_eigenpair(omega, 1).sample(g)) - pi * pi / 4);
        double r2 = std::abs(poincare_ratio(omega, g, transverse_eigenpair(omega, 2).sample(g)) - pi * pi);
        CHECK(r1 < prev1);
        CHECK(r2 < prev2);
        prev1 = r1;
        prev2 = r2;
    }
    CHECK(prev1 < 1e-4);
    CHECK(prev2 < 1e-3);

    auto g = section_grid(omega, 201);
    const double e1h = discrete_poincare_constant(g);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        double c = 0.8 * u(rng), w = 0.05 + 0.2 * std::abs(u(rng));
        std::vector<double> psi(g.transverse_count());
        for (std::size_t k = 0; k < psi.size(); ++k) {
            double t = g.transverse_point(k)[0];
            psi[k] = std::exp(-(t - c) * (t - c) / (w * w)) * (1 - t * t) + 0.01 * u(rng);
        }
        CHECK(poincare_ratio(omega, g, psi) >= e1h * (1.0 - 1e-12));
    }
    std::vector<double> zero(g.transverse_count(), 0.0);
    CHECK_THROWS_AS(poincare_ratio(omega, g, zero), DegenerateInputError);
}

TEST_CASE("invalid cross-sections") {
    CHECK_THROWS_AS(CrossSection::rectangle({}), PreconditionError);
    CHECK_THROWS_AS(CrossSection::rectangle({1.0, -1.0}), PreconditionError);
    CHECK_THROWS_AS(transverse_eigenpair(CrossSection::interval(), 0), PreconditionError);
}

}
