#include "tube/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "tube/analysis.hpp"
#include "tube/eigensolve.hpp"
#include "tube/errors.hpp"
#include "tube/format.hpp"
#include "tube/operators.hpp"
#include "tube/surface.hpp"
#include "tube/sweep.hpp"

namespace tube {

bool ValidationReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

struct Tube {
    CurveSpec curve;
    CrossSection omega;
    TensorGrid grid;
    double epsilon;
    JacobianField jf;
    PotentialField v;
};

Tube make_tube(CurveSpec curve, CrossSection omega, TensorGrid grid, double epsilon) {
    const RotationPath rot = solve_tang_frame(curve, tang_frame_steps(grid));
    JacobianField jf = jacobian_field(curve, rot, epsilon, grid);
    PotentialField v = full_potential(jf, curve);
    return {std::move(curve), std::move(omega), std::move(grid), epsilon, std::move(jf), std::move(v)};
}

/// Random smooth curve and cross-section with eps inside the admissible range.
Tube random_tube(std::mt19937_64& rng, std::size_t dim, std::size_t max_s, std::size_t max_t) {
    const double length = uniform(rng, 1.0, 4.0);
    CurvatureProfile kappa1 = CurvatureProfile::sine(uniform(rng, 0.2, 1.5), uniform(rng, 0.3, 2.0), uniform(rng, 0.0, kPi));
    std::vector<CurvatureProfile> higher;
    for (std::size_t i = 2; i < dim; ++i) higher.push_back(CurvatureProfile::constant(uniform(rng, 0.0, 0.8)));
    CurveSpec curve(dim, length, kappa1, higher);
    std::vector<double> sides;
    for (std::size_t i = 1; i < dim; ++i) sides.push_back(uniform(rng, 1.0, 2.5));
    CrossSection omega = dim == 2 ? CrossSection::interval(0.5 * sides.front()) : CrossSection::rectangle(sides);
    const double threshold = check_immersion(curve, omega.radius(), 1.0).threshold;
    const double eps = std::min(0.3, uniform(rng, 0.1, 0.9) * threshold);
    std::vector<std::size_t> counts;
    for (std::size_t i = 1; i < dim; ++i) counts.push_back(uniform_int(rng, 8, max_t));
    TensorGrid grid = TensorGrid::box(length, uniform_int(rng, 8, max_s), omega.sides(), counts);
    return make_tube(std::move(curve), std::move(omega), std::move(grid), eps);
}

template <class Fn>
CheckResult timed(const std::string& name, Fn&& body) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = name;
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// max |x - s y| / max |y| over the sign s that fits best.
double vector_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double scale = y.cwiseAbs().maxCoeff();
    return std::min((x - y).cwiseAbs().maxCoeff(), (x + y).cwiseAbs().maxCoeff()) / scale;
}

}  // namespace

CheckResult check_oracle_equivalence(std::uint64_t seed, std::size_t cases) {
    return timed("oracle_equivalence", [&](CheckResult& r) {
        std::mt19937_64 rng(seed);
        double worst_value = 0.0, worst_vector = 0.0;
        std::size_t failures = 0;
        for (std::size_t c = 0; c < cases; ++c) {
            const std::size_t dim = c % 4 == 3 ? 3 : 2;
            Tube tube = dim == 2 ? random_tube(rng, 2, 30, 15) : random_tube(rng, 3, 16, 12);
            const std::size_t n = uniform_int(rng, 1, 6);
            const DiscreteOperator op =
                c % 3 == 1 ? assemble_H(tube.jf, tube.v, tube.omega, tube.epsilon, tube.grid)
                : c % 3 == 2 ? assemble_T0(tube.v, tube.omega, tube.epsilon, tube.grid)
                             : assemble_T(tube.jf, tube.v, tube.omega, tube.epsilon, tube.grid);
            SolverOptions options;
            options.seed = seed + c;
            const EigenResult it = lowest_eigenpairs(op, n, options);
            const EigenResult dense = dense_oracle(op, std::min(op.dimension(), n + 1));
            bool ok = it.all_converged();
            for (std::size_t k = 0; k < n; ++k) {
                const double dv = relative(it.values[k], dense.values[k]);
                worst_value = std::max(worst_value, dv);
                if (dv > 1e-8) ok = false;
                // Eigenvectors are only determined up to sign when the eigenvalue is simple.
                const bool simple_below = k == 0 || relative(dense.values[k], dense.values[k - 1]) > 1e-6;
                const bool simple_above = k + 1 >= dense.size() || relative(dense.values[k + 1], dense.values[k]) > 1e-6;
                if (simple_below && simple_above) {
                    const double dx = vector_distance(it.vector(k + 1), dense.vector(k + 1));
                    worst_vector = std::max(worst_vector, dx);
                    if (dx > 1e-5) ok = false;
                }
            }
            if (!ok) ++failures;
        }
        r.pass = failures == 0;
        r.detail = std::to_string(cases) + " cases, " + std::to_string(failures) + " failed; max value error " +
                   format_double(worst_value) + ", max vector error " + format_double(worst_vector);
    });
}

CheckResult check_kronecker_identity(std::uint64_t seed) {
    return timed("kronecker_identity", [&](CheckResult& r) {
        std::mt19937_64 rng(seed ^ 0x6b726f6eULL);
        double worst = 0.0;
        std::size_t cases = 0;
        auto compare = [&](const DiscreteOperator& t0, const PotentialField& v, const CrossSection& omega, double eps,
                           const TensorGrid& grid, std::size_t n, bool dense) {
            const EigenResult full = dense ? dense_oracle(t0, n) : lowest_eigenpairs(t0, n);
            const DiscreteOperator s = assemble_S(v, grid.s());
            const EigenResult rs = dense_oracle(s, std::min(s.dimension(), n));
            const auto sums = kronecker_sum(rs.values, discrete_transverse_values(omega, grid, n), eps,
                                            transverse_eigenpair(omega, 1).value, n);
            for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, relative(full.values[k], sums[k]));
            ++cases;
        };
        for (std::size_t c = 0; c < 6; ++c) {
            Tube tube = c < 4 ? random_tube(rng, 2, 30, 15) : random_tube(rng, 3, 12, 10);
            compare(assemble_T0(tube.v, tube.omega, tube.epsilon, tube.grid), tube.v, tube.omega, tube.epsilon,
                    tube.grid, 8, true);
        }
        {
            const std::vector<double> sides{2.0};
            const std::vector<std::size_t> counts{60};
            Tube tube = make_tube(CurveSpec(2, kPi, CurvatureProfile::constant(1.0)), CrossSection::interval(1.0),
                                  TensorGrid::box(kPi, 400, sides, counts), 0.1);
            compare(assemble_T0(tube.v, tube.omega, tube.epsilon, tube.grid), tube.v, tube.omega, tube.epsilon,
                    tube.grid, 5, false);
        }
        r.pass = worst <= 1e-9;
        r.detail = std::to_string(cases) + " operators, max relative deviation " + format_double(worst);
    });
}

CheckResult check_sturm_suite(std::size_t nodes, std::size_t modes, double tolerance) {
    return timed("sturm_suite", [&](CheckResult& r) {
        const double length = kPi;
        const Axis axis{0.0, length, nodes};
        std::vector<std::pair<std::string, Eigen::VectorXd>> potentials;
        auto from_curve = [&](const std::string& name, CurvatureProfile kappa) {
            potentials.emplace_back(name, effective_potential(CurveSpec(2, length, std::move(kappa)), axis).v0);
        };
        from_curve("zero", CurvatureProfile::constant(0.0));
        from_curve("constant", CurvatureProfile::constant(1.0));
        from_curve("half_sine", CurvatureProfile::sine(1.0, 0.5, 0.0));
        from_curve("bump", CurvatureProfile::bump(1.5, 1.0, 1.2));
        SurfaceStripSpec strip;
        strip.length = length;
        strip.kappa = CurvatureProfile::sine(0.3, 1.0, 0.0);
        strip.gauss = GaussCurvature::cosine(1.0, 1.0, 0.0);
        potentials.emplace_back("strip", surface_effective_potential(strip, axis).v0);

        r.pass = true;
        std::ostringstream detail;
        for (const auto& [name, v0] : potentials) {
            PotentialField v;
            v.v0 = v0;
            const EigenResult rs = lowest_eigenpairs(assemble_S(v, axis), modes);
            const double bound = v0.cwiseAbs().maxCoeff();
            const PropertyReport report = verify_sturm_properties(rs, bound, axis, tolerance);
            if (!report.pass()) r.pass = false;
            detail << name << (report.pass() ? " ok" : " FAIL " + report.failure) << " (excess "
                   << format_double(report.max_bracket_excess) << ", ratio "
                   << format_double(report.min_boundary_ratio) << "); ";
        }
        r.detail = detail.str();
    });
}

CheckResult check_poincare(std::uint64_t seed, std::size_t samples) {
    return timed("poincare", [&](CheckResult& r) {
        std::mt19937_64 rng(seed ^ 0x706f696eULL);
        double worst = std::numeric_limits<double>::infinity();
        std::size_t failures = 0;
        for (std::size_t k = 0; k < samples; ++k) {
            const bool planar = (k / 3) % 2 == 0;
            const CrossSection omega = planar ? CrossSection::interval(uniform(rng, 0.5, 2.0))
                                              : CrossSection::rectangle({uniform(rng, 1.0, 3.0), uniform(rng, 1.0, 3.0)});
            std::vector<std::size_t> counts;
            for (std::size_t i = 0; i < omega.transverse_dims(); ++i) counts.push_back(uniform_int(rng, 8, planar ? 200 : 30));
            const TensorGrid grid = TensorGrid::box(1.0, 8, omega.sides(), counts);
            // Rough noise, perturbed ground states (ratio close to 1) and smooth bumps.
            std::vector<double> psi(grid.transverse_count());
            const auto j1 = transverse_eigenpair(omega, 1).sample(grid);
            const double delta = uniform(rng, 0.0, 0.1), power = uniform(rng, 0.5, 4.0);
            for (std::size_t tau = 0; tau < psi.size(); ++tau) {
                const double noise = uniform(rng, -1.0, 1.0);
                switch (k % 3) {
                    case 0: psi[tau] = noise; break;
                    case 1: psi[tau] = j1[tau] + delta * noise; break;
                    default: {
                        double bump = 1.0;
                        const auto t = grid.transverse_point(tau);
                        for (std::size_t i = 0; i < t.size(); ++i) {
                            const double x = 2.0 * t[i] / omega.sides()[i];
                            bump *= std::pow(1.0 - x * x, power);
                        }
                        psi[tau] = bump;
                    }
                }
            }
            const double ratio = poincare_ratio(omega, grid, psi) / discrete_poincare_constant(grid);
            worst = std::min(worst, ratio);
            if (ratio < 1.0 - 1e-12) ++failures;
        }
        r.pass = failures == 0;
        r.detail = std::to_string(samples) + " vectors, min ratio / discrete E1 = " + format_double(worst);
    });
}

CheckResult check_unitarity(std::uint64_t seed) {
    return timed("unitarity", [&](CheckResult& r) {
        std::mt19937_64 rng(seed ^ 0x756e6974ULL);
        double worst = 0.0;
        for (std::size_t c = 0; c < 10; ++c) {
            Tube tube = random_tube(rng, c % 2 ? 3 : 2, 40, 12);
            Eigen::VectorXd psi(static_cast<Eigen::Index>(tube.grid.size()));
            for (auto& x : psi) x = uniform(rng, -1.0, 1.0);
            psi /= std::sqrt(psi.squaredNorm() * tube.grid.cell_volume());
            worst = std::max(worst, reconstruct_laplacian_eigenfunction(psi, psi, tube.jf).unitarity_error());
        }
        r.pass = worst <= 1e-10;
        r.detail = "10 tubes, max norm deviation " + format_double(worst);
    });
}

CheckResult check_frame_orthogonality() {
    return timed("frame_orthogonality", [&](CheckResult& r) {
        std::vector<CurveSpec> curves;
        curves.emplace_back(2, kPi, CurvatureProfile::constant(1.0));
        curves.emplace_back(3, kPi, CurvatureProfile::sine(1.0, 1.0, 0.0),
                            std::vector<CurvatureProfile>{CurvatureProfile::constant(0.5)});
        curves.emplace_back(4, 5.0, CurvatureProfile::sine(1.0, 2.0, 0.3),
                            std::vector<CurvatureProfile>{CurvatureProfile::constant(0.7),
                                                          CurvatureProfile::sine(0.4, 1.0, 0.0)});
        double worst = 0.0, drift = 0.0;
        for (const auto& curve : curves) {
            const RotationPath path = solve_tang_frame(curve, 2000);
            drift = std::max(drift, path.max_drift);
            for (const auto& m : path.matrices) {
                const auto d = static_cast<Eigen::Index>(m.rows());
                worst = std::max(worst, (m * m.transpose() - Eigen::MatrixXd::Identity(d, d)).norm());
                if (m.determinant() <= 0.0) worst = std::numeric_limits<double>::infinity();
            }
        }
        r.pass = worst <= 1e-12;
        r.detail = "max ||R R^T - 1|| " + format_double(worst) + ", max drift before projection " + format_double(drift);
    });
}

CheckResult check_jacobian_bounds() {
    return timed("jacobian_bounds", [&](CheckResult& r) {
        std::mt19937_64 rng(0x6a6163ULL);
        r.pass = true;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < 8; ++c) {
            Tube tube = random_tube(rng, c % 2 ? 3 : 2, 60, 16);
            const ValidityReport bounds = check_immersion(tube.curve, tube.omega.radius(), tube.epsilon);
            const double slack = 1e-12;
            const double excess = std::max(bounds.lower - tube.jf.min_h(), tube.jf.max_h() - bounds.upper);
            worst = std::max(worst, excess);
            if (excess > slack || tube.jf.min_h() <= 0.0) r.pass = false;
        }
        r.detail = "8 tubes, max excess over the band " + format_double(worst);
    });
}

CheckResult check_bracketing(std::uint64_t seed) {
    return timed("bracketing", [&](CheckResult& r) {
        std::mt19937_64 rng(seed ^ 0x62726163ULL);
        double worst = -std::numeric_limits<double>::infinity();
        r.pass = true;
        for (std::size_t c = 0; c < 6; ++c) {
            Tube tube = c < 4 ? random_tube(rng, 2, 24, 12) : random_tube(rng, 3, 10, 8);
            const AssumptionConstants constants = measure_assumption_constants(tube.jf, tube.v);
            const double cb = constants.bracket_constant;
            const DiscreteOperator t = assemble_T(tube.jf, tube.v, tube.omega, tube.epsilon, tube.grid);
            const DiscreteOperator lo = assemble_T_bound(tube.v, tube.omega, tube.epsilon, tube.grid, cb, -1);
            const DiscreteOperator hi = assemble_T_bound(tube.v, tube.omega, tube.epsilon, tube.grid, cb, +1);
            const std::size_t n = std::min<std::size_t>(t.dimension(), 30);
            const EigenResult et = dense_oracle(t, n), el = dense_oracle(lo, n), eh = dense_oracle(hi, n);
            const double allowance = 64.0 * kUnitRoundoff * std::max({t.norm_inf(), lo.norm_inf(), hi.norm_inf()});
            for (std::size_t k = 0; k < n; ++k) {
                const double excess = std::max(el.values[k] - et.values[k], et.values[k] - eh.values[k]);
                worst = std::max(worst, excess);
                if (excess > allowance) r.pass = false;
            }
        }
        r.detail = "6 tubes, max bracket excess " + format_double(worst);
    });
}

CheckResult check_order_invariance(std::uint64_t seed) {
    return timed("order_invariance", [&](CheckResult& r) {
        std::mt19937_64 rng(seed ^ 0x6f726465ULL);
        r.pass = true;
        double worst = 0.0;
        for (std::size_t c = 0; c < 4; ++c) {
            Tube tube = random_tube(rng, 2, 24, 10);
            const DiscreteOperator t = assemble_T(tube.jf, tube.v, tube.omega, tube.epsilon, tube.grid);
            const double scale = uniform(rng, 0.1, 10.0);
            const DiscreteOperator scaled(t.kind(), t.epsilon(), t.grid(), scale * t.lower());
            const std::size_t n = 6;
            const EigenResult a = dense_oracle(t, n + 1), b = dense_oracle(scaled, n + 1);
            for (std::size_t k = 1; k <= n; ++k) {
                if (relative(a.values[k], a.values[k - 1]) < 1e-6 ||
                    (k > 1 && relative(a.values[k - 1], a.values[k - 2]) < 1e-6))
                    continue;
                const double d = vector_distance(a.vector(k), b.vector(k));
                worst = std::max(worst, d);
                if (d > 1e-8 || relative(b.values[k - 1], scale * a.values[k - 1]) > 1e-10) r.pass = false;
            }
        }
        r.detail = "4 operators, max eigenvector deviation after scaling " + format_double(worst);
    });
}

ValidationReport run_validation(const ValidationOptions& options) {
    ValidationReport report;
    report.checks.push_back(check_oracle_equivalence(options.seed, options.oracle_cases));
    report.checks.push_back(check_kronecker_identity(options.seed));
    report.checks.push_back(check_sturm_suite(options.sturm_nodes, options.sturm_modes, options.sturm_tolerance));
    report.checks.push_back(check_poincare(options.seed, options.poincare_samples));
    report.checks.push_back(check_unitarity(options.seed));
    report.checks.push_back(check_frame_orthogonality());
    report.checks.push_back(check_jacobian_bounds());
    report.checks.push_back(check_bracketing(options.seed));
    report.checks.push_back(check_order_invariance(options.seed));
    return report;
}

}  // namespace tube
