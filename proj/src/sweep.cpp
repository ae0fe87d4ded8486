#include "tube/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "tube/errors.hpp"

namespace tube {

std::string to_string(GeometryKind kind) { return kind == GeometryKind::Tube ? "tube" : "surface"; }

double SweepConfig::length() const {
    if (kind == GeometryKind::Surface) return surface->length;
    return curve->length();
}

TensorGrid SweepConfig::grid() const {
    const std::vector<double>& sides = omega.sides();
    std::vector<std::size_t> counts = t_nodes;
    if (counts.size() == 1 && sides.size() > 1) counts.assign(sides.size(), t_nodes.front());
    return TensorGrid::box(length(), s_nodes, sides, counts);
}

std::optional<TensorGrid> SweepConfig::coarse_grid() const {
    const TensorGrid fine = grid();
    auto coarsen = [](std::size_t m) { return (m + 1) / 2 - 1; };
    const std::size_t ms = coarsen(fine.s().count);
    if (ms < 8) return std::nullopt;
    std::vector<double> sides;
    std::vector<std::size_t> counts;
    for (const auto& a : fine.t()) {
        const std::size_t m = coarsen(a.count);
        if (m < 8) return std::nullopt;
        sides.push_back(a.hi - a.lo);
        counts.push_back(m);
    }
    return TensorGrid::box(length(), ms, sides, counts);
}

void SweepConfig::validate() const {
    if (kind == GeometryKind::Tube) {
        if (!curve) throw PreconditionError("sweep: tube geometry needs a curve");
        if (curve->dim() != omega.transverse_dims() + 1)
            throw PreconditionError("sweep: cross-section dimension does not match the curve");
    } else {
        if (!surface) throw PreconditionError("sweep: surface geometry needs a strip spec");
        if (omega.kind() != CrossSection::Kind::Interval || omega.sides().front() != 2.0)
            throw PreconditionError("sweep: strips use omega = (-1, 1)");
    }
    if (eps.empty()) throw PreconditionError("sweep: no eps values");
    for (double e : eps)
        if (!(e > 0.0)) throw PreconditionError("sweep: eps values must be positive");
    if (n < 1) throw PreconditionError("sweep: N must be at least 1");
    if (t_nodes.size() != 1 && t_nodes.size() != omega.transverse_dims())
        throw PreconditionError("sweep: t_nodes needs one count or one per transverse axis");
}

std::vector<double> discrete_transverse_values(const CrossSection& omega, const TensorGrid& grid, std::size_t n) {
    std::vector<double> values;
    // Enumerate a few extra analytic modes: the stencil can reorder nearly degenerate ones.
    for (std::size_t k = 1; k <= n + 2 * omega.transverse_dims(); ++k)
        values.push_back(transverse_eigenpair(omega, k).discrete_value(grid));
    std::sort(values.begin(), values.end());
    values.resize(std::min(values.size(), n));
    return values;
}

std::vector<double> kronecker_sum(const std::vector<double>& mu, const std::vector<double>& transverse,
                                  double epsilon, double e1, std::size_t n) {
    std::vector<double> sums;
    sums.reserve(mu.size() * transverse.size());
    const double scale = 1.0 / (epsilon * epsilon);
    for (double m : mu)
        for (double e : transverse) sums.push_back(m + scale * (e - e1));
    std::sort(sums.begin(), sums.end());
    sums.resize(std::min(sums.size(), n));
    return sums;
}

double transverse_poincare_ratio(const CrossSection& omega, const TensorGrid& grid, const Eigen::VectorXd& psi) {
    const std::size_t nt = grid.transverse_count();
    double energy = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < grid.s().count; ++i) {
        std::span<const double> slice(psi.data() + i * nt, nt);
        double slice_norm = 0.0;
        for (double v : slice) slice_norm += v * v;
        if (slice_norm == 0.0) continue;
        energy += poincare_ratio(omega, grid, slice) * slice_norm;
        norm += slice_norm;
    }
    if (norm == 0.0) throw DegenerateInputError("transverse_poincare_ratio: psi is identically zero");
    return energy / norm;
}

namespace {

struct Problem {
    JacobianField jf;
    PotentialField v;
    std::optional<DiscreteOperator> T;
    ValidityReport validity;
};

Problem build_problem(const SweepConfig& config, double epsilon, const TensorGrid& grid) {
    Problem p;
    if (config.kind == GeometryKind::Tube) {
        p.validity = check_immersion(*config.curve, config.omega.radius(), epsilon);
        if (!p.validity.pass)
            throw PreconditionError("eps = " + std::to_string(epsilon) + " is not below the immersion threshold " +
                                    std::to_string(p.validity.threshold));
        const RotationPath rot = solve_tang_frame(*config.curve, tang_frame_steps(grid));
        p.jf = jacobian_field(*config.curve, rot, epsilon, grid);
        p.v = full_potential(p.jf, *config.curve);
        p.T.emplace(assemble_T(p.jf, p.v, config.omega, epsilon, grid));
    } else {
        SurfaceStripSpec spec = *config.surface;
        spec.epsilon = epsilon;
        p.jf = solve_jacobi_h(spec, grid);
        p.v = surface_potential(spec, p.jf);
        p.T.emplace(assemble_surface_T(spec, p.jf, grid));
        p.validity.lower = p.jf.min_h();
        p.validity.upper = p.jf.max_h();
        p.validity.threshold = std::numeric_limits<double>::infinity();
        p.validity.pass = true;
    }
    return p;
}

constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2.0;

/// Same-grid gaps |sigma_n - sigma0_n| on a given grid.
std::vector<double> grid_gaps(const SweepConfig& config, double epsilon, const TensorGrid& grid) {
    const Problem p = build_problem(config, epsilon, grid);
    const EigenResult r = lowest_eigenpairs(*p.T, config.n, config.solver);
    const EigenResult rs = lowest_eigenpairs(assemble_S(p.v, grid.s()), config.n, config.solver);
    const double e1 = transverse_eigenpair(config.omega, 1).value;
    const auto sigma0 =
        kronecker_sum(rs.values, discrete_transverse_values(config.omega, grid, config.n), epsilon, e1, config.n);
    std::vector<double> gaps;
    for (std::size_t k = 0; k < config.n; ++k) gaps.push_back(std::abs(r.values[k] - sigma0[k]));
    return gaps;
}

double refinement_ratio(const TensorGrid& fine, const TensorGrid& coarse) {
    double r = coarse.s().spacing() / fine.s().spacing();
    for (std::size_t k = 0; k < fine.t().size(); ++k)
        r = std::min(r, coarse.t()[k].spacing() / fine.t()[k].spacing());
    return r;
}

}  // namespace

AssembledOperators assemble_operators(const SweepConfig& config, double epsilon) {
    config.validate();
    const TensorGrid grid = config.grid();
    Problem p = build_problem(config, epsilon, grid);
    return {std::move(*p.T), assemble_S(p.v, grid.s())};
}

EpsilonAnalysis analyze_epsilon(const SweepConfig& config, double epsilon) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    EpsilonAnalysis out;
    EpsilonSummary& summary = out.summary;
    summary.epsilon = epsilon;
    summary.solver_seed = config.solver.seed;
    const TensorGrid grid = config.grid();
    out.grid = grid;
    const std::size_t N = config.n;
    out.rows.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        out.rows[k].epsilon = epsilon;
        out.rows[k].n = k + 1;
    }
    auto finish = [&] {
        summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    std::optional<Problem> problem;
    EigenResult r, rs;
    try {
        problem = build_problem(config, epsilon, grid);
        r = lowest_eigenpairs(*problem->T, N, config.solver);
        rs = lowest_eigenpairs(assemble_S(problem->v, grid.s()), N, config.solver);
    } catch (const Error& e) {
        summary.error = e.what();
        for (auto& row : out.rows) row.error = e.what();
        finish();
        return out;
    }
    const Problem& p = *problem;
    summary.validity = p.validity;
    summary.min_h = p.jf.min_h();
    summary.max_h = p.jf.max_h();
    summary.constants = measure_assumption_constants(p.jf, p.v);

    const auto j1 = transverse_eigenpair(config.omega, 1);
    const double e1 = j1.value;
    const double e1_h = discrete_poincare_constant(grid);
    const auto j1_samples = j1.sample(grid);
    const auto sigma0 = kronecker_sum(rs.values, discrete_transverse_values(config.omega, grid, N), epsilon, e1, N);
    const double roundoff = 64.0 * unit_roundoff * p.T->norm_inf();

    std::vector<double> coarse_gaps;
    double ratio = 0.0;
    if (config.compute_floor) {
        if (const auto coarse = config.coarse_grid()) {
            try {
                coarse_gaps = grid_gaps(config, epsilon, *coarse);
                ratio = refinement_ratio(grid, *coarse);
            } catch (const Error& e) {
                summary.error = std::string("coarse grid: ") + e.what();
            }
        }
    }

    std::vector<bool> clustered(N, false);
    for (std::size_t i : clustered_pairs(r.values)) {
        if (i < N) clustered[i] = true;
        if (i + 1 < N) clustered[i + 1] = true;
    }
    summary.simple = std::none_of(clustered.begin(), clustered.end(), [](bool c) { return c; });

    if (config.check_bracket) {
        try {
            const double c = summary.constants.bracket_constant;
            const EigenResult rm =
                lowest_eigenpairs(assemble_T_bound(p.v, config.omega, epsilon, grid, c, -1), N, config.solver);
            const DiscreteOperator tp = assemble_T_bound(p.v, config.omega, epsilon, grid, c, +1);
            const EigenResult rp = lowest_eigenpairs(tp, N, config.solver);
            summary.bracket_checked = true;
            summary.bracket_ok = true;
            summary.bracket_excess = -std::numeric_limits<double>::infinity();
            const double allowance = 64.0 * unit_roundoff * tp.norm_inf();
            for (std::size_t k = 0; k < N; ++k) {
                const double excess = std::max(rm.values[k] - r.values[k], r.values[k] - rp.values[k]);
                summary.bracket_excess = std::max(summary.bracket_excess, excess);
                if (excess > allowance + config.solver.tol * std::max(1.0, std::abs(r.values[k])))
                    summary.bracket_ok = false;
            }
        } catch (const Error& e) {
            summary.error = std::string("bracket: ") + e.what();
        }
    }

    const double weight = p.T->weight();
    summary.courant_ok = true;
    for (std::size_t k = 0; k < N; ++k) {
        ConvergenceRow& row = out.rows[k];
        const std::size_t n = k + 1;
        row.sigma = r.values[k];
        row.sigma0 = sigma0[k];
        row.mu = rs.values[k];
        row.lambda = row.sigma + e1 / (epsilon * epsilon);
        row.gap = std::abs(row.sigma - row.sigma0);
        row.raw_gap = std::abs(row.sigma - row.mu);
        row.lambda_gap = std::abs(row.lambda - (row.mu + e1 / (epsilon * epsilon)));
        row.floor = roundoff;
        if (!coarse_gaps.empty()) row.floor += std::abs(row.gap - coarse_gaps[k]) / (ratio * ratio - 1.0);
        row.above_floor = row.gap > row.floor;
        row.residual = r.residuals[k];
        row.converged = r.converged[k];
        row.iterations = r.iterations;
        row.clustered = clustered[k];
        row.poincare_constant = e1_h;

        const Eigen::VectorXd phi = rs.vector(n);
        out.phi.push_back(phi);
        std::span<const double> phi_span(phi.data(), static_cast<std::size_t>(phi.size()));
        try {
            const Eigen::VectorXd psi0 = product_state(phi_span, j1_samples, grid);
            const PairedEigenfunction pair = pair_and_sign(r.vector(n), psi0, weight);
            out.psi.push_back(pair.psi);
            out.psi0.push_back(pair.psi0);
            row.overlap = pair.overlap;
            const EigenfunctionErrors errors = eigenfunction_errors(pair.psi, pair.psi0, config.omega, grid);
            row.sup_error = errors.sup;
            row.weighted_error = errors.weighted;
            row.poincare_ratio = transverse_poincare_ratio(config.omega, grid, pair.psi);
            row.poincare_ok = row.poincare_ratio >= e1_h * (1.0 - 1e-12);
            row.unitarity_error = reconstruct_laplacian_eigenfunction(pair.psi, pair.psi0, p.jf).unitarity_error();
            row.sign_domains = sign_domains(pair.psi, grid);
            if (grid.dim() == 2) row.boundary_terminations = static_cast<int>(boundary_terminations(pair.psi, grid));
            if (row.sign_domains != n) summary.courant_ok = false;

            const NodalData1D nodal = nodal_points_1d(phi_span, grid.s(), n);
            out.nodal.push_back(nodal);
            const ViolationReport violations = sign_agreement(pair.psi, phi_span, nodal, grid, epsilon);
            row.violations = violations.violations;
            row.empirical_margin = violations.empirical_margin;
            NodalDisplacement crossings = nodal_displacement(pair.psi, nodal, grid);
            row.nodal_displacement = n == 1 ? 0.0 : crossings.max_displacement;
            row.flagged_lines = crossings.flagged_lines;
            out.crossings.push_back(std::move(crossings));
        } catch (const Error& e) {
            row.error = e.what();
            summary.courant_ok = false;
            out.psi.resize(n, Eigen::VectorXd());
            out.psi0.resize(n, Eigen::VectorXd());
            out.nodal.resize(n);
            out.crossings.resize(n);
        }
    }
    finish();
    return out;
}

const ConvergenceRow* ConvergenceReport::find(double epsilon, std::size_t n) const {
    for (const auto& row : rows)
        if (row.epsilon == epsilon && row.n == n) return &row;
    return nullptr;
}

const SlopeSummary* ConvergenceReport::slope(const std::string& metric, std::size_t n) const {
    for (const auto& s : slopes)
        if (s.metric == metric && s.n == n) return &s;
    return nullptr;
}

std::size_t ConvergenceReport::failed_rows() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok(); }));
}

namespace {

SlopeSummary fit_metric(const std::string& metric, std::size_t n, const std::vector<std::pair<double, double>>& points,
                        bool floor_limited) {
    SlopeSummary s;
    s.metric = metric;
    s.n = n;
    s.floor_limited = floor_limited;
    if (points.size() < 3) {
        s.note = "fewer than three completed rows";
        return s;
    }
    try {
        s.fit = fit_rate(points);
        for (const auto& note : s.fit->notes) s.note += (s.note.empty() ? "" : "; ") + note;
    } catch (const Error& e) {
        s.note = e.what();
    }
    if (floor_limited) s.note += std::string(s.note.empty() ? "" : "; ") + "floor-limited";
    return s;
}

}  // namespace

ConvergenceReport sweep_epsilon(const SweepConfig& config) {
    config.validate();
    if (config.eps.size() < 3) throw PreconditionError("sweep_epsilon: at least three eps values are needed");
    ConvergenceReport report;
    for (double eps : config.eps) {
        EpsilonAnalysis a = analyze_epsilon(config, eps);
        report.epsilons.push_back(a.summary);
        for (auto& row : a.rows) report.rows.push_back(std::move(row));
    }
    const double smallest = *std::min_element(config.eps.begin(), config.eps.end());
    for (const auto& e : report.epsilons)
        if (e.epsilon == smallest) {
            report.simple_at_smallest = e.error.empty() && e.simple;
            report.courant_at_smallest = e.error.empty() && e.courant_ok;
        }

    // Nodal crossings sit exactly on the limit set when the geometry is symmetric; treat a
    // displacement at roundoff level as the floor.
    const double nodal_floor = 1e-10 * config.length();
    for (std::size_t n = 1; n <= config.n; ++n) {
        std::vector<std::pair<double, double>> gap, sup, weighted, nodal;
        bool gap_floor = false, nodal_at_floor = true;
        for (const auto& row : report.rows) {
            if (row.n != n || !row.ok()) continue;
            gap.emplace_back(row.epsilon, row.gap);
            if (!row.above_floor) gap_floor = true;
            sup.emplace_back(row.epsilon, row.sup_error);
            weighted.emplace_back(row.epsilon, row.weighted_error);
            nodal.emplace_back(row.epsilon, row.nodal_displacement);
            if (row.nodal_displacement > nodal_floor) nodal_at_floor = false;
        }
        report.slopes.push_back(fit_metric("gap", n, gap, gap_floor));
        report.slopes.push_back(fit_metric("sup_error", n, sup, false));
        report.slopes.push_back(fit_metric("weighted_error", n, weighted, false));
        if (n >= 2) report.slopes.push_back(fit_metric("nodal_displacement", n, nodal, nodal_at_floor));
    }
    std::vector<std::pair<double, double>> deviation;
    for (const auto& e : report.epsilons)
        if (e.error.empty() || e.error.rfind("coarse", 0) == 0 || e.error.rfind("bracket", 0) == 0)
            deviation.emplace_back(e.epsilon, e.constants.v_deviation);
    report.slopes.push_back(fit_metric("v_deviation", 0, deviation, false));
    return report;
}

}  // namespace tube
