#include "tube/report.hpp"

#include <cmath>
#include <ostream>

#include "tube/format.hpp"

namespace tube {

namespace {

using json = nlohmann::json;

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* row_columns =
    "epsilon,n,grid,tol,seed,sigma,sigma0,mu,lambda,gap,raw_gap,lambda_gap,floor,above_floor,residual,converged,"
    "iterations,overlap,sup_error,weighted_error,nodal_displacement,flagged_lines,empirical_margin,violations,"
    "sign_domains,boundary_terminations,unitarity_error,poincare_ratio,poincare_constant,poincare_ok,clustered,error";

void write_row(std::ostream& out, const ConvergenceRow& r, const std::string& grid, const SweepConfig& config) {
    auto f = [](double v) { return format_double(v); };
    out << f(r.epsilon) << ',' << r.n << ',' << grid << ',' << f(config.solver.tol) << ',' << config.solver.seed << ','
        << f(r.sigma) << ',' << f(r.sigma0) << ',' << f(r.mu) << ',' << f(r.lambda) << ',' << f(r.gap) << ','
        << f(r.raw_gap) << ',' << f(r.lambda_gap) << ',' << f(r.floor) << ',' << r.above_floor << ','
        << f(r.residual) << ',' << r.converged << ',' << r.iterations << ',' << f(r.overlap) << ','
        << f(r.sup_error) << ',' << f(r.weighted_error) << ',' << f(r.nodal_displacement) << ','
        << r.flagged_lines << ',' << f(r.empirical_margin) << ',' << r.violations << ',' << r.sign_domains << ','
        << r.boundary_terminations << ',' << f(r.unitarity_error) << ',' << f(r.poincare_ratio) << ','
        << f(r.poincare_constant) << ',' << r.poincare_ok << ',' << r.clustered << ',' << csv_field(r.error) << '\n';
}

}  // namespace

std::string grid_label(const TensorGrid& grid) {
    std::string label = std::to_string(grid.s().count);
    for (const auto& a : grid.t()) label += "x" + std::to_string(a.count);
    return label;
}

void write_metadata(std::ostream& out, const SweepConfig& config, const std::string& title) {
    out << "# " << title << '\n';
    out << "# geometry=" << to_string(config.kind) << " dim=" << config.dim()
        << " length=" << format_double(config.length());
    if (config.kind == GeometryKind::Tube) {
        out << " kappa1=" << config.curve->kappa1().name() << " c_gamma=" << format_double(config.curve->c_gamma());
    } else {
        out << " kappa=" << config.surface->kappa.name() << " gauss=" << config.surface->gauss.name();
    }
    out << " omega=";
    for (std::size_t i = 0; i < config.omega.sides().size(); ++i)
        out << (i ? "x" : "") << format_double(config.omega.sides()[i]);
    out << '\n';
    out << "# grid=" << grid_label(config.grid()) << " tol=" << format_double(config.solver.tol)
        << " seed=" << config.solver.seed << " n=" << config.n << '\n';
}

void write_report_csv(std::ostream& out, const ConvergenceReport& report, const SweepConfig& config) {
    write_metadata(out, config, "tube-spectra sweep report");
    out << row_columns << '\n';
    const std::string grid = grid_label(config.grid());
    for (const auto& row : report.rows) write_row(out, row, grid, config);
}

void write_spectrum_csv(std::ostream& out, const EpsilonAnalysis& analysis, const SweepConfig& config) {
    write_metadata(out, config, "tube-spectra spectrum");
    out << row_columns << '\n';
    const std::string grid = grid_label(config.grid());
    for (const auto& row : analysis.rows) write_row(out, row, grid, config);
}

void write_nodal_csv(std::ostream& out, const std::vector<EpsilonAnalysis>& analyses, std::size_t n,
                     const SweepConfig& config) {
    write_metadata(out, config, "tube-spectra nodal crossings, n = " + std::to_string(n));
    for (const auto& a : analyses) {
        const ConvergenceRow& row = a.rows.at(n - 1);
        out << "# epsilon=" << format_double(row.epsilon) << " empirical_margin=" << format_double(row.empirical_margin)
            << " violations=" << row.violations << " max_displacement=" << format_double(row.nodal_displacement)
            << " flagged_lines=" << row.flagged_lines;
        if (n <= a.nodal.size() && a.nodal[n - 1]) {
            out << " limit_zeros=";
            const auto& zeros = a.nodal[n - 1]->zeros;
            for (std::size_t i = 0; i < zeros.size(); ++i) out << (i ? ";" : "") << format_double(zeros[i]);
        }
        if (!row.error.empty()) out << " error=" << csv_field(row.error);
        out << '\n';
    }
    out << "epsilon,tau";
    for (std::size_t k = 0; k < config.omega.transverse_dims(); ++k) out << ",t" << k + 1;
    out << ",s,displacement\n";
    for (const auto& a : analyses) {
        if (n > a.crossings.size()) continue;
        const TensorGrid& grid = *a.grid;
        for (const auto& c : a.crossings[n - 1].crossings) {
            out << format_double(a.summary.epsilon) << ',' << c.tau;
            for (double t : grid.transverse_point(c.tau)) out << ',' << format_double(t);
            out << ',' << format_double(c.s) << ',' << format_double(c.displacement) << '\n';
        }
    }
}

void write_eigenfunction_dat(std::ostream& out, const EpsilonAnalysis& analysis, std::size_t n) {
    const TensorGrid& grid = *analysis.grid;
    out << "# s";
    for (std::size_t k = 0; k < grid.transverse_dims(); ++k) out << " t" << k + 1;
    out << " psi_" << n << " psi0_" << n << '\n';
    if (n > analysis.psi.size() || analysis.psi[n - 1].size() == 0) return;
    const Eigen::VectorXd& psi = analysis.psi[n - 1];
    const Eigen::VectorXd& psi0 = analysis.psi0[n - 1];
    for (std::size_t i = 0; i < grid.s().count; ++i) {
        const double s = grid.s().node(i);
        for (std::size_t tau = 0; tau < grid.transverse_count(); ++tau) {
            const auto idx = static_cast<Eigen::Index>(grid.index(i, tau));
            out << format_double(s);
            for (double t : grid.transverse_point(tau)) out << ' ' << format_double(t);
            out << ' ' << format_double(psi(idx)) << ' ' << format_double(psi0(idx)) << '\n';
        }
        out << '\n';
    }
}

json to_json(const ConvergenceRow& r) {
    json j;
    j["epsilon"] = r.epsilon;
    j["n"] = r.n;
    j["sigma"] = number(r.sigma);
    j["sigma0"] = number(r.sigma0);
    j["mu"] = number(r.mu);
    j["lambda"] = number(r.lambda);
    j["gap"] = number(r.gap);
    j["raw_gap"] = number(r.raw_gap);
    j["lambda_gap"] = number(r.lambda_gap);
    j["floor"] = number(r.floor);
    j["above_floor"] = r.above_floor;
    j["residual"] = number(r.residual);
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["overlap"] = number(r.overlap);
    j["sup_error"] = number(r.sup_error);
    j["weighted_error"] = number(r.weighted_error);
    j["nodal_displacement"] = number(r.nodal_displacement);
    j["empirical_margin"] = number(r.empirical_margin);
    j["violations"] = r.violations;
    j["sign_domains"] = r.sign_domains;
    j["boundary_terminations"] = r.boundary_terminations;
    j["unitarity_error"] = number(r.unitarity_error);
    j["poincare_ok"] = r.poincare_ok;
    j["clustered"] = r.clustered;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

json to_json(const EpsilonSummary& e) {
    json j;
    j["epsilon"] = e.epsilon;
    j["min_h"] = number(e.min_h);
    j["max_h"] = number(e.max_h);
    j["immersion_threshold"] = number(e.validity.threshold);
    j["constants"] = {{"inf_a", number(e.constants.inf_a)},
                      {"a_minus_1_c1", number(e.constants.a_minus_1_c1)},
                      {"v_deviation", number(e.constants.v_deviation)},
                      {"v0_sup", number(e.constants.v0_sup)},
                      {"constant", number(e.constants.constant)},
                      {"bracket_constant", number(e.constants.bracket_constant)}};
    j["bracket_checked"] = e.bracket_checked;
    j["bracket_ok"] = e.bracket_ok;
    j["bracket_excess"] = number(e.bracket_excess);
    j["simple"] = e.simple;
    j["courant_ok"] = e.courant_ok;
    j["seconds"] = e.seconds;
    if (!e.error.empty()) j["error"] = e.error;
    return j;
}

json to_json(const ValidationReport& report) {
    json j;
    j["pass"] = report.pass();
    j["checks"] = json::array();
    for (const auto& c : report.checks)
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"seconds", c.seconds}});
    return j;
}

json config_json(const SweepConfig& config) {
    json j;
    j["geometry"] = to_string(config.kind);
    j["dim"] = config.dim();
    j["length"] = config.length();
    j["omega_sides"] = config.omega.sides();
    j["eps"] = config.eps;
    j["n"] = config.n;
    j["grid"] = grid_label(config.grid());
    j["tol"] = config.solver.tol;
    j["seed"] = config.solver.seed;
    if (config.kind == GeometryKind::Tube) {
        j["kappa1"] = config.curve->kappa1().name();
        j["c_gamma"] = config.curve->c_gamma();
    } else {
        j["kappa"] = config.surface->kappa.name();
        j["gauss"] = config.surface->gauss.name();
    }
    return j;
}

json summary_json(const ConvergenceReport& report, const SweepConfig& config) {
    json j;
    j["config"] = config_json(config);
    j["epsilons"] = json::array();
    for (const auto& e : report.epsilons) j["epsilons"].push_back(to_json(e));
    j["slopes"] = json::array();
    for (const auto& s : report.slopes) {
        json entry{{"metric", s.metric}, {"n", s.n}, {"floor_limited", s.floor_limited}};
        if (s.fit) {
            entry["slope"] = number(s.fit->slope);
            entry["stderr"] = number(s.fit->stderr_slope);
            entry["intercept"] = number(s.fit->intercept);
            entry["points"] = s.fit->used;
        } else {
            entry["slope"] = nullptr;
        }
        if (!s.note.empty()) entry["note"] = s.note;
        j["slopes"].push_back(entry);
    }
    j["simple_at_smallest"] = report.simple_at_smallest;
    j["courant_at_smallest"] = report.courant_at_smallest;
    j["failed_rows"] = report.failed_rows();
    j["rows"] = report.rows.size();
    return j;
}

json spectrum_json(const EpsilonAnalysis& analysis, const SweepConfig& config) {
    json j;
    j["config"] = config_json(config);
    j["summary"] = to_json(analysis.summary);
    j["rows"] = json::array();
    for (const auto& row : analysis.rows) j["rows"].push_back(to_json(row));
    return j;
}

}  // namespace tube
