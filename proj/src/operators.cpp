#include "tube/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "tube/errors.hpp"
#include "tube/format.hpp"

namespace tube {

double PotentialField::deviation(const TensorGrid& grid) const {
    if (!has_full()) throw PreconditionError("PotentialField::deviation: full potential not available");
    double dev = 0.0;
    const std::size_t nt = grid.transverse_count();
    for (std::size_t i = 0; i < grid.s().count; ++i)
        for (std::size_t tau = 0; tau < nt; ++tau)
            dev = std::max(dev, std::abs(full(static_cast<Eigen::Index>(grid.index(i, tau))) -
                                         v0(static_cast<Eigen::Index>(i))));
    return dev;
}

PotentialField effective_potential(const CurveSpec& curve, const Axis& s_axis) {
    PotentialField v;
    v.v0.resize(static_cast<Eigen::Index>(s_axis.count));
    for (std::size_t i = 0; i < s_axis.count; ++i) {
        const double k = curve.kappa1().value(s_axis.node(i));
        v.v0(static_cast<Eigen::Index>(i)) = -0.25 * k * k;
    }
    return v;
}

PotentialField full_potential(const JacobianField& jf, const CurveSpec& curve) {
    const TensorGrid& grid = jf.grid;
    if (jf.h.minCoeff() <= 0.0)
        throw GeometryError("full_potential: h must be positive (requires eps < (C_Gamma a)^-1)");
    PotentialField v = effective_potential(curve, grid.s());
    v.full.resize(jf.h.size());
    const std::size_t nt = grid.transverse_count();
    for (std::size_t i = 0; i < grid.s().count; ++i) {
        const double k = curve.kappa1().value(grid.s().node(i));
        for (std::size_t tau = 0; tau < nt; ++tau) {
            const auto idx = static_cast<Eigen::Index>(grid.index(i, tau));
            const double h = jf.h(idx), h2 = h * h;
            v.full(idx) = -0.25 * k * k / h2 + 0.5 * jf.d11h(idx) / (h2 * h) -
                          1.25 * jf.d1h(idx) * jf.d1h(idx) / (h2 * h2);
        }
    }
    return v;
}

Eigen::VectorXd general_potential(const JacobianField& jf) {
    if (jf.h.minCoeff() <= 0.0) throw GeometryError("general_potential: h must be positive");
    const double e2 = jf.epsilon * jf.epsilon;
    Eigen::VectorXd v(jf.h.size());
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
        const double h = jf.h(idx), h2 = h * h;
        v(idx) = -1.25 * jf.d1h(idx) * jf.d1h(idx) / (h2 * h2) + 0.5 * jf.d11h(idx) / (h2 * h) -
                 0.25 * jf.grad_t_sq(idx) / (e2 * h2) + 0.5 * jf.lap_t(idx) / (e2 * h);
    }
    return v;
}

std::string to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::T: return "T";
        case OperatorKind::T0: return "T0";
        case OperatorKind::S: return "S";
        case OperatorKind::H: return "H";
        case OperatorKind::Bound: return "Tbound";
    }
    return "?";
}

DiscreteOperator::DiscreteOperator(OperatorKind kind, double epsilon, TensorGrid grid,
                                   Eigen::SparseMatrix<double> lower)
    : kind_(kind), epsilon_(epsilon), grid_(std::move(grid)), lower_(std::move(lower)) {
    lower_.makeCompressed();
}

Eigen::SparseMatrix<double> DiscreteOperator::full() const {
    Eigen::SparseMatrix<double> strict = lower_.triangularView<Eigen::StrictlyLower>();
    Eigen::SparseMatrix<double> out = lower_ + Eigen::SparseMatrix<double>(strict.transpose());
    out.makeCompressed();
    return out;
}

Eigen::MatrixXd DiscreteOperator::dense() const { return Eigen::MatrixXd(full()); }

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& x) const {
    return lower_.selfadjointView<Eigen::Lower>() * x;
}

double DiscreteOperator::norm_inf() const {
    const Eigen::SparseMatrix<double> a = full();
    double best = 0.0;
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
    for (Eigen::Index c = 0; c < a.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it) rows(it.row()) += std::abs(it.value());
    if (rows.size() > 0) best = rows.maxCoeff();
    return best;
}

double DiscreteOperator::gershgorin_lower() const {
    const Eigen::SparseMatrix<double> a = full();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(a.rows());
    Eigen::VectorXd off = Eigen::VectorXd::Zero(a.rows());
    for (Eigen::Index c = 0; c < a.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it) {
            if (it.row() == it.col())
                diag(it.row()) += it.value();
            else
                off(it.row()) += std::abs(it.value());
        }
    return (diag - off).minCoeff();
}

DiscreteOperator assemble_flux_operator(OperatorKind kind, const TensorGrid& grid, double epsilon,
                                        const Eigen::MatrixXd& a_mid, const Eigen::VectorXd& diagonal,
                                        double longitudinal_scale) {
    const std::size_t ms = grid.s().count;
    const std::size_t nt = grid.transverse_count();
    if (a_mid.rows() != static_cast<Eigen::Index>(ms + 1) || a_mid.cols() != static_cast<Eigen::Index>(nt))
        throw AssemblyError("assemble: coefficient field does not match the grid");
    if (diagonal.size() != static_cast<Eigen::Index>(grid.size()))
        throw AssemblyError("assemble: potential does not match the grid");

    const double ds = grid.s().spacing();
    const double inv_ds2 = longitudinal_scale / (ds * ds);
    const double inv_eps2 = 1.0 / (epsilon * epsilon);
    const auto& axes = grid.t();
    std::vector<double> t_coef(axes.size());
    std::vector<std::size_t> strides(axes.size());
    double t_diag = 0.0;
    {
        std::size_t stride = nt;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            stride /= axes[k].count;
            strides[k] = stride;
            t_coef[k] = inv_eps2 / (axes[k].spacing() * axes[k].spacing());
            t_diag += 2.0 * t_coef[k];
        }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(grid.size() * (2 + axes.size()));
    for (std::size_t is = 0; is < ms; ++is) {
        for (std::size_t tau = 0; tau < nt; ++tau) {
            const std::size_t row = grid.index(is, tau);
            const double a_lo = a_mid(static_cast<Eigen::Index>(is), static_cast<Eigen::Index>(tau));
            const double a_hi = a_mid(static_cast<Eigen::Index>(is + 1), static_cast<Eigen::Index>(tau));
            const double diag = (a_lo + a_hi) * inv_ds2 + t_diag + diagonal(static_cast<Eigen::Index>(row));
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
            if (is > 0) triplets.emplace_back(static_cast<int>(row), static_cast<int>(grid.index(is - 1, tau)), -a_lo * inv_ds2);
            for (std::size_t k = 0; k < axes.size(); ++k) {
                const std::size_t pos = (tau / strides[k]) % axes[k].count;
                if (pos > 0) triplets.emplace_back(static_cast<int>(row), static_cast<int>(row - strides[k]), -t_coef[k]);
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::SparseMatrix<double> lower(n, n);
    lower.setFromTriplets(triplets.begin(), triplets.end());
    return {kind, epsilon, grid, std::move(lower)};
}

namespace {

void check_common(const CrossSection& omega, double epsilon, const TensorGrid& grid) {
    if (!(epsilon > 0.0)) throw PreconditionError("assemble: epsilon must be positive");
    if (grid.size() == 0) throw AssemblyError("assemble: empty grid");
    if (!omega.matches(grid)) throw AssemblyError("assemble: grid box differs from the cross-section");
}

DiscreteOperator assemble_tube(OperatorKind kind, const JacobianField& jf, const PotentialField& v,
                               const CrossSection& omega, double epsilon, const TensorGrid& grid, double e1_shift) {
    check_common(omega, epsilon, grid);
    if (!(jf.grid == grid)) throw AssemblyError("assemble: Jacobian field lives on a different grid");
    if (jf.epsilon != epsilon) throw AssemblyError("assemble: Jacobian field built for a different epsilon");
    if (!v.has_full() || v.full.size() != static_cast<Eigen::Index>(grid.size()))
        throw AssemblyError("assemble: full potential missing or mismatched");
    const Eigen::MatrixXd a_mid = jf.h_mid.array().square().inverse().matrix();
    Eigen::VectorXd diag = v.full.array() - e1_shift;
    return assemble_flux_operator(kind, grid, epsilon, a_mid, diag);
}

double e1_shift(const CrossSection& omega, double epsilon) {
    return transverse_eigenpair(omega, 1).value / (epsilon * epsilon);
}

Eigen::VectorXd broadcast_v0(const PotentialField& v, const TensorGrid& grid) {
    if (v.v0.size() != static_cast<Eigen::Index>(grid.s().count))
        throw AssemblyError("assemble: v0 does not match the s-grid");
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.s().count; ++i)
        for (std::size_t tau = 0; tau < grid.transverse_count(); ++tau)
            out(static_cast<Eigen::Index>(grid.index(i, tau))) = v.v0(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace

DiscreteOperator assemble_T(const JacobianField& jf, const PotentialField& v, const CrossSection& omega,
                            double epsilon, const TensorGrid& grid) {
    return assemble_tube(OperatorKind::T, jf, v, omega, epsilon, grid, e1_shift(omega, epsilon));
}

DiscreteOperator assemble_H(const JacobianField& jf, const PotentialField& v, const CrossSection& omega,
                            double epsilon, const TensorGrid& grid) {
    return assemble_tube(OperatorKind::H, jf, v, omega, epsilon, grid, 0.0);
}

DiscreteOperator assemble_T0(const PotentialField& v, const CrossSection& omega, double epsilon,
                             const TensorGrid& grid) {
    check_common(omega, epsilon, grid);
    const Eigen::MatrixXd a_mid = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(grid.s().count + 1),
                                                        static_cast<Eigen::Index>(grid.transverse_count()));
    Eigen::VectorXd diag = broadcast_v0(v, grid).array() - e1_shift(omega, epsilon);
    return assemble_flux_operator(OperatorKind::T0, grid, epsilon, a_mid, diag);
}

DiscreteOperator assemble_S(const PotentialField& v, const Axis& s_axis) {
    TensorGrid grid(s_axis, {});
    const Eigen::MatrixXd a_mid = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(s_axis.count + 1), 1);
    return assemble_flux_operator(OperatorKind::S, grid, 1.0, a_mid, broadcast_v0(v, grid));
}

DiscreteOperator assemble_T_bound(const PotentialField& v, const CrossSection& omega, double epsilon,
                                  const TensorGrid& grid, double constant, int sign) {
    check_common(omega, epsilon, grid);
    if (sign != 1 && sign != -1) throw PreconditionError("assemble_T_bound: sign must be +1 or -1");
    const double scale = 1.0 + sign * constant * epsilon;
    const Eigen::MatrixXd a_mid = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(grid.s().count + 1),
                                                        static_cast<Eigen::Index>(grid.transverse_count()));
    Eigen::VectorXd diag = scale * broadcast_v0(v, grid).array() - e1_shift(omega, epsilon) +
                           sign * constant * (1.0 + constant) * epsilon;
    return assemble_flux_operator(OperatorKind::Bound, grid, epsilon, a_mid, diag, scale);
}

AssumptionConstants measure_assumption_constants(const JacobianField& jf, const PotentialField& v) {
    const TensorGrid& grid = jf.grid;
    const double eps = jf.epsilon;
    AssumptionConstants c;
    c.inf_a = std::numeric_limits<double>::infinity();
    double a_c0 = 0.0, a_ds = 0.0, a_dt = 0.0, a_mid_dev = 0.0;
    for (Eigen::Index idx = 0; idx < jf.h.size(); ++idx) {
        const double h = jf.h(idx);
        const double a = 1.0 / (h * h);
        c.inf_a = std::min(c.inf_a, a);
        a_c0 = std::max(a_c0, std::abs(a - 1.0));
        a_ds = std::max(a_ds, std::abs(2.0 * jf.d1h(idx) / (h * h * h)));
        a_dt = std::max(a_dt, 2.0 * std::sqrt(jf.grad_t_sq(idx)) / (h * h * h));
    }
    for (Eigen::Index k = 0; k < jf.h_mid.size(); ++k) {
        const double h = jf.h_mid.data()[k];
        const double a = 1.0 / (h * h);
        c.inf_a = std::min(c.inf_a, a);
        a_mid_dev = std::max(a_mid_dev, std::abs(a - 1.0));
    }
    c.a_minus_1_c1 = std::max({a_c0, a_ds, a_dt});
    c.v_deviation = v.deviation(grid);
    c.v0_sup = v.v0.size() ? v.v0.cwiseAbs().maxCoeff() : 0.0;
    c.constant = std::max({1.0 / c.inf_a, (c.a_minus_1_c1 + c.v_deviation) / eps, c.v0_sup});
    c.bracket_constant = std::max({a_mid_dev / eps, c.v_deviation / eps, c.v0_sup});
    return c;
}

void write_coo(const DiscreteOperator& op, std::ostream& out) {
    const Eigen::SparseMatrix<double> a = op.full();
    for (Eigen::Index c = 0; c < a.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
}

}  // namespace tube
