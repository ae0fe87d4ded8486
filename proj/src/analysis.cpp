#include "tube/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>

#include "tube/errors.hpp"

namespace tube {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Zero crossings of samples taken at the given abscissae.
std::vector<double> crossings(std::span<const double> values, const Axis& axis, std::size_t offset = 0,
                              std::size_t stride = 1) {
    std::vector<double> out;
    const std::size_t n = axis.count;
    std::size_t prev = n;  // last node with a non-zero value
    for (std::size_t i = 0; i < n; ++i) {
        const double v = values[offset + i * stride];
        const int sg = sign_of(v);
        if (sg == 0) continue;
        if (prev != n && sg != sign_of(values[offset + prev * stride])) {
            if (i == prev + 1) {
                const double a = values[offset + prev * stride];
                const double sa = axis.node(prev), sb = axis.node(i);
                out.push_back(sa + (sb - sa) * a / (a - v));
            } else {
                out.push_back(axis.node(prev + 1));
            }
        }
        prev = i;
    }
    return out;
}

}  // namespace

std::vector<double> NodalData1D::partition() const {
    std::vector<double> p;
    p.reserve(zeros.size() + 2);
    p.push_back(0.0);
    p.insert(p.end(), zeros.begin(), zeros.end());
    p.push_back(length);
    return p;
}

double NodalData1D::distance(double s) const {
    double d = std::numeric_limits<double>::infinity();
    for (double z : zeros) d = std::min(d, std::abs(s - z));
    return d;
}

double NodalData1D::subinterval_distance(double s) const {
    return std::min({distance(s), std::abs(s), std::abs(length - s)});
}

NodalData1D nodal_points_1d(std::span<const double> phi, const Axis& s_axis, std::size_t n) {
    if (phi.size() != s_axis.count) throw PreconditionError("nodal_points_1d: sample count mismatch");
    if (n < 1) throw PreconditionError("nodal_points_1d: n must be >= 1");
    NodalData1D data;
    data.index = n;
    data.length = s_axis.hi - s_axis.lo;
    data.zeros = crossings(phi, s_axis);
    if (data.zeros.size() != n - 1) {
        std::ostringstream msg;
        msg << "nodal_points_1d: eigenfunction " << n << " has " << data.zeros.size() << " interior zeros, expected "
            << n - 1;
        throw SturmViolation(msg.str());
    }
    const auto p = data.partition();
    data.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < p.size(); ++k) data.min_gap = std::min(data.min_gap, p[k + 1] - p[k]);
    return data;
}

PropertyReport verify_sturm_properties(const EigenResult& s_result, double bound, const Axis& s_axis,
                                       double tolerance) {
    PropertyReport rep;
    const double length = s_axis.hi - s_axis.lo;
    const double ds = s_axis.spacing();
    const std::size_t count = s_result.size();
    rep.min_gap = std::numeric_limits<double>::infinity();
    rep.min_zero_spacing = std::numeric_limits<double>::infinity();
    rep.min_boundary_ratio = std::numeric_limits<double>::infinity();
    rep.max_bracket_excess = -std::numeric_limits<double>::infinity();
    std::ostringstream failures;
    for (std::size_t n = 1; n <= count; ++n) {
        const double mu = s_result.values[n - 1];
        const double free = std::pow(static_cast<double>(n) * std::numbers::pi / length, 2);
        const double excess = std::abs(mu - free) - bound;
        rep.max_bracket_excess = std::max(rep.max_bracket_excess, excess);
        if (excess > tolerance) {
            rep.bracket_ok = false;
            failures << "bracket n=" << n << " exceeds by " << excess << "; ";
        }
        if (n < count) {
            const double gap = s_result.values[n] - mu;
            rep.min_gap = std::min(rep.min_gap, gap);
            if (!(gap > 0.0)) {
                rep.gaps_ok = false;
                failures << "non-positive gap after n=" << n << "; ";
            }
        }
        const Eigen::VectorXd phi = s_result.vector(n);
        std::span<const double> values(phi.data(), static_cast<std::size_t>(phi.size()));
        try {
            const NodalData1D nodal = nodal_points_1d(values, s_axis, n);
            rep.min_zero_spacing = std::min(rep.min_zero_spacing, nodal.min_gap);
            for (std::size_t i = 0; i < s_axis.count; ++i) {
                const double s = s_axis.node(i);
                rep.min_boundary_ratio = std::min(rep.min_boundary_ratio, std::abs(values[i]) / nodal.subinterval_distance(s));
            }
        } catch (const SturmViolation& e) {
            rep.zero_counts_ok = false;
            failures << e.what() << "; ";
        }
        double c0 = 0.0, c1 = 0.0, c2 = 0.0;
        for (std::size_t i = 0; i < s_axis.count; ++i) {
            const double prev = i > 0 ? values[i - 1] : 0.0;
            const double next = i + 1 < s_axis.count ? values[i + 1] : 0.0;
            c0 = std::max(c0, std::abs(values[i]));
            c1 = std::max(c1, std::abs(next - prev) / (2.0 * ds));
            c2 = std::max(c2, std::abs(next - 2.0 * values[i] + prev) / (ds * ds));
        }
        rep.c2_norms.push_back(std::max({c0, c1, c2}));
    }
    rep.spacing_ok = rep.zero_counts_ok && rep.min_zero_spacing > 0.0;
    rep.ratio_ok = rep.zero_counts_ok && rep.min_boundary_ratio > 0.0;
    rep.failure = failures.str();
    return rep;
}

Eigen::VectorXd product_state(std::span<const double> phi, std::span<const double> j1, const TensorGrid& grid) {
    if (phi.size() != grid.s().count || j1.size() != grid.transverse_count())
        throw PreconditionError("product_state: factor sizes do not match the grid");
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < phi.size(); ++i)
        for (std::size_t tau = 0; tau < j1.size(); ++tau)
            out(static_cast<Eigen::Index>(grid.index(i, tau))) = phi[i] * j1[tau];
    const double norm = std::sqrt(out.squaredNorm() * grid.cell_volume());
    if (norm == 0.0) throw DegenerateInputError("product_state: zero factor");
    return out / norm;
}

PairedEigenfunction pair_and_sign(const Eigen::VectorXd& psi, const Eigen::VectorXd& psi0, double weight) {
    if (psi.size() != psi0.size()) throw PreconditionError("pair_and_sign: size mismatch");
    const double n1 = std::sqrt(psi.squaredNorm() * weight);
    const double n0 = std::sqrt(psi0.squaredNorm() * weight);
    if (n1 == 0.0 || n0 == 0.0) throw DegenerateInputError("pair_and_sign: zero vector");
    PairedEigenfunction out;
    out.psi = psi / n1;
    out.psi0 = psi0 / n0;
    const double overlap = out.psi.dot(out.psi0) * weight;
    if (std::abs(overlap) < 0.5) {
        std::ostringstream msg;
        msg << "pair_and_sign: overlap " << overlap << " below 0.5; epsilon is outside the asymptotic regime";
        throw PairingAmbiguity(msg.str());
    }
    if (overlap < 0.0) {
        out.psi = -out.psi;
        out.flipped = true;
    }
    out.overlap = std::abs(overlap);
    return out;
}

EigenfunctionErrors eigenfunction_errors(const Eigen::VectorXd& psi, const Eigen::VectorXd& psi0,
                                         const CrossSection& omega, const TensorGrid& grid) {
    if (!omega.matches(grid)) throw PreconditionError("eigenfunction_errors: grid is not built on omega");
    if (psi.size() != static_cast<Eigen::Index>(grid.size()) || psi0.size() != psi.size())
        throw PreconditionError("eigenfunction_errors: size mismatch");
    const std::size_t nt = grid.transverse_count();
    std::vector<double> dist(nt);
    for (std::size_t tau = 0; tau < nt; ++tau) dist[tau] = grid.boundary_distance(tau);
    EigenfunctionErrors e;
    for (std::size_t i = 0; i < grid.s().count; ++i)
        for (std::size_t tau = 0; tau < nt; ++tau) {
            const auto idx = static_cast<Eigen::Index>(grid.index(i, tau));
            const double diff = std::abs(psi(idx) - psi0(idx));
            e.sup = std::max(e.sup, diff);
            e.weighted = std::max(e.weighted, diff / dist[tau]);
        }
    return e;
}

ViolationReport sign_agreement(const Eigen::VectorXd& psi, std::span<const double> phi, const NodalData1D& nodal,
                               const TensorGrid& grid, double margin) {
    if (phi.size() != grid.s().count || psi.size() != static_cast<Eigen::Index>(grid.size()))
        throw PreconditionError("sign_agreement: size mismatch");
    ViolationReport rep;
    for (std::size_t i = 0; i < grid.s().count; ++i) {
        const double dist = nodal.distance(grid.s().node(i));
        const int expected = sign_of(phi[i]);
        for (std::size_t tau = 0; tau < grid.transverse_count(); ++tau) {
            const bool agree = sign_of(psi(static_cast<Eigen::Index>(grid.index(i, tau)))) == expected;
            if (!agree) rep.empirical_margin = std::max(rep.empirical_margin, dist);
            if (dist > margin) {
                ++rep.checked;
                if (!agree) ++rep.violations;
            }
        }
    }
    return rep;
}

NodalDisplacement nodal_displacement(const Eigen::VectorXd& psi, const NodalData1D& nodal, const TensorGrid& grid) {
    if (psi.size() != static_cast<Eigen::Index>(grid.size())) throw PreconditionError("nodal_displacement: size mismatch");
    NodalDisplacement out;
    const std::size_t nt = grid.transverse_count();
    std::span<const double> values(psi.data(), static_cast<std::size_t>(psi.size()));
    for (std::size_t tau = 0; tau < nt; ++tau) {
        const auto line = crossings(values, grid.s(), tau, nt);
        if (line.size() != nodal.zeros.size()) ++out.flagged_lines;
        for (double s : line) {
            const double d = std::min(nodal.distance(s), nodal.length);
            out.crossings.push_back({tau, s, d});
            out.max_displacement = std::max(out.max_displacement, d);
        }
    }
    return out;
}

std::size_t sign_domains(const Eigen::VectorXd& psi, const TensorGrid& grid) {
    const std::size_t total = grid.size();
    if (psi.size() != static_cast<Eigen::Index>(total)) throw PreconditionError("sign_domains: size mismatch");
    const std::size_t nt = grid.transverse_count();
    std::vector<std::size_t> strides;
    std::vector<std::size_t> counts;
    {
        std::size_t stride = nt;
        for (const auto& a : grid.t()) {
            stride /= a.count;
            strides.push_back(stride);
            counts.push_back(a.count);
        }
    }
    std::vector<char> seen(total, 0);
    std::size_t domains = 0;
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < total; ++start) {
        const int sg = sign_of(psi(static_cast<Eigen::Index>(start)));
        if (seen[start] || sg == 0) continue;
        ++domains;
        seen[start] = 1;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::size_t node = queue.front();
            queue.pop_front();
            const std::size_t is = node / nt, tau = node % nt;
            auto visit = [&](std::size_t other) {
                if (!seen[other] && sign_of(psi(static_cast<Eigen::Index>(other))) == sg) {
                    seen[other] = 1;
                    queue.push_back(other);
                }
            };
            if (is > 0) visit(node - nt);
            if (is + 1 < grid.s().count) visit(node + nt);
            for (std::size_t k = 0; k < strides.size(); ++k) {
                const std::size_t pos = (tau / strides[k]) % counts[k];
                if (pos > 0) visit(node - strides[k]);
                if (pos + 1 < counts[k]) visit(node + strides[k]);
            }
        }
    }
    return domains;
}

std::size_t boundary_terminations(const Eigen::VectorXd& psi, const TensorGrid& grid) {
    if (grid.dim() != 2) throw CapabilityError("boundary_terminations: only planar (d = 2) grids are supported");
    const std::size_t ms = grid.s().count, nt = grid.transverse_count();
    std::vector<std::size_t> ring;
    for (std::size_t tau = 0; tau < nt; ++tau) ring.push_back(grid.index(0, tau));
    for (std::size_t i = 1; i < ms; ++i) ring.push_back(grid.index(i, nt - 1));
    if (ms > 1)
        for (std::size_t tau = nt - 1; tau-- > 0;) ring.push_back(grid.index(ms - 1, tau));
    if (nt > 1)
        for (std::size_t i = ms - 1; i-- > 1;) ring.push_back(grid.index(i, 0));
    std::vector<int> signs;
    for (auto idx : ring) {
        const int sg = sign_of(psi(static_cast<Eigen::Index>(idx)));
        if (sg != 0) signs.push_back(sg);
    }
    std::size_t changes = 0;
    for (std::size_t k = 0; k < signs.size(); ++k)
        if (signs[k] != signs[(k + 1) % signs.size()]) ++changes;
    return changes;
}

LaplacianEigenfunction reconstruct_laplacian_eigenfunction(const Eigen::VectorXd& psi, const Eigen::VectorXd& psi0,
                                                           const JacobianField& jf) {
    if (psi.size() != jf.h.size() || psi0.size() != jf.h.size())
        throw PreconditionError("reconstruct_laplacian_eigenfunction: size mismatch");
    if (jf.h.minCoeff() <= 0.0) throw GeometryError("reconstruct_laplacian_eigenfunction: h must be positive");
    const double d_minus_1 = static_cast<double>(jf.grid.dim() - 1);
    const double scale = std::pow(jf.epsilon, -0.5 * d_minus_1);
    const double jac = std::pow(jf.epsilon, d_minus_1);
    const double w = jf.grid.cell_volume();
    LaplacianEigenfunction out;
    const Eigen::ArrayXd factor = scale * jf.h.array().rsqrt();
    out.psi = (factor * psi.array()).matrix();
    out.psi0 = (factor * psi0.array()).matrix();
    out.norm_transformed = std::sqrt(psi.squaredNorm() * w);
    out.norm_physical = std::sqrt((out.psi.array().square() * jf.h.array()).sum() * jac * w);
    return out;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points) {
    RateFit fit;
    std::vector<double> x, y;
    for (const auto& [eps, metric] : points) {
        if (!(eps > 0.0) || !(metric > 0.0) || !std::isfinite(metric)) {
            std::ostringstream note;
            note << "dropped point eps=" << eps << " metric=" << metric;
            fit.notes.push_back(note.str());
            continue;
        }
        x.push_back(std::log(eps));
        y.push_back(std::log(metric));
    }
    fit.used = x.size();
    if (x.size() < 3) throw PreconditionError("fit_rate: fewer than three usable points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw PreconditionError("fit_rate: all epsilon values coincide");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += r * r;
    }
    fit.stderr_slope = std::sqrt(ssr / (n - 2.0) / sxx);
    return fit;
}

}  // namespace tube
