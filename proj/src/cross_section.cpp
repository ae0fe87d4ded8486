#include "tube/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tube/errors.hpp"

namespace tube {

CrossSection::CrossSection(Kind kind, std::vector<double> sides) : kind_(kind), sides_(std::move(sides)) {
    if (sides_.empty()) throw PreconditionError("CrossSection: at least one transverse dimension required");
    for (double b : sides_)
        if (!(b > 0.0)) throw PreconditionError("CrossSection: side lengths must be positive");
}

CrossSection CrossSection::interval(double half_width) { return {Kind::Interval, {2.0 * half_width}}; }

CrossSection CrossSection::rectangle(std::vector<double> sides) {
    const Kind kind = sides.size() == 1 ? Kind::Interval : Kind::Rectangle;
    return {kind, std::move(sides)};
}

double CrossSection::radius() const {
    double r2 = 0.0;
    for (double b : sides_) r2 += 0.25 * b * b;
    return std::sqrt(r2);
}

bool CrossSection::matches(const TensorGrid& grid) const {
    if (grid.transverse_dims() != sides_.size()) return false;
    for (std::size_t k = 0; k < sides_.size(); ++k) {
        const auto& a = grid.t()[k];
        const double tol = 1e-12 * sides_[k];
        if (std::abs(a.lo + 0.5 * sides_[k]) > tol || std::abs(a.hi - 0.5 * sides_[k]) > tol) return false;
    }
    return true;
}

double TransverseEigenpair::operator()(std::span<const double> t) const {
    double v = 1.0;
    for (std::size_t k = 0; k < sides.size(); ++k) {
        const double b = sides[k];
        v *= std::sqrt(2.0 / b) * std::sin(static_cast<double>(modes[k]) * std::numbers::pi * (t[k] + 0.5 * b) / b);
    }
    return v;
}

std::vector<double> TransverseEigenpair::sample(const TensorGrid& grid) const {
    std::vector<double> out(grid.transverse_count());
    for (std::size_t tau = 0; tau < out.size(); ++tau) out[tau] = (*this)(grid.transverse_point(tau));
    return out;
}

double TransverseEigenpair::discrete_value(const TensorGrid& grid) const {
    double v = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const auto& a = grid.t()[k];
        const double dt = a.spacing();
        const double sn = std::sin(static_cast<double>(modes[k]) * std::numbers::pi / (2.0 * static_cast<double>(a.count + 1)));
        v += 4.0 / (dt * dt) * sn * sn;
    }
    return v;
}

TransverseEigenpair transverse_eigenpair(const CrossSection& omega, std::size_t n) {
    if (n < 1) throw PreconditionError("transverse_eigenpair: n must be >= 1");
    const std::size_t dims = omega.transverse_dims();
    // The n-th pair has every mode number <= n.
    struct Candidate {
        double value;
        std::vector<std::size_t> modes;
    };
    std::vector<Candidate> all;
    std::vector<std::size_t> m(dims, 1);
    while (true) {
        double v = 0.0;
        for (std::size_t k = 0; k < dims; ++k) {
            const double q = static_cast<double>(m[k]) * std::numbers::pi / omega.sides()[k];
            v += q * q;
        }
        all.push_back({v, m});
        std::size_t k = dims;
        while (k-- > 0) {
            if (++m[k] <= n) break;
            m[k] = 1;
        }
        if (k == static_cast<std::size_t>(-1)) break;
    }
    std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
    const auto& c = all.at(n - 1);
    return {n, c.value, c.modes, omega.sides()};
}

namespace {

/// psi^T (-Laplacian_h) psi for the 3-point stencil in every transverse direction.
double stencil_energy(const TensorGrid& grid, std::span<const double> psi) {
    const std::size_t nt = grid.transverse_count();
    const auto& axes = grid.t();
    double energy = 0.0;
    std::size_t stride = nt;
    for (std::size_t k = 0; k < axes.size(); ++k) {
        const std::size_t count = axes[k].count;
        stride /= count;
        const double inv = 1.0 / (axes[k].spacing() * axes[k].spacing());
        for (std::size_t tau = 0; tau < nt; ++tau) {
            const std::size_t pos = (tau / stride) % count;
            const double here = psi[tau];
            const double prev = pos > 0 ? psi[tau - stride] : 0.0;
            energy += inv * (here - prev) * (here - prev);
            if (pos + 1 == count) energy += inv * here * here;
        }
    }
    return energy;
}

}  // namespace

double poincare_ratio(const CrossSection& omega, const TensorGrid& grid, std::span<const double> psi) {
    if (!omega.matches(grid)) throw PreconditionError("poincare_ratio: grid is not built on this cross-section");
    if (psi.size() != grid.transverse_count()) throw PreconditionError("poincare_ratio: sample count mismatch");
    double norm = 0.0;
    for (double v : psi) norm += v * v;
    if (norm == 0.0) throw DegenerateInputError("poincare_ratio: psi is identically zero");
    return stencil_energy(grid, psi) / norm;
}

double discrete_poincare_constant(const TensorGrid& grid) {
    double v = 0.0;
    for (const auto& a : grid.t()) {
        const double sn = std::sin(std::numbers::pi / (2.0 * static_cast<double>(a.count + 1)));
        v += 4.0 / (a.spacing() * a.spacing()) * sn * sn;
    }
    return v;
}

double ground_state_boundary_ratio(const CrossSection& omega, const TensorGrid& grid) {
    const auto j1 = transverse_eigenpair(omega, 1);
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t tau = 0; tau < grid.transverse_count(); ++tau)
        ratio = std::min(ratio, j1(grid.transverse_point(tau)) / grid.boundary_distance(tau));
    return ratio;
}

}  // namespace tube
