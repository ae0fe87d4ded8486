#include "tube/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tube/errors.hpp"

namespace tube {

std::vector<double> Axis::nodes() const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = node(i);
    return out;
}

TensorGrid::TensorGrid(Axis s_axis, std::vector<Axis> t_axes) : s_(s_axis), t_(std::move(t_axes)) {
    if (s_.count == 0 || !(s_.hi > s_.lo)) throw PreconditionError("TensorGrid: empty longitudinal axis");
    transverse_count_ = 1;
    for (const auto& a : t_) {
        if (a.count == 0 || !(a.hi > a.lo)) throw PreconditionError("TensorGrid: empty transverse axis");
        transverse_count_ *= a.count;
    }
}

TensorGrid TensorGrid::box(double length, std::size_t s_nodes, std::span<const double> sides,
                           std::span<const std::size_t> t_nodes) {
    if (sides.size() != t_nodes.size()) throw PreconditionError("TensorGrid::box: sides/node-count mismatch");
    std::vector<Axis> t;
    t.reserve(sides.size());
    for (std::size_t k = 0; k < sides.size(); ++k) t.push_back({-0.5 * sides[k], 0.5 * sides[k], t_nodes[k]});
    return TensorGrid({0.0, length, s_nodes}, std::move(t));
}

std::vector<std::size_t> TensorGrid::transverse_multi_index(std::size_t tau) const {
    std::vector<std::size_t> idx(t_.size());
    for (std::size_t k = t_.size(); k-- > 0;) {
        idx[k] = tau % t_[k].count;
        tau /= t_[k].count;
    }
    return idx;
}

std::vector<double> TensorGrid::transverse_point(std::size_t tau) const {
    auto idx = transverse_multi_index(tau);
    std::vector<double> p(t_.size());
    for (std::size_t k = 0; k < t_.size(); ++k) p[k] = t_[k].node(idx[k]);
    return p;
}

double TensorGrid::boundary_distance(std::size_t tau) const {
    auto p = transverse_point(tau);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t_.size(); ++k) d = std::min({d, p[k] - t_[k].lo, t_[k].hi - p[k]});
    return d;
}

double TensorGrid::radius() const {
    double r2 = 0.0;
    for (const auto& a : t_) {
        const double half = 0.5 * (a.hi - a.lo);
        r2 += half * half;
    }
    return std::sqrt(r2);
}

double TensorGrid::transverse_cell() const {
    double v = 1.0;
    for (const auto& a : t_) v *= a.spacing();
    return v;
}

}  // namespace tube
