#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tube {

/// Uniform interior nodes of an open interval (lo, hi); the endpoints carry
/// the Dirichlet condition and are not stored.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 0;

    double spacing() const { return (hi - lo) / static_cast<double>(count + 1); }
    double node(std::size_t i) const { return lo + static_cast<double>(i + 1) * spacing(); }
    /// Midpoint between node i-1 and node i; k = 0 is between lo and node 0, k = count between the last node and hi.
    double midpoint(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * spacing(); }
    std::vector<double> nodes() const;

    bool operator==(const Axis&) const = default;
};

/// Tensor grid over Omega = (0,L) x omega with omega a centred box.
///
/// Nodes are ordered lexicographically with s slowest and the last transverse
/// coordinate fastest, so index = i_s * transverse_count() + tau.
class TensorGrid {
public:
    TensorGrid() = default;
    TensorGrid(Axis s_axis, std::vector<Axis> t_axes);

    /// Grid on (0, length) x prod(-sides/2, sides/2) with the given interior node counts.
    static TensorGrid box(double length, std::size_t s_nodes, std::span<const double> sides,
                          std::span<const std::size_t> t_nodes);

    const Axis& s() const { return s_; }
    const std::vector<Axis>& t() const { return t_; }
    std::size_t transverse_dims() const { return t_.size(); }
    std::size_t dim() const { return t_.size() + 1; }

    std::size_t transverse_count() const { return transverse_count_; }
    std::size_t size() const { return s_.count * transverse_count_; }
    std::size_t index(std::size_t is, std::size_t tau) const { return is * transverse_count_ + tau; }

    /// Per-axis indices of transverse node tau.
    std::vector<std::size_t> transverse_multi_index(std::size_t tau) const;
    std::vector<double> transverse_point(std::size_t tau) const;
    /// Distance from transverse node tau to the boundary of the box.
    double boundary_distance(std::size_t tau) const;
    /// Half-diagonal of the box, sup |t| over omega.
    double radius() const;

    double transverse_cell() const;
    double cell_volume() const { return s_.spacing() * transverse_cell(); }

    bool operator==(const TensorGrid& other) const { return s_ == other.s_ && t_ == other.t_; }

private:
    Axis s_;
    std::vector<Axis> t_;
    std::size_t transverse_count_ = 1;
};

}  // namespace tube
