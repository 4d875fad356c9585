#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace diffrep {

/// Closed axis-aligned box [lo, hi]. Used for support boxes and domains.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> lo_, std::vector<double> hi_);

    static Box cube(std::size_t dim, double half_width);
    static Box symmetric(std::span<const double> half_widths);

    std::size_t dim() const noexcept { return lo.size(); }
    bool contains(std::span<const double> p, double tol = 0.0) const;
    bool contains(const Box& other, double tol = 0.0) const;
    bool intersects(const Box& other) const;
    double volume() const;
    /// Largest Euclidean norm attained on the box.
    double max_norm() const;
    /// Distance from the origin to the nearest face; negative if 0 is outside.
    double inner_radius() const;
    Box padded(double amount) const;
    Box padded_relative(double fraction) const;
    std::vector<std::vector<double>> corners() const;
};

Box bounding_union(const Box& a, const Box& b);
Box intersection(const Box& a, const Box& b);
Box minkowski_sum(const Box& a, const Box& b);

/// Inclusive node-index ranges per axis.
struct IndexBox {
    std::vector<std::ptrdiff_t> lo;
    std::vector<std::ptrdiff_t> hi;

    bool empty() const;
    std::size_t count() const;
};

/// Uniform rectangular grid. Node i along axis a sits at lo[a] + i h[a].
/// Flat indices are row-major with the last axis fastest.
class GridSpec {
public:
    GridSpec() = default;
    GridSpec(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> counts);

    static GridSpec cube(std::size_t dim, double half_width, std::size_t count);
    /// Grid with spacing h whose first node is origin[a] + first[a] h.
    static GridSpec on_lattice(std::span<const double> origin, std::span<const double> h,
                               std::span<const std::ptrdiff_t> first,
                               std::span<const std::size_t> counts);

    std::size_t dim() const noexcept { return lo_.size(); }
    const std::vector<double>& lo() const noexcept { return lo_; }
    const std::vector<double>& hi() const noexcept { return hi_; }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }
    const std::vector<std::size_t>& strides() const noexcept { return strides_; }
    double spacing(std::size_t axis) const { return h_[axis]; }
    const std::vector<double>& spacings() const noexcept { return h_; }
    std::size_t size() const noexcept { return size_; }
    Box box() const { return Box(lo_, hi_); }

    double coord(std::size_t axis, std::ptrdiff_t i) const {
        return lo_[axis] + static_cast<double>(i) * h_[axis];
    }
    std::size_t flat(std::span<const std::ptrdiff_t> idx) const;
    void unflat(std::size_t flat, std::span<std::ptrdiff_t> idx) const;
    void node(std::size_t flat, std::span<double> point) const;
    std::vector<double> node(std::size_t flat) const;

    /// Trapezoid weight of the node along one axis.
    double axis_weight(std::size_t axis, std::ptrdiff_t i) const;
    double weight(std::span<const std::ptrdiff_t> idx) const;

    /// Nodes whose coordinates lie in the box (tolerance 1e-9 h).
    IndexBox nodes_in(const Box& b) const;
    IndexBox all_nodes() const;

    bool same_spacing(const GridSpec& other, double rel_tol = 1e-9) const;
    bool operator==(const GridSpec& other) const;

private:
    std::vector<double> lo_, hi_, h_;
    std::vector<std::size_t> counts_, strides_;
    std::size_t size_ = 0;
};

/// Iterates the nodes of an IndexBox in row-major order (last axis fastest).
class IndexIterator {
public:
    explicit IndexIterator(const IndexBox& box);
    bool done() const noexcept { return done_; }
    const std::vector<std::ptrdiff_t>& index() const noexcept { return idx_; }
    void next();

private:
    IndexBox box_;
    std::vector<std::ptrdiff_t> idx_;
    bool done_;
};

}  // namespace diffrep
