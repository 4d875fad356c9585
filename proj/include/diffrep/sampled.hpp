#pragma once

// Grid-sampled compactly supported complex functions.
//
// A SampledFunction stores node values on a GridSpec together with a support
// box outside of which every node value is exactly zero. Between nodes the
// function is read through its multilinear interpolant, and integrals use the
// tensor-product trapezoid rule of the grid.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "diffrep/grid.hpp"

namespace diffrep {

using cplx = std::complex<double>;

/// Relative threshold of the numerical "nonzero" test.
inline constexpr double kEpsZero = 1e-9;

class SampledFunction {
public:
    SampledFunction() = default;
    /// Values outside `support` are set to zero. Throws when the support is
    /// not inside the grid box or a value is not finite.
    SampledFunction(GridSpec grid, Box support, std::vector<cplx> values);

    static SampledFunction zeros(GridSpec grid);

    const GridSpec& grid() const noexcept { return grid_; }
    const Box& support() const noexcept { return support_; }
    const std::vector<cplx>& values() const noexcept { return values_; }
    std::size_t dim() const noexcept { return grid_.dim(); }

    cplx at(std::span<const std::ptrdiff_t> idx) const { return values_[grid_.flat(idx)]; }
    cplx operator[](std::size_t flat) const { return values_[flat]; }

    /// Node range covered by the support box.
    IndexBox support_nodes() const { return grid_.nodes_in(support_); }
    double max_abs() const;
    /// Bounding box of the nodes holding nonzero values; nullopt for the zero function.
    std::optional<Box> exact_support() const;

    /// Multilinear interpolation; zero outside the grid.
    cplx evaluate(std::span<const double> p) const;

private:
    GridSpec grid_;
    Box support_;
    std::vector<cplx> values_;
};

using PointFunction = std::function<cplx(std::span<const double>)>;

/// Pointwise evaluation at the nodes inside `support`; zero elsewhere.
SampledFunction sample(const PointFunction& f, const GridSpec& grid, const Box& support);

/// Trapezoid rule of the grid, summed over the support nodes.
cplx integrate(const SampledFunction& f);
/// Exact integral of the multilinear interpolant over an arbitrary box.
cplx integrate_over_box(const SampledFunction& f, const Box& region);

cplx inner_product(const SampledFunction& f, const SampledFunction& g);
double l2_norm(const SampledFunction& f);

/// Nonzero test: max|f| > kEpsZero * max(1, reference_scale).
bool numerically_nonzero(const SampledFunction& f, double reference_scale = 1.0);

/// g*(y) = conj(g(-y)); the grid must be symmetric about the origin.
SampledFunction star_euclid(const SampledFunction& g);
/// g*(y) = conj(g(y^{-1})) on H_n. The x,y axes must be symmetric about the
/// origin; z is read by linear interpolation.
SampledFunction star_heis(const SampledFunction& g);
/// Bounding box of group_inv applied to a box in H_n (corner enumeration).
Box heis_inverse_box(const Box& b);

// Pointwise algebra on identical grids. Supports combine conservatively.
SampledFunction operator+(const SampledFunction& a, const SampledFunction& b);
SampledFunction operator-(const SampledFunction& a, const SampledFunction& b);
SampledFunction operator*(cplx s, const SampledFunction& a);
SampledFunction conj(const SampledFunction& a);
SampledFunction abs_squared(const SampledFunction& a);

/// Sup-norm of a - b over the union of both grids; the grids must share spacing
/// and lie on a common lattice.
double max_abs_difference(const SampledFunction& a, const SampledFunction& b);

}  // namespace diffrep
