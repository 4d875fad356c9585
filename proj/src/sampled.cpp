#include "diffrep/sampled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "diffrep/errors.hpp"

namespace diffrep {

namespace {

double support_tolerance(const GridSpec& g) {
    double h = g.spacing(0);
    for (std::size_t a = 1; a < g.dim(); ++a) h = std::min(h, g.spacing(a));
    return 1e-9 * h;
}

void require_same_grid(const SampledFunction& a, const SampledFunction& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("functions live on different grids");
}

// Integral over [a, b] of the hat function centred at node i of one axis.
double hat_integral(const GridSpec& g, std::size_t axis, std::ptrdiff_t i, double a, double b) {
    const double h = g.spacing(axis);
    const double xi = g.coord(axis, i);
    const auto last = static_cast<std::ptrdiff_t>(g.counts()[axis]) - 1;
    double total = 0.0;
    // Left ramp on [xi - h, xi]: phi = (t - xi + h) / h.
    if (i > 0) {
        const double l = std::max(a, xi - h), r = std::min(b, xi);
        if (r > l) {
            const double ul = (l - xi + h) / h, ur = (r - xi + h) / h;
            total += 0.5 * h * (ur * ur - ul * ul);
        }
    }
    // Right ramp on [xi, xi + h]: phi = (xi + h - t) / h.
    if (i < last) {
        const double l = std::max(a, xi), r = std::min(b, xi + h);
        if (r > l) {
            const double ul = (xi + h - l) / h, ur = (xi + h - r) / h;
            total += 0.5 * h * (ul * ul - ur * ur);
        }
    }
    return total;
}

bool symmetric_axis(const GridSpec& g, std::size_t axis) {
    return std::abs(g.lo()[axis] + g.hi()[axis]) <= 1e-9 * g.spacing(axis);
}

}  // namespace

SampledFunction::SampledFunction(GridSpec grid, Box support, std::vector<cplx> values)
    : grid_(std::move(grid)), support_(std::move(support)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw DimensionMismatch("value array does not match grid size");
    if (support_.dim() != grid_.dim()) throw DimensionMismatch("support/grid dimension mismatch");
    if (!grid_.box().contains(support_, support_tolerance(grid_)))
        throw PreconditionError("support box exceeds grid box");
    for (const cplx& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw PreconditionError("sampled value not finite");

    const IndexBox inside = grid_.nodes_in(support_);
    if (inside.count() == grid_.size()) return;
    std::vector<std::ptrdiff_t> idx(grid_.dim());
    for (std::size_t f = 0; f < values_.size(); ++f) {
        grid_.unflat(f, idx);
        bool in = !inside.empty();
        for (std::size_t a = 0; a < grid_.dim() && in; ++a)
            in = idx[a] >= inside.lo[a] && idx[a] <= inside.hi[a];
        if (!in) values_[f] = 0.0;
    }
}

SampledFunction SampledFunction::zeros(GridSpec grid) {
    Box support = grid.box();
    std::vector<cplx> values(grid.size(), 0.0);
    return SampledFunction(std::move(grid), std::move(support), std::move(values));
}

double SampledFunction::max_abs() const {
    double m = 0.0;
    for (const cplx& v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::optional<Box> SampledFunction::exact_support() const {
    const std::size_t d = dim();
    std::vector<std::ptrdiff_t> lo(d, std::numeric_limits<std::ptrdiff_t>::max());
    std::vector<std::ptrdiff_t> hi(d, std::numeric_limits<std::ptrdiff_t>::min());
    std::vector<std::ptrdiff_t> idx(d);
    bool any = false;
    for (std::size_t f = 0; f < values_.size(); ++f) {
        if (values_[f] == cplx{}) continue;
        any = true;
        grid_.unflat(f, idx);
        for (std::size_t a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], idx[a]);
            hi[a] = std::max(hi[a], idx[a]);
        }
    }
    if (!any) return std::nullopt;
    std::vector<double> blo(d), bhi(d);
    for (std::size_t a = 0; a < d; ++a) {
        blo[a] = grid_.coord(a, lo[a]);
        bhi[a] = grid_.coord(a, hi[a]);
    }
    return Box(std::move(blo), std::move(bhi));
}

cplx SampledFunction::evaluate(std::span<const double> p) const {
    const std::size_t d = dim();
    if (p.size() != d) throw DimensionMismatch("evaluation point dimension mismatch");
    std::ptrdiff_t base[16];
    double frac[16];
    if (d > 16) throw DimensionMismatch("interpolation supports at most 16 axes");
    for (std::size_t a = 0; a < d; ++a) {
        const double u = (p[a] - grid_.lo()[a]) / grid_.spacing(a);
        const double last = static_cast<double>(grid_.counts()[a] - 1);
        if (u < -1e-9 || u > last + 1e-9) return 0.0;
        auto i0 = static_cast<std::ptrdiff_t>(std::floor(u));
        i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(last) - 1);
        base[a] = i0;
        frac[a] = std::clamp(u - static_cast<double>(i0), 0.0, 1.0);
    }
    cplx acc = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        double w = 1.0;
        std::size_t flat = 0;
        for (std::size_t a = 0; a < d; ++a) {
            const bool up = (mask >> a) & 1U;
            w *= up ? frac[a] : 1.0 - frac[a];
            flat += static_cast<std::size_t>(base[a] + (up ? 1 : 0)) * grid_.strides()[a];
        }
        if (w != 0.0) acc += w * values_[flat];
    }
    return acc;
}

SampledFunction sample(const PointFunction& f, const GridSpec& grid, const Box& support) {
    if (!grid.box().contains(support, support_tolerance(grid)))
        throw PreconditionError("support box exceeds grid box");
    std::vector<cplx> values(grid.size(), 0.0);
    const IndexBox nodes = grid.nodes_in(support);
    std::vector<double> p(grid.dim());
    for (IndexIterator it(nodes); !it.done(); it.next()) {
        const auto& idx = it.index();
        for (std::size_t a = 0; a < grid.dim(); ++a) p[a] = grid.coord(a, idx[a]);
        values[grid.flat(idx)] = f(p);
    }
    return SampledFunction(grid, support, std::move(values));
}

cplx integrate(const SampledFunction& f) {
    const GridSpec& g = f.grid();
    const IndexBox nodes = f.support_nodes();
    cplx acc = 0.0;
    for (IndexIterator it(nodes); !it.done(); it.next())
        acc += g.weight(it.index()) * f.at(it.index());
    return acc;
}

cplx integrate_over_box(const SampledFunction& f, const Box& region) {
    const GridSpec& g = f.grid();
    if (region.dim() != g.dim()) throw DimensionMismatch("region/grid dimension mismatch");
    const std::size_t d = g.dim();
    // Per-axis weights of the hat functions restricted to the region.
    std::vector<std::vector<double>> w(d);
    IndexBox nodes;
    nodes.lo.resize(d);
    nodes.hi.resize(d);
    const IndexBox sup = f.support_nodes();
    for (std::size_t a = 0; a < d; ++a) {
        const double h = g.spacing(a);
        auto lo = static_cast<std::ptrdiff_t>(std::floor((region.lo[a] - g.lo()[a]) / h));
        auto hi = static_cast<std::ptrdiff_t>(std::ceil((region.hi[a] - g.lo()[a]) / h));
        lo = std::max(lo, sup.lo[a]);
        hi = std::min(hi, sup.hi[a]);
        nodes.lo[a] = lo;
        nodes.hi[a] = hi;
        for (std::ptrdiff_t i = lo; i <= hi; ++i)
            w[a].push_back(hat_integral(g, a, i, region.lo[a], region.hi[a]));
    }
    cplx acc = 0.0;
    for (IndexIterator it(nodes); !it.done(); it.next()) {
        double wt = 1.0;
        for (std::size_t a = 0; a < d; ++a) wt *= w[a][static_cast<std::size_t>(it.index()[a] - nodes.lo[a])];
        if (wt != 0.0) acc += wt * f.at(it.index());
    }
    return acc;
}

cplx inner_product(const SampledFunction& f, const SampledFunction& g) {
    require_same_grid(f, g);
    const GridSpec& grid = f.grid();
    if (!f.support().intersects(g.support())) return 0.0;
    const IndexBox nodes = grid.nodes_in(intersection(f.support(), g.support()));
    cplx acc = 0.0;
    for (IndexIterator it(nodes); !it.done(); it.next()) {
        const std::size_t flat = grid.flat(it.index());
        acc += grid.weight(it.index()) * f[flat] * std::conj(g[flat]);
    }
    return acc;
}

double l2_norm(const SampledFunction& f) {
    return std::sqrt(std::max(0.0, inner_product(f, f).real()));
}

bool numerically_nonzero(const SampledFunction& f, double reference_scale) {
    return f.max_abs() > kEpsZero * std::max(1.0, reference_scale);
}

SampledFunction star_euclid(const SampledFunction& g) {
    const GridSpec& grid = g.grid();
    for (std::size_t a = 0; a < grid.dim(); ++a)
        if (!symmetric_axis(grid, a)) throw PreconditionError("grid not inversion-symmetric");
    std::vector<cplx> values(grid.size());
    std::vector<std::ptrdiff_t> idx(grid.dim()), mirror(grid.dim());
    for (std::size_t f = 0; f < grid.size(); ++f) {
        grid.unflat(f, idx);
        for (std::size_t a = 0; a < grid.dim(); ++a)
            mirror[a] = static_cast<std::ptrdiff_t>(grid.counts()[a]) - 1 - idx[a];
        values[f] = std::conj(g.at(mirror));
    }
    Box support = g.support();
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        support.lo[a] = -g.support().hi[a];
        support.hi[a] = -g.support().lo[a];
    }
    return SampledFunction(grid, std::move(support), std::move(values));
}

Box heis_inverse_box(const Box& b) {
    if (b.dim() % 2 == 0) throw DimensionMismatch("H_n box must have odd dimension");
    const std::size_t n = b.dim() / 2;
    Box r = b;
    double zlo = -b.hi[2 * n], zhi = -b.lo[2 * n];
    for (std::size_t i = 0; i < n; ++i) {
        r.lo[i] = -b.hi[i];
        r.hi[i] = -b.lo[i];
        r.lo[n + i] = -b.hi[n + i];
        r.hi[n + i] = -b.lo[n + i];
        const double c[4] = {b.lo[i] * b.lo[n + i], b.lo[i] * b.hi[n + i], b.hi[i] * b.lo[n + i],
                             b.hi[i] * b.hi[n + i]};
        zlo += *std::min_element(c, c + 4);
        zhi += *std::max_element(c, c + 4);
    }
    r.lo[2 * n] = zlo;
    r.hi[2 * n] = zhi;
    return r;
}

SampledFunction star_heis(const SampledFunction& g) {
    const GridSpec& grid = g.grid();
    if (grid.dim() % 2 == 0) throw DimensionMismatch("star_heis needs a grid on H_n");
    const std::size_t n = grid.dim() / 2;
    const std::size_t zaxis = 2 * n;
    for (std::size_t a = 0; a < zaxis; ++a)
        if (!symmetric_axis(grid, a)) throw PreconditionError("grid not inversion-symmetric");

    // Linear interpolation in z can reach one cell past the inverted box.
    const double hz = grid.spacing(zaxis);
    Box support = heis_inverse_box(g.support());
    support.lo[zaxis] -= hz;
    support.hi[zaxis] += hz;
    if (!grid.box().contains(support, 1e-9 * hz))
        throw PreconditionError("grid not inversion-symmetric: inverted support leaves the grid");

    std::vector<cplx> values(grid.size(), 0.0);
    const IndexBox out_nodes = grid.nodes_in(support);
    const auto nz = static_cast<std::ptrdiff_t>(grid.counts()[zaxis]);
    std::vector<std::ptrdiff_t> src(grid.dim());
    for (IndexIterator it(out_nodes); !it.done(); it.next()) {
        const auto& idx = it.index();
        double xy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xy += grid.coord(i, idx[i]) * grid.coord(n + i, idx[n + i]);
            src[i] = static_cast<std::ptrdiff_t>(grid.counts()[i]) - 1 - idx[i];
            src[n + i] = static_cast<std::ptrdiff_t>(grid.counts()[n + i]) - 1 - idx[n + i];
        }
        const double zeta = -grid.coord(zaxis, idx[zaxis]) + xy;
        const double u = (zeta - grid.lo()[zaxis]) / hz;
        const auto k0 = static_cast<std::ptrdiff_t>(std::floor(u));
        const double a = u - static_cast<double>(k0);
        cplx v = 0.0;
        if (k0 >= 0 && k0 < nz) {
            src[zaxis] = k0;
            v += (1.0 - a) * g.at(src);
        }
        if (k0 + 1 >= 0 && k0 + 1 < nz && a != 0.0) {
            src[zaxis] = k0 + 1;
            v += a * g.at(src);
        }
        values[grid.flat(idx)] = std::conj(v);
    }
    return SampledFunction(grid, std::move(support), std::move(values));
}

SampledFunction operator+(const SampledFunction& a, const SampledFunction& b) {
    require_same_grid(a, b);
    std::vector<cplx> v(a.values());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b[i];
    return SampledFunction(a.grid(), bounding_union(a.support(), b.support()), std::move(v));
}

SampledFunction operator-(const SampledFunction& a, const SampledFunction& b) {
    require_same_grid(a, b);
    std::vector<cplx> v(a.values());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b[i];
    return SampledFunction(a.grid(), bounding_union(a.support(), b.support()), std::move(v));
}

SampledFunction operator*(cplx s, const SampledFunction& a) {
    std::vector<cplx> v(a.values());
    for (auto& x : v) x *= s;
    return SampledFunction(a.grid(), a.support(), std::move(v));
}

SampledFunction conj(const SampledFunction& a) {
    std::vector<cplx> v(a.values());
    for (auto& x : v) x = std::conj(x);
    return SampledFunction(a.grid(), a.support(), std::move(v));
}

SampledFunction abs_squared(const SampledFunction& a) {
    std::vector<cplx> v(a.values());
    for (auto& x : v) x = std::norm(x);
    return SampledFunction(a.grid(), a.support(), std::move(v));
}

double max_abs_difference(const SampledFunction& a, const SampledFunction& b) {
    const GridSpec& ga = a.grid();
    const GridSpec& gb = b.grid();
    if (!ga.same_spacing(gb)) throw GridMismatch("grids differ in spacing");
    const std::size_t d = ga.dim();
    // Offset of b's first node in a's lattice.
    std::vector<std::ptrdiff_t> off(d);
    for (std::size_t ax = 0; ax < d; ++ax) {
        const double o = (gb.lo()[ax] - ga.lo()[ax]) / ga.spacing(ax);
        const double r = std::round(o);
        if (std::abs(o - r) > 1e-6) throw GridMismatch("grids are not on a common lattice");
        off[ax] = static_cast<std::ptrdiff_t>(r);
    }
    double m = 0.0;
    std::vector<std::ptrdiff_t> idx(d), jdx(d);
    for (std::size_t f = 0; f < ga.size(); ++f) {
        ga.unflat(f, idx);
        bool inside = true;
        for (std::size_t ax = 0; ax < d; ++ax) {
            jdx[ax] = idx[ax] - off[ax];
            inside = inside && jdx[ax] >= 0 && jdx[ax] < static_cast<std::ptrdiff_t>(gb.counts()[ax]);
        }
        const cplx bv = inside ? b.at(jdx) : cplx{};
        m = std::max(m, std::abs(a[f] - bv));
    }
    for (std::size_t f = 0; f < gb.size(); ++f) {
        gb.unflat(f, jdx);
        bool inside = true;
        for (std::size_t ax = 0; ax < d; ++ax) {
            idx[ax] = jdx[ax] + off[ax];
            inside = inside && idx[ax] >= 0 && idx[ax] < static_cast<std::ptrdiff_t>(ga.counts()[ax]);
        }
        if (!inside) m = std::max(m, std::abs(b[f]));
    }
    return m;
}

}  // namespace diffrep
