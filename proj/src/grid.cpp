#include "diffrep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diffrep/errors.hpp"

namespace diffrep {

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw DimensionMismatch("box corners of different dimension");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
            throw PreconditionError("box corner not finite");
        if (lo[i] > hi[i]) throw PreconditionError("box has lo > hi on axis " + std::to_string(i));
    }
}

Box Box::cube(std::size_t dim, double half_width) {
    return Box(std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width));
}

Box Box::symmetric(std::span<const double> half_widths) {
    std::vector<double> lo(half_widths.size()), hi(half_widths.size());
    for (std::size_t i = 0; i < half_widths.size(); ++i) {
        lo[i] = -half_widths[i];
        hi[i] = half_widths[i];
    }
    return Box(std::move(lo), std::move(hi));
}

bool Box::contains(std::span<const double> p, double tol) const {
    if (p.size() != dim()) throw DimensionMismatch("point/box dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i)
        if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
    return true;
}

bool Box::contains(const Box& other, double tol) const {
    if (other.dim() != dim()) throw DimensionMismatch("box dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i)
        if (other.lo[i] < lo[i] - tol || other.hi[i] > hi[i] + tol) return false;
    return true;
}

bool Box::intersects(const Box& other) const {
    for (std::size_t i = 0; i < dim(); ++i)
        if (other.hi[i] < lo[i] || other.lo[i] > hi[i]) return false;
    return true;
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
    return v;
}

double Box::max_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double m = std::max(std::abs(lo[i]), std::abs(hi[i]));
        s += m * m;
    }
    return std::sqrt(s);
}

double Box::inner_radius() const {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dim(); ++i) r = std::min({r, -lo[i], hi[i]});
    return r;
}

Box Box::padded(double amount) const {
    Box b = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
        b.lo[i] -= amount;
        b.hi[i] += amount;
    }
    return b;
}

Box Box::padded_relative(double fraction) const {
    Box b = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double w = (hi[i] - lo[i]) * fraction;
        b.lo[i] -= w;
        b.hi[i] += w;
    }
    return b;
}

std::vector<std::vector<double>> Box::corners() const {
    const std::size_t d = dim();
    std::vector<std::vector<double>> out;
    out.reserve(std::size_t{1} << d);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        std::vector<double> c(d);
        for (std::size_t i = 0; i < d; ++i) c[i] = (mask >> i) & 1U ? hi[i] : lo[i];
        out.push_back(std::move(c));
    }
    return out;
}

Box bounding_union(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("box dimension mismatch");
    Box r = a;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        r.lo[i] = std::min(a.lo[i], b.lo[i]);
        r.hi[i] = std::max(a.hi[i], b.hi[i]);
    }
    return r;
}

Box intersection(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("box dimension mismatch");
    std::vector<double> lo(a.dim()), hi(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        lo[i] = std::max(a.lo[i], b.lo[i]);
        hi[i] = std::min(a.hi[i], b.hi[i]);
        if (lo[i] > hi[i]) throw PreconditionError("boxes do not intersect");
    }
    return Box(std::move(lo), std::move(hi));
}

Box minkowski_sum(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("box dimension mismatch");
    std::vector<double> lo(a.dim()), hi(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        lo[i] = a.lo[i] + b.lo[i];
        hi[i] = a.hi[i] + b.hi[i];
    }
    return Box(std::move(lo), std::move(hi));
}

bool IndexBox::empty() const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (hi[i] < lo[i]) return true;
    return lo.empty();
}

std::size_t IndexBox::count() const {
    if (empty()) return 0;
    std::size_t c = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) c *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
    return c;
}

GridSpec::GridSpec(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> counts)
    : lo_(std::move(lo)), hi_(std::move(hi)), counts_(std::move(counts)) {
    if (lo_.empty() || lo_.size() != hi_.size() || lo_.size() != counts_.size())
        throw DimensionMismatch("grid corner/count dimension mismatch");
    h_.resize(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        if (counts_[a] < 2) throw PreconditionError("grid needs at least 2 nodes per axis");
        if (!(lo_[a] < hi_[a])) throw PreconditionError("grid needs lo < hi on every axis");
        h_[a] = (hi_[a] - lo_[a]) / static_cast<double>(counts_[a] - 1);
    }
    strides_.assign(dim(), 1);
    for (std::size_t a = dim() - 1; a-- > 0;) strides_[a] = strides_[a + 1] * counts_[a + 1];
    size_ = strides_[0] * counts_[0];
}

GridSpec GridSpec::cube(std::size_t dim, double half_width, std::size_t count) {
    return GridSpec(std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width),
                    std::vector<std::size_t>(dim, count));
}

GridSpec GridSpec::on_lattice(std::span<const double> origin, std::span<const double> h,
                              std::span<const std::ptrdiff_t> first,
                              std::span<const std::size_t> counts) {
    const std::size_t d = origin.size();
    std::vector<double> lo(d), hi(d);
    for (std::size_t a = 0; a < d; ++a) {
        lo[a] = origin[a] + static_cast<double>(first[a]) * h[a];
        hi[a] = origin[a] + static_cast<double>(first[a] + static_cast<std::ptrdiff_t>(counts[a]) - 1) * h[a];
    }
    GridSpec g(std::move(lo), std::move(hi), std::vector<std::size_t>(counts.begin(), counts.end()));
    g.h_.assign(h.begin(), h.end());  // keep the exact lattice spacing
    return g;
}

std::size_t GridSpec::flat(std::span<const std::ptrdiff_t> idx) const {
    std::size_t f = 0;
    for (std::size_t a = 0; a < dim(); ++a) f += static_cast<std::size_t>(idx[a]) * strides_[a];
    return f;
}

void GridSpec::unflat(std::size_t flat, std::span<std::ptrdiff_t> idx) const {
    for (std::size_t a = 0; a < dim(); ++a) {
        idx[a] = static_cast<std::ptrdiff_t>(flat / strides_[a]);
        flat %= strides_[a];
    }
}

void GridSpec::node(std::size_t flat, std::span<double> point) const {
    for (std::size_t a = 0; a < dim(); ++a) {
        const auto i = static_cast<std::ptrdiff_t>(flat / strides_[a]);
        flat %= strides_[a];
        point[a] = coord(a, i);
    }
}

std::vector<double> GridSpec::node(std::size_t flat) const {
    std::vector<double> p(dim());
    node(flat, p);
    return p;
}

double GridSpec::axis_weight(std::size_t axis, std::ptrdiff_t i) const {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(counts_[axis])) return 0.0;
    if (i == 0 || i == static_cast<std::ptrdiff_t>(counts_[axis]) - 1) return 0.5 * h_[axis];
    return h_[axis];
}

double GridSpec::weight(std::span<const std::ptrdiff_t> idx) const {
    double w = 1.0;
    for (std::size_t a = 0; a < dim(); ++a) w *= axis_weight(a, idx[a]);
    return w;
}

IndexBox GridSpec::nodes_in(const Box& b) const {
    if (b.dim() != dim()) throw DimensionMismatch("box/grid dimension mismatch");
    IndexBox r;
    r.lo.resize(dim());
    r.hi.resize(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        const double lo_f = (b.lo[a] - lo_[a]) / h_[a];
        const double hi_f = (b.hi[a] - lo_[a]) / h_[a];
        auto ilo = static_cast<std::ptrdiff_t>(std::ceil(lo_f - 1e-9));
        auto ihi = static_cast<std::ptrdiff_t>(std::floor(hi_f + 1e-9));
        ilo = std::max<std::ptrdiff_t>(ilo, 0);
        ihi = std::min<std::ptrdiff_t>(ihi, static_cast<std::ptrdiff_t>(counts_[a]) - 1);
        r.lo[a] = ilo;
        r.hi[a] = ihi;
    }
    return r;
}

IndexBox GridSpec::all_nodes() const {
    IndexBox r;
    r.lo.assign(dim(), 0);
    r.hi.resize(dim());
    for (std::size_t a = 0; a < dim(); ++a) r.hi[a] = static_cast<std::ptrdiff_t>(counts_[a]) - 1;
    return r;
}

bool GridSpec::same_spacing(const GridSpec& other, double rel_tol) const {
    if (other.dim() != dim()) return false;
    for (std::size_t a = 0; a < dim(); ++a)
        if (std::abs(h_[a] - other.h_[a]) > rel_tol * std::max(h_[a], other.h_[a])) return false;
    return true;
}

bool GridSpec::operator==(const GridSpec& other) const {
    if (other.dim() != dim() || other.counts_ != counts_) return false;
    for (std::size_t a = 0; a < dim(); ++a) {
        const double tol = 1e-9 * h_[a];
        if (std::abs(lo_[a] - other.lo_[a]) > tol || std::abs(hi_[a] - other.hi_[a]) > tol)
            return false;
    }
    return true;
}

IndexIterator::IndexIterator(const IndexBox& box) : box_(box), idx_(box.lo), done_(box.empty()) {}

void IndexIterator::next() {
    for (std::size_t a = idx_.size(); a-- > 0;) {
        if (idx_[a] < box_.hi[a]) {
            ++idx_[a];
            return;
        }
        idx_[a] = box_.lo[a];
    }
    done_ = true;
}

}  // namespace diffrep
