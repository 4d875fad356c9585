#include "diffrep/inputs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "diffrep/errors.hpp"

namespace diffrep::inputs {

namespace {

cplx random_amplitude(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mod(0.5, 1.5);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    return std::polar(mod(rng), phase(rng));
}

double pow_int(double v, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= v;
    return r;
}

// Values of a bump sum on the nodes of one axis, as a function of that coordinate.
std::vector<double> sample_axis(const std::vector<Bump>& psi, const GridSpec& grid, std::size_t axis) {
    std::vector<double> out(grid.counts()[axis]);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double z = grid.coord(axis, static_cast<std::ptrdiff_t>(j));
        double acc = 0.0;
        for (const Bump& b : psi) acc += bump_value(b, std::span<const double>(&z, 1)).real();
        out[j] = acc;
    }
    return out;
}

Box clip_to(const Box& b, const GridSpec& g) {
    Box r = b;
    for (std::size_t a = 0; a < b.dim(); ++a) {
        r.lo[a] = std::max(b.lo[a], g.lo()[a]);
        r.hi[a] = std::min(b.hi[a], g.hi()[a]);
        if (r.lo[a] > r.hi[a]) throw PreconditionError("input support misses the grid");
    }
    return r;
}

// Separable phi(x, y) zeta(z) with the z profile given on the grid's z nodes.
SampledFunction separable(const GridSpec& grid, const std::vector<Bump>& phi, const std::vector<double>& zeta,
                          double zlo, double zhi) {
    const std::size_t d = grid.dim();
    if (d < 3 || d % 2 == 0) throw DimensionMismatch("expected an H_n grid");
    std::vector<double> lo(d), hi(d);
    for (std::size_t a = 0; a + 1 < d; ++a) {
        lo[a] = std::numeric_limits<double>::infinity();
        hi[a] = -lo[a];
        for (const Bump& b : phi) {
            lo[a] = std::min(lo[a], b.center[a] - b.radius);
            hi[a] = std::max(hi[a], b.center[a] + b.radius);
        }
    }
    lo[d - 1] = zlo;
    hi[d - 1] = zhi;
    const Box support = clip_to(Box(lo, hi), grid);
    std::vector<cplx> values(grid.size(), 0.0);
    std::vector<double> p(d - 1);
    const PointFunction f = bump_sum(phi);
    for (IndexIterator it(grid.nodes_in(support)); !it.done(); it.next()) {
        const auto& idx = it.index();
        const double zv = zeta[static_cast<std::size_t>(idx[d - 1])];
        if (zv == 0.0) continue;
        for (std::size_t a = 0; a + 1 < d; ++a) p[a] = grid.coord(a, idx[a]);
        values[grid.flat(idx)] = f(p) * zv;
    }
    return SampledFunction(grid, support, std::move(values));
}

}  // namespace

cplx bump_value(const Bump& b, std::span<const double> p) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < b.center.size(); ++i) {
        const double d = p[i] - b.center[i];
        r2 += d * d;
    }
    const double s = 1.0 - r2 / (b.radius * b.radius);
    return s > 0.0 ? b.amplitude * pow_int(s, b.power) : cplx{};
}

PointFunction bump_sum(std::vector<Bump> bumps) {
    return [bumps = std::move(bumps)](std::span<const double> p) {
        cplx acc = 0.0;
        for (const Bump& b : bumps) acc += bump_value(b, p);
        return acc;
    };
}

PointFunction gaussian(std::vector<double> center, double sigma, cplx amplitude) {
    return [center = std::move(center), sigma, amplitude](std::span<const double> p) {
        double r2 = 0.0;
        for (std::size_t i = 0; i < center.size(); ++i) r2 += (p[i] - center[i]) * (p[i] - center[i]);
        return amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
    };
}

std::vector<Bump> random_bumps_in_box(std::mt19937_64& rng, const Box& region, int count, int power) {
    double half = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < region.dim(); ++a) half = std::min(half, 0.5 * (region.hi[a] - region.lo[a]));
    std::uniform_real_distribution<double> frac(0.35, 0.6);
    std::vector<Bump> out;
    for (int k = 0; k < count; ++k) {
        Bump b;
        b.radius = frac(rng) * half;
        b.power = power;
        for (std::size_t a = 0; a < region.dim(); ++a) {
            std::uniform_real_distribution<double> c(region.lo[a] + b.radius, region.hi[a] - b.radius);
            b.center.push_back(c(rng));
        }
        b.amplitude = random_amplitude(rng);
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<Bump> random_bumps_in_ball(std::mt19937_64& rng, std::size_t dim, double R, int count, int power) {
    std::uniform_real_distribution<double> frac(0.3, 0.5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Bump> out;
    for (int k = 0; k < count; ++k) {
        Bump b;
        b.radius = frac(rng) * R;
        b.power = power;
        const double room = R - b.radius;
        std::vector<double> c(dim);
        for (;;) {
            double s = 0.0;
            for (auto& v : c) {
                v = unit(rng);
                s += v * v;
            }
            if (s <= 1.0) break;
        }
        for (auto& v : c) v *= room;
        b.center = std::move(c);
        b.amplitude = random_amplitude(rng);
        out.push_back(std::move(b));
    }
    return out;
}

SampledFunction sample_bumps(const std::vector<Bump>& bumps, const GridSpec& grid, const Box& support) {
    return sample(bump_sum(bumps), grid, clip_to(support, grid));
}

SampledFunction planted_order(const GridSpec& grid, const std::vector<Bump>& phi, const std::vector<Bump>& psi,
                              int m) {
    if (m < 0) throw PreconditionError("planted order must be nonnegative");
    const std::size_t d = grid.dim();
    const std::size_t zaxis = d - 1;
    const double h = grid.spacing(zaxis);
    std::vector<double> zeta = sample_axis(psi, grid, zaxis);
    for (int k = 0; k < m; ++k) {
        std::vector<double> next(zeta.size(), 0.0);
        for (std::size_t j = 1; j + 1 < zeta.size(); ++j) next[j] = (zeta[j + 1] - zeta[j - 1]) / (2.0 * h);
        if (zeta.front() != 0.0 || zeta.back() != 0.0) throw PreconditionError("z profile touches the grid edge");
        zeta.swap(next);
    }
    double zlo = std::numeric_limits<double>::infinity(), zhi = -zlo;
    for (const Bump& b : psi) {
        zlo = std::min(zlo, b.center[0] - b.radius);
        zhi = std::max(zhi, b.center[0] + b.radius);
    }
    const double pad = static_cast<double>(m) * h;
    return separable(grid, phi, zeta, zlo - pad, zhi + pad);
}

SampledFunction random_planted(std::mt19937_64& rng, const GridSpec& grid, const Box& region, int m, int terms) {
    const std::size_t d = grid.dim();
    Box xy(std::vector<double>(region.lo.begin(), region.lo.end() - 1),
           std::vector<double>(region.hi.begin(), region.hi.end() - 1));
    const double pad = static_cast<double>(m + 1) * grid.spacing(d - 1);
    Box z({region.lo[d - 1] + pad}, {region.hi[d - 1] - pad});
    if (!(z.lo[0] < z.hi[0])) throw PreconditionError("region too thin for the planted order");
    std::vector<Bump> phi = random_bumps_in_box(rng, xy, terms);
    std::vector<Bump> psi = random_bumps_in_box(rng, z, terms);
    // Real z profile keeps D^m psi real; the phase lives in phi.
    for (auto& b : psi) b.amplitude = std::abs(b.amplitude);
    return planted_order(grid, phi, psi, m);
}

SampledFunction z_odd_product(const GridSpec& grid, const std::vector<Bump>& phi, double rz, int power) {
    const std::size_t zaxis = grid.dim() - 1;
    std::vector<double> zeta(grid.counts()[zaxis]);
    for (std::size_t j = 0; j < zeta.size(); ++j) {
        const double z = grid.coord(zaxis, static_cast<std::ptrdiff_t>(j));
        const double s = 1.0 - z * z / (rz * rz);
        zeta[j] = s > 0.0 ? z * pow_int(s, power) : 0.0;
    }
    return separable(grid, phi, zeta, -rz, rz);
}

Bump off_center_bump(std::size_t dim, double a) {
    Bump b;
    b.center.assign(dim, 0.0);
    b.center[0] = 0.4 * a;
    b.radius = 0.5 * a;
    return b;
}

}  // namespace diffrep::inputs
