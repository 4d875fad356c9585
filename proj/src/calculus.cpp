#include "diffrep/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "diffrep/errors.hpp"

namespace diffrep::calculus {

namespace {

std::size_t z_axis(const SampledFunction& f) {
    if (f.dim() < 3 || f.dim() % 2 == 0) throw DimensionMismatch("expected a function on H_n");
    return f.dim() - 1;
}

// Grid of the (x, y) axes, on the same lattice as the input grid.
GridSpec xy_grid(const GridSpec& g) {
    const std::size_t d = g.dim() - 1;
    std::vector<double> origin(g.lo().begin(), g.lo().begin() + static_cast<std::ptrdiff_t>(d));
    std::vector<double> h(g.spacings().begin(), g.spacings().begin() + static_cast<std::ptrdiff_t>(d));
    std::vector<std::ptrdiff_t> first(d, 0);
    std::vector<std::size_t> counts(g.counts().begin(), g.counts().begin() + static_cast<std::ptrdiff_t>(d));
    return GridSpec::on_lattice(origin, h, first, counts);
}

Box xy_box(const Box& b) {
    return Box(std::vector<double>(b.lo.begin(), b.lo.end() - 1),
               std::vector<double>(b.hi.begin(), b.hi.end() - 1));
}

IndexBox xy_part(const IndexBox& b) {
    IndexBox r;
    r.lo.assign(b.lo.begin(), b.lo.end() - 1);
    r.hi.assign(b.hi.begin(), b.hi.end() - 1);
    return r;
}

// Fiberwise weighted sum over the support z-nodes: sum_k w_k zeta(z_k) f(., z_k).
template <class ZWeight>
SampledFunction fiber_sum(const SampledFunction& f, ZWeight zweight) {
    const std::size_t za = z_axis(f);
    const GridSpec& g = f.grid();
    GridSpec out_grid = xy_grid(g);
    std::vector<cplx> out(out_grid.size(), 0.0);
    const IndexBox nodes = f.support_nodes();
    if (!nodes.empty()) {
        const IndexBox xy = xy_part(nodes);
        const std::size_t nz = g.counts()[za];
        std::vector<double> wz(nz, 0.0);
        for (std::ptrdiff_t k = nodes.lo[za]; k <= nodes.hi[za]; ++k)
            wz[static_cast<std::size_t>(k)] = zweight(k);
        for (IndexIterator it(xy); !it.done(); it.next()) {
            const std::size_t col = out_grid.flat(it.index());
            cplx acc = 0.0;
            for (std::ptrdiff_t k = nodes.lo[za]; k <= nodes.hi[za]; ++k)
                acc += wz[static_cast<std::size_t>(k)] * f[col * nz + static_cast<std::size_t>(k)];
            out[col] = acc;
        }
    }
    return SampledFunction(std::move(out_grid), xy_box(f.support()), std::move(out));
}

double z_extent(const SampledFunction& f) {
    const std::size_t za = z_axis(f);
    const double e = f.support().hi[za] - f.support().lo[za];
    return e > 0.0 ? e : f.grid().spacing(za);
}

}  // namespace

SampledFunction op_T_1d(const SampledFunction& f, const KernelBox& box) {
    if (f.dim() != 1) throw DimensionMismatch("op_T_1d expects a function on R");
    if (!(box.a <= box.b)) throw PreconditionError("kernel box needs a <= b");
    const GridSpec& g = f.grid();
    const double h = g.spacing(0);
    const double tol = 1e-9 * h;
    if (f.support().lo[0] < box.a - tol || f.support().hi[0] > box.b + tol)
        throw PreconditionError("support escapes the kernel box [a, b]");
    if (g.lo()[0] > box.a + tol || g.hi()[0] < box.b - tol)
        throw PreconditionError("grid does not cover the kernel box [a, b]");

    const std::size_t n = g.counts()[0];
    std::vector<cplx> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);

    const double scale = kEpsS * f.max_abs() * (box.b - box.a > 0.0 ? box.b - box.a : h);
    Box support({box.a}, {g.hi()[0]});
    if (std::abs(out[n - 1]) <= scale) {
        // Zero integral: the antiderivative returns to zero at b.
        support = Box({box.a}, {box.b});
        const IndexBox in = g.nodes_in(support);
        for (std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(in.hi[0] + 1, 0)); i < n; ++i)
            out[i] = 0.0;
    }
    return SampledFunction(g, std::move(support), std::move(out));
}

SampledFunction op_S(const SampledFunction& f) {
    const std::size_t za = z_axis(f);
    const GridSpec& g = f.grid();
    return fiber_sum(f, [&](std::ptrdiff_t k) { return g.axis_weight(za, k); });
}

SampledFunction moment_profile(const SampledFunction& f, int k) {
    if (k < 0) throw PreconditionError("moment order must be nonnegative");
    const std::size_t za = z_axis(f);
    const GridSpec& g = f.grid();
    return fiber_sum(f, [&](std::ptrdiff_t i) {
        return g.axis_weight(za, i) * std::pow(g.coord(za, i), k);
    });
}

double s_zero_threshold(const SampledFunction& f) { return kEpsS * f.max_abs() * z_extent(f); }

bool s_is_zero(const SampledFunction& f, const SampledFunction& sf) {
    return sf.max_abs() <= s_zero_threshold(f);
}

SampledFunction op_T_heis(const SampledFunction& f) {
    const std::size_t za = z_axis(f);
    const SampledFunction sf = op_S(f);
    const double thr = s_zero_threshold(f);
    if (sf.max_abs() > thr) throw SNotZeroError(sf.max_abs(), thr);

    const GridSpec& g = f.grid();
    const double h = g.spacing(za);
    const std::size_t nz = g.counts()[za];
    std::vector<cplx> out(g.size(), 0.0);
    const IndexBox nodes = f.support_nodes();
    if (!nodes.empty()) {
        const GridSpec cols = xy_grid(g);
        const auto k0 = static_cast<std::size_t>(nodes.lo[za]);
        const auto k1 = static_cast<std::size_t>(nodes.hi[za]);
        for (IndexIterator it(xy_part(nodes)); !it.done(); it.next()) {
            const std::size_t base = cols.flat(it.index()) * nz;
            // Nodes below the support hold zeros, so the running sum starts at 0.
            cplx acc = 0.0;
            cplx prev = k0 > 0 ? f[base + k0 - 1] : cplx{};
            for (std::size_t k = k0; k <= k1; ++k) {
                const cplx cur = f[base + k];
                if (k > 0) acc += 0.5 * h * (prev + cur);
                out[base + k] = acc;
                prev = cur;
            }
        }
    }
    return SampledFunction(g, f.support(), std::move(out));
}

MinimalKResult minimal_k(const SampledFunction& f, int k_max) {
    z_axis(f);
    if (k_max < 0) throw PreconditionError("k_max must be nonnegative");
    if (f.max_abs() == 0.0) throw KMaxExceeded(k_max);
    MinimalKResult r;
    SampledFunction cur = f;
    for (int j = 0;; ++j) {
        SampledFunction sf = op_S(cur);
        r.s_norms.push_back(sf.max_abs());
        if (!s_is_zero(cur, sf)) {
            r.k = j;
            r.integral_value = integrate(sf);
            r.result = std::move(sf);
            return r;
        }
        if (j == k_max) throw KMaxExceeded(k_max);
        cur = op_T_heis(cur);
    }
}

WitnessReport nonvanishing_certificate(const SampledFunction& f, const SampledFunction& g,
                                       const CertificateOptions& options) {
    const MinimalKResult mf = minimal_k(f, options.k_max);
    const MinimalKResult mg = minimal_k(g, options.k_max);
    const SampledFunction c = conv_euclid(mf.result, mg.result, ConvMethod::Auto);

    const GridSpec& cg = c.grid();
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t i = 0; i < cg.size(); ++i) {
        const double a = std::abs(c[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }

    WitnessReport w;
    w.location = cg.node(best);
    w.value = c[best];
    w.threshold = kEpsZero * l2_norm(mf.result) * l2_norm(mg.result) * std::sqrt(cg.box().volume());
    w.grid_searched = cg;
    w.passed = std::abs(w.value) > w.threshold;
    w.diagnostics["k"] = mf.k;
    w.diagnostics["l"] = mg.k;
    w.diagnostics["s_norms_f"] = mf.s_norms;
    w.diagnostics["s_norms_g"] = mg.s_norms;
    w.diagnostics["max_abs_convolution"] = best_abs;

    if (options.verify_chain) {
        try {
            SampledFunction h = conv_heis(f, g, ConvMethod::Auto);
            for (int i = 0; i < mf.k + mg.k; ++i) h = op_T_heis(h);
            const double res = max_abs_difference(op_S(h), c);
            w.diagnostics["chain_residual"] = res;
            w.diagnostics["chain_relative_residual"] = best_abs > 0.0 ? res / best_abs : res;
        } catch (const SNotZeroError& e) {
            w.diagnostics["chain_error"] = e.what();
        }
    }
    return w;
}

}  // namespace diffrep::calculus
