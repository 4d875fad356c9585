#include "diffrep/representations.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "diffrep/errors.hpp"

namespace diffrep::rep {

namespace {

double determinant(const std::vector<double>& J, std::size_t d) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
        J.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    return M.determinant();
}

double distance_to_box(const Box& b) {
    double s = 0.0;
    for (std::size_t a = 0; a < b.dim(); ++a) {
        const double c = std::clamp(0.0, b.lo[a], b.hi[a]);
        s += c * c;
    }
    return std::sqrt(s);
}

std::optional<Box> clip(const Box& b, const GridSpec& g) {
    Box r = b;
    for (std::size_t a = 0; a < b.dim(); ++a) {
        r.lo[a] = std::max(b.lo[a], g.lo()[a]);
        r.hi[a] = std::min(b.hi[a], g.hi()[a]);
        if (r.lo[a] > r.hi[a]) return std::nullopt;
    }
    return r;
}

// Unpadded bounding box of the forward image of the support box boundary.
Box sampled_image(const flow::FlowMap& map, const Box& b) {
    const std::size_t d = b.dim();
    const double budget = 6000.0 / static_cast<double>(2 * d);
    const auto k = d == 1 ? std::size_t{1}
                          : std::max<std::size_t>(5, static_cast<std::size_t>(std::pow(budget, 1.0 / static_cast<double>(d - 1))));
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    std::vector<double> p(d);
    for (std::size_t face = 0; face < d; ++face)
        for (int side = 0; side < 2; ++side) {
            IndexBox ib;
            for (std::size_t a = 0; a < d; ++a) {
                ib.lo.push_back(0);
                ib.hi.push_back(a == face ? 0 : static_cast<std::ptrdiff_t>(k) - 1);
            }
            for (IndexIterator it(ib); !it.done(); it.next()) {
                for (std::size_t a = 0; a < d; ++a) {
                    if (a == face) {
                        p[a] = side ? b.hi[a] : b.lo[a];
                    } else {
                        const double s = static_cast<double>(it.index()[a]) / static_cast<double>(k - 1);
                        p[a] = b.lo[a] + s * (b.hi[a] - b.lo[a]);
                    }
                }
                const std::vector<double> q = map.apply(p);
                for (std::size_t a = 0; a < d; ++a) {
                    lo[a] = std::min(lo[a], q[a]);
                    hi[a] = std::max(hi[a], q[a]);
                }
            }
        }
    return Box(lo, hi);
}

Box pad_image(const Box& img, const GridSpec& g) {
    Box r = img;
    for (std::size_t a = 0; a < img.dim(); ++a) {
        const double pad = 0.05 * (img.hi[a] - img.lo[a]) + 2.0 * g.spacing(a);
        r.lo[a] -= pad;
        r.hi[a] += pad;
    }
    return r;
}

// Support of the multilinear interpolant: nonzero nodes plus one cell, inside
// the declared box.
Box effective_support(const SampledFunction& f) {
    const std::optional<Box> e = f.exact_support();
    if (!e) return f.support();
    Box r = *e;
    for (std::size_t a = 0; a < r.dim(); ++a) {
        r.lo[a] = std::max(r.lo[a] - f.grid().spacing(a), f.support().lo[a]);
        r.hi[a] = std::min(r.hi[a] + f.grid().spacing(a), f.support().hi[a]);
    }
    return r;
}

}  // namespace

double RepresentationParams::density_at(std::span<const double> p) const {
    if (!density) return 1.0;
    const double v = density->value(p);
    if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError("density not positive at a sampled point");
    return v;
}

cplx rn_power(double w, double theta) {
    if (!(w > 0.0) || !std::isfinite(w)) throw PreconditionError("Radon-Nikodym factor must be positive and finite");
    return std::exp(cplx(0.5, theta) * std::log(w));
}

double rn_derivative(const flow::FlowMap& map, const RepresentationParams& params, std::span<const double> p) {
    std::vector<double> J;
    const std::vector<double> q = map.inverse().apply(p, J);
    const double det = determinant(J, p.size());
    if (!std::isfinite(det)) throw FlowEscape("non-finite Jacobian determinant");
    return params.density_at(q) * std::abs(det) / params.density_at(p);
}

Pullback make_pullback(const GridSpec& grid, const Box& region, const RepresentationParams& params,
                       const flow::FlowMap& map) {
    if (static_cast<int>(grid.dim()) != map.dim()) throw DimensionMismatch("grid/map dimension mismatch");
    Pullback pb;
    pb.grid = grid;
    pb.region = region;
    const std::optional<Box> r = clip(region, grid);
    if (!r) return pb;
    pb.region = *r;
    const std::size_t d = grid.dim();
    const flow::FlowMap inv = map.inverse();
    const IndexBox nodes = grid.nodes_in(*r);
    std::vector<double> p(d), J;
    pb.nodes.reserve(nodes.count());
    pb.preimages.reserve(nodes.count() * d);
    pb.rn.reserve(nodes.count());
    for (IndexIterator it(nodes); !it.done(); it.next()) {
        for (std::size_t a = 0; a < d; ++a) p[a] = grid.coord(a, it.index()[a]);
        pb.nodes.push_back(grid.flat(it.index()));
        if (map.is_identity()) {
            pb.preimages.insert(pb.preimages.end(), p.begin(), p.end());
            pb.rn.push_back(1.0);
            continue;
        }
        const std::vector<double> q = inv.apply(p, J);
        const double det = determinant(J, d);
        if (!std::isfinite(det)) throw FlowEscape("non-finite Jacobian determinant");
        pb.preimages.insert(pb.preimages.end(), q.begin(), q.end());
        const double rho_q = params.density ? params.density_at(q) : 1.0;
        const double rho_p = params.density ? params.density_at(p) : 1.0;
        pb.rn.push_back(rho_q * std::abs(det) / rho_p);
    }
    return pb;
}

SampledFunction apply_pullback(const Pullback& pb, const SampledFunction& f, double theta) {
    const std::size_t d = pb.grid.dim();
    if (f.dim() != d) throw DimensionMismatch("function/grid dimension mismatch");
    std::vector<cplx> values(pb.grid.size(), 0.0);
    for (std::size_t i = 0; i < pb.nodes.size(); ++i) {
        const cplx v = f.evaluate(std::span<const double>(&pb.preimages[i * d], d));
        if (v == cplx{}) continue;
        values[pb.nodes[i]] = pb.rn[i] == 1.0 ? v : v * rn_power(pb.rn[i], theta);
    }
    return SampledFunction(pb.grid, pb.nodes.empty() ? pb.grid.box() : pb.region, std::move(values));
}

SampledFunction apply_rep_on(const GridSpec& grid, const Box& region, const RepresentationParams& params,
                             const flow::FlowMap& map, const SampledFunction& f) {
    return apply_pullback(make_pullback(grid, region, params, map), f, params.theta);
}

Box image_box(const flow::FlowMap& map, const SampledFunction& f) {
    const Box s = effective_support(f);
    if (map.is_identity() || distance_to_box(s) >= map.moving_radius()) return s;
    return pad_image(sampled_image(map, s), f.grid());
}

SampledFunction apply_rep(const RepresentationParams& params, const flow::FlowMap& map, const SampledFunction& f) {
    const Box s = effective_support(f);
    Box region = s;
    if (!map.is_identity() && distance_to_box(s) < map.moving_radius()) {
        const Box img = sampled_image(map, s);
        const double tol = 1e-9 * f.grid().spacing(0);
        if (!f.grid().box().contains(img, tol)) throw PreconditionError("support escapes grid under the map");
        region = pad_image(img, f.grid());
    }
    return apply_rep_on(f.grid(), region, params, map, f);
}

SampledFunction intertwiner(const RepresentationParams& params, const fields::ScalarField& ratio,
                            const SampledFunction& f) {
    if (ratio.dim() != static_cast<int>(f.dim())) throw DimensionMismatch("ratio/function dimension mismatch");
    const GridSpec& g = f.grid();
    std::vector<cplx> values(g.size(), 0.0);
    std::vector<double> p(g.dim());
    for (IndexIterator it(f.support_nodes()); !it.done(); it.next()) {
        const std::size_t flat = g.flat(it.index());
        if (f[flat] == cplx{}) continue;
        for (std::size_t a = 0; a < g.dim(); ++a) p[a] = g.coord(a, it.index()[a]);
        const double r = ratio.value(p);
        if (!(r > 0.0)) throw PreconditionError("density ratio not positive on the support");
        values[flat] = f[flat] * rn_power(r, params.theta);
    }
    return SampledFunction(g, f.support(), std::move(values));
}

cplx weighted_inner_product(const RepresentationParams& params, const SampledFunction& f, const SampledFunction& g) {
    if (!params.density) return inner_product(f, g);
    if (!(f.grid() == g.grid())) throw GridMismatch("functions live on different grids");
    if (!f.support().intersects(g.support())) return 0.0;
    const GridSpec& grid = f.grid();
    std::vector<double> p(grid.dim());
    cplx acc = 0.0;
    for (IndexIterator it(grid.nodes_in(intersection(f.support(), g.support()))); !it.done(); it.next()) {
        const std::size_t flat = grid.flat(it.index());
        if (f[flat] == cplx{} || g[flat] == cplx{}) continue;
        for (std::size_t a = 0; a < grid.dim(); ++a) p[a] = grid.coord(a, it.index()[a]);
        acc += grid.weight(it.index()) * params.density_at(p) * f[flat] * std::conj(g[flat]);
    }
    return acc;
}

double weighted_l2_norm(const RepresentationParams& params, const SampledFunction& f) {
    return std::sqrt(std::max(0.0, weighted_inner_product(params, f, f).real()));
}

cplx matrix_coefficient(const RepresentationParams& params, const SampledFunction& f, const SampledFunction& g,
                        const flow::FlowMap& map) {
    if (f.dim() != g.dim()) throw DimensionMismatch("matrix coefficient operands differ in dimension");
    const SampledFunction pg = apply_rep_on(f.grid(), f.support(), params, map, g);
    return weighted_inner_product(params, f, pg);
}

double witness_threshold(double norm_f, double norm_g, double volume) {
    return kEpsZero * norm_f * norm_g * std::sqrt(volume);
}

SmallSupportResult small_support_reduce(const SampledFunction& g, const flow::FlowMap& map) {
    const SampledFunction moved = apply_rep(RepresentationParams{}, map, g);
    SmallSupportResult r{g - moved, false};
    r.nonzero = numerically_nonzero(r.difference, g.max_abs());
    return r;
}

std::vector<ShrinkRow> dilation_shrink(const RepresentationParams& params, const SampledFunction& f,
                                       const Box& V_box, const std::vector<double>& times,
                                       const ShrinkOptions& options) {
    const std::size_t d = f.dim();
    if (d < 3 || d % 2 == 0) throw DimensionMismatch("dilation_shrink expects a function on H_n");
    if (V_box.dim() != d) throw DimensionMismatch("V box dimension mismatch");
    if (!V_box.contains(std::vector<double>(d, 0.0))) throw PreconditionError("V must contain the identity");
    const int n = static_cast<int>(d / 2);
    const double r1 = options.r1 > 0.0 ? options.r1 : 1.05 * V_box.max_norm();
    const double r2 = options.r2 > 0.0 ? options.r2 : 2.0 * r1;
    if (r1 < V_box.max_norm()) throw PreconditionError("bump plateau must contain V");

    const expr::VarContext ctx{n, true};
    expr::Expr gen = expr::mul(expr::constant(2.0), expr::var(2 * n));
    for (int i = 0; i < n; ++i) gen = expr::sub(gen, expr::mul(expr::var(i), expr::var(n + i)));
    auto field = std::make_shared<fields::VectorField>(
        fields::contact_field(fields::ScalarField(expr::mul(gen, expr::bump(r1, r2, static_cast<int>(d))), ctx)));

    const GridSpec vgrid(V_box.lo, V_box.hi, std::vector<std::size_t>(d, options.lhs_counts));
    std::vector<ShrinkRow> rows;
    for (double t : times) {
        ShrinkRow row;
        row.t = t;
        const flow::FlowMap psi = t == 0.0 ? flow::FlowMap::identity(static_cast<int>(d))
                                           : flow::FlowMap(field, t, options.step);
        const SampledFunction pf = apply_rep_on(vgrid, V_box, params, psi, f);
        row.lhs = weighted_l2_norm(params, pf);
        row.lhs *= row.lhs;

        Box S = V_box;
        for (std::size_t a = 0; a < d; ++a) {
            const double s = std::exp(-(a == d - 1 ? 2.0 : 1.0) * t);
            S.lo[a] = V_box.lo[a] * s;
            S.hi[a] = V_box.hi[a] * s;
        }
        row.shrunken_box = S;
        const GridSpec sgrid(S.lo, S.hi, std::vector<std::size_t>(d, options.rhs_counts));
        double acc = 0.0;
        std::vector<double> p(d);
        for (IndexIterator it(sgrid.all_nodes()); !it.done(); it.next()) {
            for (std::size_t a = 0; a < d; ++a) p[a] = sgrid.coord(a, it.index()[a]);
            const double v = std::norm(f.evaluate(p));
            if (v != 0.0) acc += sgrid.weight(it.index()) * v * params.density_at(p);
        }
        row.rhs = acc;
        const double scale = std::max(std::abs(row.lhs), std::abs(row.rhs));
        row.relative_difference = scale > 0.0 ? std::abs(row.lhs - row.rhs) / scale : 0.0;
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json to_json(const ShrinkRow& row) {
    nlohmann::json j;
    j["t"] = row.t;
    j["lhs"] = row.lhs;
    j["rhs"] = row.rhs;
    j["relative_difference"] = row.relative_difference;
    j["shrunken_box"] = {{"lo", row.shrunken_box.lo}, {"hi", row.shrunken_box.hi}};
    return j;
}

}  // namespace diffrep::rep
