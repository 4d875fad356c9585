#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "diffrep/errors.hpp"
#include "diffrep/flow.hpp"

namespace diffrep::flow {

using geometry::GroupPoint;
using geometry::LieVector;

namespace {

double norm2(std::span<const double> p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

// log g lies in the box W of Lie algebra coordinates.
bool log_in(const Box& W, const GroupPoint& g) {
    const std::vector<double> c = geometry::log_map(g).coords();
    return W.contains(c, 1e-12 * (1.0 + W.max_norm()));
}

}  // namespace

FlowMap translation_symplecto(std::span<const double> x, double r, double R_outer, double step) {
    if (x.empty() || x.size() % 2 != 0) throw DimensionMismatch("translation vector must have even length");
    if (!(r > 0.0)) throw PreconditionError("r must be positive");
    if (!(norm2(x) < 2.0 * r)) throw PreconditionError("translation needs |x| < 2r");
    if (!(3.0 * r < R_outer)) throw PreconditionError("translation needs 3r < R_outer");
    const int n = static_cast<int>(x.size() / 2);
    const expr::VarContext ctx{n, false};
    // X_f = (c, d) for f = c.y - d.x.
    expr::Expr f = expr::constant(0.0);
    for (int i = 0; i < n; ++i) {
        f = expr::add(f, expr::mul(expr::constant(x[static_cast<std::size_t>(i)]), expr::var(n + i)));
        f = expr::sub(f, expr::mul(expr::constant(x[static_cast<std::size_t>(n + i)]), expr::var(i)));
    }
    const expr::Expr fh = expr::mul(f, expr::bump(3.0 * r, R_outer, 2 * n));
    auto field = std::make_shared<fields::VectorField>(fields::hamiltonian_field(fields::ScalarField(fh, ctx)));
    return FlowMap(std::move(field), 1.0, step);
}

ContactTranslationInfo check_contact_configuration(const GroupPoint& x, const ContactTranslationConfig& cfg) {
    const std::size_t n = x.n();
    const std::size_t d = 2 * n + 1;
    if (n == 0) throw DimensionMismatch("H_n needs n >= 1");
    if (cfg.W_box.dim() != d || cfg.outer_box.dim() != d)
        throw DimensionMismatch("W and outer boxes must have dimension 2n+1");
    if (!(cfg.V_radius > 0.0)) throw PreconditionError("inclusion 0 in V fails: V radius must be positive");
    if (!cfg.W_box.contains(std::vector<double>(d, 0.0)))
        throw PreconditionError("inclusion 0 in W fails");

    const Box V = Box::cube(d, cfg.V_radius);
    const auto corners = V.corners();
    for (const auto& a : corners)
        for (const auto& b : corners)
            if (!log_in(cfg.W_box, geometry::group_mul(GroupPoint::from_coords(a), GroupPoint::from_coords(b))))
                throw PreconditionError("inclusion V V in exp[W] fails at a corner pair");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(-cfg.V_radius, cfg.V_radius);
    std::vector<double> a(d), b(d);
    for (int k = 0; k < cfg.random_checks; ++k) {
        for (auto& v : a) v = U(rng);
        for (auto& v : b) v = U(rng);
        if (!log_in(cfg.W_box, geometry::group_mul(GroupPoint::from_coords(a), GroupPoint::from_coords(b))))
            throw PreconditionError("inclusion V V in exp[W] fails at a sampled pair");
    }
    if (!log_in(cfg.W_box, x)) throw PreconditionError("x is not exp(v) for v in W");

    // V exp[W] is multilinear in the corner coordinates, so corners bound it.
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    // Both signs of w, so the inverse map also acts as a translation on V.
    for (const auto& u : corners)
        for (const auto& w0 : cfg.W_box.corners())
            for (double sign : {1.0, -1.0}) {
                std::vector<double> w = w0;
                for (double& c : w) c *= sign;
                const GroupPoint p =
                    geometry::group_mul(GroupPoint::from_coords(u), geometry::exp_map(LieVector::from_coords(w)));
                const std::vector<double> c = p.coords();
                for (std::size_t i = 0; i < d; ++i) {
                    lo[i] = std::min(lo[i], c[i]);
                    hi[i] = std::max(hi[i], c[i]);
                }
            }
    ContactTranslationInfo info{Box(lo, hi), 0.0, 0.0};
    info.plateau_radius = info.plateau_box.max_norm();
    info.outer_radius = cfg.outer_box.inner_radius();
    if (!(info.plateau_radius < info.outer_radius))
        throw PreconditionError("inclusion V exp[W] in outer box fails: plateau radius " +
                                std::to_string(info.plateau_radius) + " >= outer radius " +
                                std::to_string(info.outer_radius));
    return info;
}

FlowMap translation_contacto(const GroupPoint& x, const ContactTranslationConfig& cfg) {
    const ContactTranslationInfo info = check_contact_configuration(x, cfg);
    const int n = static_cast<int>(x.n());
    const expr::VarContext ctx{n, true};
    const LieVector v = geometry::log_map(x);
    // alpha0 of the left-invariant field of v: c + b.x - a.y.
    expr::Expr g = expr::constant(v.c);
    for (int i = 0; i < n; ++i) {
        g = expr::add(g, expr::mul(expr::constant(v.b[static_cast<std::size_t>(i)]), expr::var(i)));
        g = expr::sub(g, expr::mul(expr::constant(v.a[static_cast<std::size_t>(i)]), expr::var(n + i)));
    }
    const expr::Expr f = expr::mul(expr::bump(info.plateau_radius, info.outer_radius, 2 * n + 1), g);
    auto field = std::make_shared<fields::VectorField>(fields::contact_field(fields::ScalarField(f, ctx)));
    return FlowMap(std::move(field), 1.0, cfg.step);
}

}  // namespace diffrep::flow
