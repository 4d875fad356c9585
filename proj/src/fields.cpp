#include "diffrep/fields.hpp"

#include <algorithm>

#include "diffrep/errors.hpp"

namespace diffrep::fields {

namespace {

void require_vars(const Expr& e, const VarContext& ctx) {
    if (expr::max_var(e) >= ctx.dim()) throw DimensionMismatch("expression uses coordinates outside its context");
}

}  // namespace

ScalarField::ScalarField(Expr f, VarContext ctx) : f_(std::move(f)), ctx_(ctx) {
    require_vars(f_, ctx_);
    const int d = ctx_.dim();
    std::vector<Expr> flat_hess;
    for (int i = 0; i < d; ++i) grad_.push_back(expr::diff(f_, i));
    hess_.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            // Mixed partials are taken in a fixed order so that H is symmetric by construction.
            Expr h = j < i ? hess_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]
                           : expr::diff(grad_[static_cast<std::size_t>(i)], j);
            hess_[static_cast<std::size_t>(i)].push_back(h);
            flat_hess.push_back(h);
        }
    value_prog_ = expr::Program({f_});
    grad_prog_ = expr::Program(grad_);
    hess_prog_ = expr::Program(flat_hess);
}

ScalarField ScalarField::parse(const std::string& source, VarContext ctx) {
    return ScalarField(expr::parse(source, ctx), ctx);
}

double ScalarField::value(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) throw DimensionMismatch("point dimension mismatch");
    double v;
    value_prog_.run(p, std::span<double>(&v, 1));
    return v;
}

std::vector<double> ScalarField::gradient(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) throw DimensionMismatch("point dimension mismatch");
    std::vector<double> g(static_cast<std::size_t>(dim()));
    grad_prog_.run(p, g);
    return g;
}

std::vector<double> ScalarField::hessian(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) throw DimensionMismatch("point dimension mismatch");
    std::vector<double> h(static_cast<std::size_t>(dim() * dim()));
    hess_prog_.run(p, h);
    return h;
}

VectorField::VectorField(FieldKind kind, VarContext ctx, std::vector<Expr> components,
                         std::optional<ScalarField> generator)
    : kind_(kind), ctx_(ctx), dim_(ctx.dim()), comps_(std::move(components)), gen_(std::move(generator)) {
    if (static_cast<int>(comps_.size()) != dim_) throw DimensionMismatch("field needs one component per coordinate");
    support_radius_ = 0.0;
    std::vector<Expr> all = comps_;
    for (const auto& c : comps_) {
        require_vars(c, ctx_);
        support_radius_ = std::max(support_radius_, expr::support_radius(c));
    }
    for (const auto& c : comps_)
        for (int j = 0; j < dim_; ++j) all.push_back(expr::diff(c, j));
    value_prog_ = expr::Program(comps_);
    full_prog_ = expr::Program(all);

    double r1 = std::numeric_limits<double>::infinity();
    for (const auto& c : all) r1 = std::min(r1, expr::plateau_radius(c));
    if (r1 < std::numeric_limits<double>::infinity() && r1 > 0.0) {
        plateau_radius_ = r1;
        std::vector<Expr> flat;
        for (const auto& c : all) flat.push_back(expr::plateau_form(c));
        plateau_value_prog_ = expr::Program(std::vector<Expr>(flat.begin(), flat.begin() + dim_));
        plateau_full_prog_ = expr::Program(flat);
    }
}

bool VectorField::on_plateau(std::span<const double> p) const {
    if (plateau_radius_ <= 0.0) return false;
    double s = 0.0;
    for (double v : p) s += v * v;
    return s < plateau_radius_ * plateau_radius_;
}

void VectorField::eval(std::span<const double> p, std::span<double> out, std::vector<double>& work) const {
    (on_plateau(p) ? plateau_value_prog_ : value_prog_).run(p, out, work);
}

std::vector<double> VectorField::eval(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) throw DimensionMismatch("point dimension mismatch");
    std::vector<double> out(static_cast<std::size_t>(dim_));
    std::vector<double> work;
    eval(p, out, work);
    return out;
}

void VectorField::eval_with_jacobian(std::span<const double> p, std::span<double> out,
                                     std::vector<double>& work) const {
    (on_plateau(p) ? plateau_full_prog_ : full_prog_).run(p, out, work);
}

std::vector<double> VectorField::jacobian(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) throw DimensionMismatch("point dimension mismatch");
    const auto d = static_cast<std::size_t>(dim_);
    std::vector<double> out(d + d * d), work;
    eval_with_jacobian(p, out, work);
    return std::vector<double>(out.begin() + static_cast<std::ptrdiff_t>(d), out.end());
}

VectorField hamiltonian_field(const ScalarField& f) {
    const VarContext& ctx = f.context();
    if (ctx.has_z) throw DimensionMismatch("Hamiltonian fields live on R^{2n}");
    const int n = ctx.n;
    std::vector<Expr> comps(static_cast<std::size_t>(2 * n));
    const auto& g = f.gradient_exprs();
    for (int i = 0; i < n; ++i) {
        comps[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(n + i)];
        comps[static_cast<std::size_t>(n + i)] = expr::neg(g[static_cast<std::size_t>(i)]);
    }
    return VectorField(FieldKind::Hamiltonian, ctx, std::move(comps), f);
}

VectorField contact_field(const ScalarField& f) {
    const VarContext& ctx = f.context();
    if (!ctx.has_z) throw DimensionMismatch("contact fields live on H_n");
    const int n = ctx.n;
    const auto& g = f.gradient_exprs();
    const Expr& fz = g[static_cast<std::size_t>(2 * n)];
    std::vector<Expr> comps(static_cast<std::size_t>(2 * n + 1));
    Expr xz = f.expression();
    for (int i = 0; i < n; ++i) {
        const Expr& fx = g[static_cast<std::size_t>(i)];
        const Expr& fy = g[static_cast<std::size_t>(n + i)];
        const Expr y = expr::var(n + i);
        comps[static_cast<std::size_t>(i)] = expr::neg(fy);
        comps[static_cast<std::size_t>(n + i)] = expr::add(fx, expr::mul(y, fz));
        xz = expr::sub(xz, expr::mul(y, fy));
    }
    comps[static_cast<std::size_t>(2 * n)] = xz;
    return VectorField(FieldKind::Contact, ctx, std::move(comps), f);
}

VectorField explicit_field(const VarContext& ctx, std::vector<Expr> components) {
    return VectorField(FieldKind::Explicit, ctx, std::move(components));
}

VectorField explicit_field(const VarContext& ctx, const std::vector<std::string>& components) {
    std::vector<Expr> comps;
    for (const auto& s : components) comps.push_back(expr::parse(s, ctx));
    return VectorField(FieldKind::Explicit, ctx, std::move(comps));
}

}  // namespace diffrep::fields
