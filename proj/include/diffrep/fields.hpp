#pragma once

// Scalar generators with symbolic derivatives and the vector fields they
// generate on R^{2n} (Hamiltonian, omega0 = sum dx^i ^ dy^i) and on H_n
// (contact, alpha0 = dz - y.dx).

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diffrep/expr.hpp"

namespace diffrep::fields {

using expr::Expr;
using expr::VarContext;

/// A smooth scalar function with its symbolic gradient and Hessian.
class ScalarField {
public:
    ScalarField(Expr f, VarContext ctx);
    static ScalarField parse(const std::string& source, VarContext ctx);

    const Expr& expression() const { return f_; }
    const VarContext& context() const { return ctx_; }
    int dim() const { return ctx_.dim(); }
    const std::vector<Expr>& gradient_exprs() const { return grad_; }
    const Expr& hessian_expr(int i, int j) const { return hess_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

    double value(std::span<const double> p) const;
    std::vector<double> gradient(std::span<const double> p) const;
    /// Row-major dim x dim.
    std::vector<double> hessian(std::span<const double> p) const;
    std::string to_string() const { return expr::to_string(f_, ctx_); }

private:
    Expr f_;
    VarContext ctx_;
    std::vector<Expr> grad_;
    std::vector<std::vector<Expr>> hess_;
    expr::Program value_prog_, grad_prog_, hess_prog_;
};

enum class FieldKind { Hamiltonian, Contact, Explicit };

/// Vector field given by component expressions, with its symbolic Jacobian
/// compiled into one tape.
class VectorField {
public:
    VectorField(FieldKind kind, VarContext ctx, std::vector<Expr> components,
                std::optional<ScalarField> generator = std::nullopt);

    FieldKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const VarContext& context() const { return ctx_; }
    const std::vector<Expr>& components() const { return comps_; }
    const std::optional<ScalarField>& generator() const { return gen_; }
    /// The field vanishes for |p| >= support_radius(); infinity if unbounded.
    double support_radius() const { return support_radius_; }
    bool compactly_supported() const { return support_radius_ < std::numeric_limits<double>::infinity(); }
    /// Inside |p| < plateau_radius() every bump factor is 1 and a cheaper
    /// program without them is evaluated; 0 when there is no such ball.
    double plateau_radius() const { return plateau_radius_; }

    void eval(std::span<const double> p, std::span<double> out, std::vector<double>& work) const;
    std::vector<double> eval(std::span<const double> p) const;
    /// out: dim components, then the Jacobian row-major (dim * dim).
    void eval_with_jacobian(std::span<const double> p, std::span<double> out, std::vector<double>& work) const;
    std::vector<double> jacobian(std::span<const double> p) const;

private:
    FieldKind kind_;
    VarContext ctx_;
    int dim_;
    std::vector<Expr> comps_;
    std::optional<ScalarField> gen_;
    double support_radius_;
    double plateau_radius_ = 0.0;
    expr::Program value_prog_, full_prog_;
    expr::Program plateau_value_prog_, plateau_full_prog_;

    bool on_plateau(std::span<const double> p) const;
};

/// X_f = (df/dy_i, -df/dx_i), so that omega0(X_f, .) = df.
VectorField hamiltonian_field(const ScalarField& f);
/// The field with alpha0(X_f) = f and X_f _| d alpha0 = df(R) alpha0 - df:
/// X_{x_i} = -f_{y_i}, X_{y_i} = f_{x_i} + y_i f_z, X_z = f - sum y_i f_{y_i}.
VectorField contact_field(const ScalarField& f);
VectorField explicit_field(const VarContext& ctx, std::vector<Expr> components);
VectorField explicit_field(const VarContext& ctx, const std::vector<std::string>& components);

}  // namespace diffrep::fields
