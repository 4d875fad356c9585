#pragma once

// Scalar expression trees over the coordinates x1..xn, y1..yn[, z] with
// symbolic differentiation, a parser for the text grammar
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' integer)?
//   base   := number | ident | '(' expr ')' | func '(' args ')'
//   func   := exp | sin | cos | bump
//
// and a printer whose output parses back to the same tree.
//
// Variable k of a context is coordinate k in the order (x1..xn, y1..yn, z).

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace diffrep::expr {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Sin, Cos, Radial };

struct Node;
using Expr = std::shared_ptr<const Node>;

/// s^{(k)}(t(rho)) * rho^{-m}, with t = (rho - r1)/(r2 - r1), rho the Euclidean
/// norm of the first `dim` coordinates and s the smoothstep falling from 1 to 0.
/// k = m = 0 is bump(r1, r2).
struct RadialParams {
    double r1 = 0.0;
    double r2 = 1.0;
    int k = 0;
    int m = 0;
    int dim = 1;
};

struct Node {
    Op op = Op::Const;
    double value = 0.0;  // Const
    int index = 0;       // Var: coordinate index; Pow: exponent
    Expr a, b;
    RadialParams radial;
};

struct VarContext {
    int n = 1;
    bool has_z = false;

    int dim() const { return 2 * n + (has_z ? 1 : 0); }
    std::string name(int index) const;
    /// Coordinate index of a name, or -1.
    int lookup(const std::string& name) const;
};

// Builders apply light simplification (constant folding, 0/1 identities).
Expr constant(double v);
Expr var(int index);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr neg(Expr a);
Expr pow(Expr a, int k);
Expr exp(Expr a);
Expr sin(Expr a);
Expr cos(Expr a);
Expr bump(double r1, double r2, int dim);
Expr radial(const RadialParams& p);

bool is_const(const Expr& e, double v);
bool is_const(const Expr& e);
/// Structural equality.
bool equal(const Expr& a, const Expr& b);

Expr diff(const Expr& e, int index);

/// Tree-walking evaluation; see Program for the fast path.
double evaluate(const Expr& e, std::span<const double> p);

std::string to_string(const Expr& e, const VarContext& ctx);

/// Throws ParseError with the byte offset of the problem.
Expr parse(const std::string& source, const VarContext& ctx);

/// R such that e vanishes whenever |p| >= R; infinity when no bound is known.
double support_radius(const Expr& e);

/// e with every bump factor replaced by its value on the plateau |p| < r1
/// (1 for the cutoff, 0 for its derivatives).
Expr plateau_form(const Expr& e);
/// Smallest inner radius r1 of the bumps in e; infinity when there are none.
double plateau_radius(const Expr& e);

/// Largest coordinate index used by e, or -1.
int max_var(const Expr& e);

/// Smoothstep s(t) = 1/(1 + exp(1/(1-t) - 1/t)) on (0, 1), 1 for t <= 0 and 0
/// for t >= 1. Writes s, s', ..., s^{(order)} to out.
void smoothstep_derivatives(double t, int order, std::span<double> out);
double smoothstep_derivative(double t, int k);

/// Value of a Radial node at p.
double radial_value(const RadialParams& r, std::span<const double> p);

/// Flattened straight-line program for a set of expressions with common
/// subexpressions shared. Evaluating all outputs costs one pass over the tape.
class Program {
public:
    Program() = default;
    explicit Program(const std::vector<Expr>& outputs);

    std::size_t outputs() const { return outputs_.size(); }
    std::size_t size() const { return tape_.size(); }
    /// `work` is resized as needed and may be reused across calls.
    void run(std::span<const double> p, std::span<double> out, std::vector<double>& work) const;
    void run(std::span<const double> p, std::span<double> out) const;

private:
    struct Instr {
        Op op;
        int a = -1, b = -1;
        double value = 0.0;
        int index = 0;
        RadialParams radial;
    };
    int emit(const Expr& e, void* cache);

    std::vector<Instr> tape_;
    std::vector<int> outputs_;
};

}  // namespace diffrep::expr
