#include "diffrep/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "diffrep/errors.hpp"

namespace diffrep::expr {

namespace {

Expr make(Op op, Expr a = nullptr, Expr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(v));
    if (std::signbit(v) && v != 0.0) return std::string("(0-") + buf + ")";
    return buf;
}

}  // namespace

std::string VarContext::name(int index) const {
    if (index < 0 || index >= dim()) throw PreconditionError("variable index out of range");
    if (index < n) return "x" + std::to_string(index + 1);
    if (index < 2 * n) return "y" + std::to_string(index - n + 1);
    return "z";
}

int VarContext::lookup(const std::string& s) const {
    if (s == "z") return has_z ? 2 * n : -1;
    if (s.size() < 2 || (s[0] != 'x' && s[0] != 'y')) return -1;
    if (s[1] == '0') return -1;
    int k = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return -1;
        k = k * 10 + (s[i] - '0');
        if (k > n) return -1;
    }
    if (k < 1) return -1;
    return s[0] == 'x' ? k - 1 : n + k - 1;
}

bool is_const(const Expr& e) { return e->op == Op::Const; }
bool is_const(const Expr& e, double v) { return e->op == Op::Const && e->value == v; }

bool equal(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (!a || !b || a->op != b->op) return false;
    switch (a->op) {
        case Op::Const: return a->value == b->value;
        case Op::Var: return a->index == b->index;
        case Op::Pow: return a->index == b->index && equal(a->a, b->a);
        case Op::Radial: {
            const RadialParams& p = a->radial;
            const RadialParams& q = b->radial;
            return p.r1 == q.r1 && p.r2 == q.r2 && p.k == q.k && p.m == q.m && p.dim == q.dim;
        }
        default: return equal(a->a, b->a) && equal(a->b, b->b);
    }
}

Expr constant(double v) {
    if (!std::isfinite(v)) throw PreconditionError("non-finite constant in expression");
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

Expr var(int index) {
    if (index < 0) throw PreconditionError("negative variable index");
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->index = index;
    return n;
}

Expr add(Expr a, Expr b) {
    if (is_const(a) && is_const(b)) return constant(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make(Op::Add, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
    if (is_const(a) && is_const(b)) return constant(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    return make(Op::Sub, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
    if (is_const(a) && is_const(b)) return constant(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return neg(std::move(b));
    if (is_const(b, -1.0)) return neg(std::move(a));
    return make(Op::Mul, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
    if (is_const(b, 0.0)) throw PreconditionError("division by constant zero");
    if (is_const(a) && is_const(b)) return constant(a->value / b->value);
    if (is_const(a, 0.0)) return constant(0.0);
    if (is_const(b, 1.0)) return a;
    return make(Op::Div, std::move(a), std::move(b));
}

Expr neg(Expr a) {
    if (is_const(a)) return constant(-a->value);
    if (a->op == Op::Neg) return a->a;
    return make(Op::Neg, std::move(a));
}

Expr pow(Expr a, int k) {
    if (k == 0) return constant(1.0);
    if (k == 1) return a;
    if (is_const(a)) {
        if (a->value == 0.0 && k < 0) throw PreconditionError("zero raised to a negative power");
        return constant(std::pow(a->value, k));
    }
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->a = std::move(a);
    n->index = k;
    return n;
}

Expr exp(Expr a) {
    if (is_const(a)) return constant(std::exp(a->value));
    return make(Op::Exp, std::move(a));
}

Expr sin(Expr a) {
    if (is_const(a)) return constant(std::sin(a->value));
    return make(Op::Sin, std::move(a));
}

Expr cos(Expr a) {
    if (is_const(a)) return constant(std::cos(a->value));
    return make(Op::Cos, std::move(a));
}

Expr radial(const RadialParams& p) {
    if (!(p.r1 >= 0.0) || !(p.r1 < p.r2)) throw PreconditionError("bump radii need 0 <= r1 < r2");
    if (p.dim < 1) throw PreconditionError("bump needs at least one coordinate");
    auto n = std::make_shared<Node>();
    n->op = Op::Radial;
    n->radial = p;
    return n;
}

Expr bump(double r1, double r2, int dim) { return radial(RadialParams{r1, r2, 0, 0, dim}); }

Expr diff(const Expr& e, int j) {
    switch (e->op) {
        case Op::Const: return constant(0.0);
        case Op::Var: return constant(e->index == j ? 1.0 : 0.0);
        case Op::Add: return add(diff(e->a, j), diff(e->b, j));
        case Op::Sub: return sub(diff(e->a, j), diff(e->b, j));
        case Op::Mul: return add(mul(diff(e->a, j), e->b), mul(e->a, diff(e->b, j)));
        case Op::Div:
            return sub(div(diff(e->a, j), e->b), div(mul(e->a, diff(e->b, j)), pow(e->b, 2)));
        case Op::Neg: return neg(diff(e->a, j));
        case Op::Pow:
            return mul(mul(constant(e->index), pow(e->a, e->index - 1)), diff(e->a, j));
        case Op::Exp: return mul(e, diff(e->a, j));
        case Op::Sin: return mul(cos(e->a), diff(e->a, j));
        case Op::Cos: return neg(mul(sin(e->a), diff(e->a, j)));
        case Op::Radial: {
            const RadialParams& r = e->radial;
            if (j >= r.dim) return constant(0.0);
            RadialParams up = r;
            up.k += 1;
            up.m += 1;
            Expr inner = mul(constant(1.0 / (r.r2 - r.r1)), radial(up));
            if (r.m > 0) {
                RadialParams side = r;
                side.m += 2;
                inner = sub(inner, mul(constant(r.m), radial(side)));
            }
            return mul(var(j), inner);
        }
    }
    throw Error("unreachable expression op");
}

double evaluate(const Expr& e, std::span<const double> p) {
    switch (e->op) {
        case Op::Const: return e->value;
        case Op::Var:
            if (static_cast<std::size_t>(e->index) >= p.size()) throw DimensionMismatch("point too short for expression");
            return p[static_cast<std::size_t>(e->index)];
        case Op::Add: return evaluate(e->a, p) + evaluate(e->b, p);
        case Op::Sub: return evaluate(e->a, p) - evaluate(e->b, p);
        case Op::Mul: return evaluate(e->a, p) * evaluate(e->b, p);
        case Op::Div: return evaluate(e->a, p) / evaluate(e->b, p);
        case Op::Neg: return -evaluate(e->a, p);
        case Op::Pow: return std::pow(evaluate(e->a, p), e->index);
        case Op::Exp: return std::exp(evaluate(e->a, p));
        case Op::Sin: return std::sin(evaluate(e->a, p));
        case Op::Cos: return std::cos(evaluate(e->a, p));
        case Op::Radial:
            if (static_cast<std::size_t>(e->radial.dim) > p.size()) throw DimensionMismatch("point too short for bump");
            return radial_value(e->radial, p);
    }
    throw Error("unreachable expression op");
}

std::string to_string(const Expr& e, const VarContext& ctx) {
    switch (e->op) {
        case Op::Const: return number(e->value);
        case Op::Var: return ctx.name(e->index);
        case Op::Add: return "(" + to_string(e->a, ctx) + "+" + to_string(e->b, ctx) + ")";
        case Op::Sub: return "(" + to_string(e->a, ctx) + "-" + to_string(e->b, ctx) + ")";
        case Op::Mul: return "(" + to_string(e->a, ctx) + "*" + to_string(e->b, ctx) + ")";
        case Op::Div: return "(" + to_string(e->a, ctx) + "/" + to_string(e->b, ctx) + ")";
        case Op::Neg: return "(0-" + to_string(e->a, ctx) + ")";
        case Op::Pow: return "(" + to_string(e->a, ctx) + ")^" + std::to_string(e->index);
        case Op::Exp: return "exp(" + to_string(e->a, ctx) + ")";
        case Op::Sin: return "sin(" + to_string(e->a, ctx) + ")";
        case Op::Cos: return "cos(" + to_string(e->a, ctx) + ")";
        case Op::Radial: {
            const RadialParams& r = e->radial;
            const std::string args = number(r.r1) + "," + number(r.r2);
            if (r.k == 0 && r.m == 0) return "bump(" + args + ")";
            // Derivative pieces have no surface syntax.
            return "bump_d" + std::to_string(r.k) + "_m" + std::to_string(r.m) + "(" + args + ")";
        }
    }
    throw Error("unreachable expression op");
}

double support_radius(const Expr& e) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (e->op) {
        case Op::Const: return e->value == 0.0 ? 0.0 : inf;
        case Op::Var: return inf;
        case Op::Add:
        case Op::Sub: return std::max(support_radius(e->a), support_radius(e->b));
        case Op::Mul: return std::min(support_radius(e->a), support_radius(e->b));
        case Op::Div:
        case Op::Neg:
        case Op::Sin: return support_radius(e->a);
        case Op::Pow: return e->index > 0 ? support_radius(e->a) : inf;
        case Op::Exp:
        case Op::Cos: return inf;
        case Op::Radial: return e->radial.r2;
    }
    return inf;
}

namespace {

Expr plateau_rec(const Expr& e, std::unordered_map<const Node*, Expr>& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    Expr r;
    switch (e->op) {
        case Op::Const:
        case Op::Var: r = e; break;
        case Op::Radial: r = constant(e->radial.k == 0 ? 1.0 : 0.0); break;
        case Op::Add: r = add(plateau_rec(e->a, memo), plateau_rec(e->b, memo)); break;
        case Op::Sub: r = sub(plateau_rec(e->a, memo), plateau_rec(e->b, memo)); break;
        case Op::Mul: r = mul(plateau_rec(e->a, memo), plateau_rec(e->b, memo)); break;
        case Op::Div: r = div(plateau_rec(e->a, memo), plateau_rec(e->b, memo)); break;
        case Op::Neg: r = neg(plateau_rec(e->a, memo)); break;
        case Op::Pow: r = pow(plateau_rec(e->a, memo), e->index); break;
        case Op::Exp: r = exp(plateau_rec(e->a, memo)); break;
        case Op::Sin: r = sin(plateau_rec(e->a, memo)); break;
        case Op::Cos: r = cos(plateau_rec(e->a, memo)); break;
    }
    memo.emplace(e.get(), r);
    return r;
}

}  // namespace

Expr plateau_form(const Expr& e) {
    std::unordered_map<const Node*, Expr> memo;
    return plateau_rec(e, memo);
}

double plateau_radius(const Expr& e) {
    double r = std::numeric_limits<double>::infinity();
    std::unordered_set<const Node*> seen;
    std::vector<const Node*> stack{e.get()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        if (n->op == Op::Radial) r = std::min(r, n->radial.r1);
        if (n->a) stack.push_back(n->a.get());
        if (n->b) stack.push_back(n->b.get());
    }
    return r;
}

int max_var(const Expr& e) {
    switch (e->op) {
        case Op::Const: return -1;
        case Op::Var: return e->index;
        case Op::Radial: return e->radial.dim - 1;
        default: {
            int m = e->a ? max_var(e->a) : -1;
            if (e->b) m = std::max(m, max_var(e->b));
            return m;
        }
    }
}

}  // namespace diffrep::expr
