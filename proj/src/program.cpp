#include <bit>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

#include "diffrep/errors.hpp"
#include "diffrep/expr.hpp"

namespace diffrep::expr {

namespace {

using Key = std::tuple<int, int, int, std::uint64_t, int, std::uint64_t, std::uint64_t, int, int, int>;

struct Cache {
    std::unordered_map<const Node*, int> by_node;
    std::map<Key, int> by_shape;
};

}  // namespace

Program::Program(const std::vector<Expr>& outputs) {
    Cache cache;
    for (const auto& e : outputs) outputs_.push_back(emit(e, &cache));
}

int Program::emit(const Expr& e, void* cache_ptr) {
    auto& cache = *static_cast<Cache*>(cache_ptr);
    if (auto it = cache.by_node.find(e.get()); it != cache.by_node.end()) return it->second;
    Instr in;
    in.op = e->op;
    in.value = e->value;
    in.index = e->index;
    in.radial = e->radial;
    if (e->a) in.a = emit(e->a, cache_ptr);
    if (e->b) in.b = emit(e->b, cache_ptr);
    // Equal shapes share a slot even when built as separate nodes.
    const bool is_radial = in.op == Op::Radial;
    const Key key{static_cast<int>(in.op), in.a, in.b,
                  in.op == Op::Const ? std::bit_cast<std::uint64_t>(in.value) : 0,
                  in.op == Op::Var || in.op == Op::Pow ? in.index : 0,
                  is_radial ? std::bit_cast<std::uint64_t>(in.radial.r1) : 0,
                  is_radial ? std::bit_cast<std::uint64_t>(in.radial.r2) : 0,
                  is_radial ? in.radial.k : 0, is_radial ? in.radial.m : 0,
                  is_radial ? in.radial.dim : 0};
    int slot;
    if (auto it = cache.by_shape.find(key); it != cache.by_shape.end()) {
        slot = it->second;
    } else {
        slot = static_cast<int>(tape_.size());
        tape_.push_back(in);
        cache.by_shape.emplace(key, slot);
    }
    cache.by_node.emplace(e.get(), slot);
    return slot;
}

void Program::run(std::span<const double> p, std::span<double> out, std::vector<double>& work) const {
    if (out.size() < outputs_.size()) throw DimensionMismatch("program output buffer too short");
    work.resize(tape_.size());
    double* w = work.data();
    for (std::size_t i = 0; i < tape_.size(); ++i) {
        const Instr& in = tape_[i];
        double v = 0.0;
        switch (in.op) {
            case Op::Const: v = in.value; break;
            case Op::Var: v = p[static_cast<std::size_t>(in.index)]; break;
            case Op::Add: v = w[in.a] + w[in.b]; break;
            case Op::Sub: v = w[in.a] - w[in.b]; break;
            case Op::Mul: v = w[in.a] * w[in.b]; break;
            case Op::Div: v = w[in.a] / w[in.b]; break;
            case Op::Neg: v = -w[in.a]; break;
            case Op::Pow: {
                const double b = w[in.a];
                switch (in.index) {
                    case 2: v = b * b; break;
                    case 3: v = b * b * b; break;
                    default: v = std::pow(b, in.index);
                }
                break;
            }
            case Op::Exp: v = std::exp(w[in.a]); break;
            case Op::Sin: v = std::sin(w[in.a]); break;
            case Op::Cos: v = std::cos(w[in.a]); break;
            case Op::Radial: v = radial_value(in.radial, p); break;
        }
        w[i] = v;
    }
    for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = w[outputs_[k]];
}

void Program::run(std::span<const double> p, std::span<double> out) const {
    std::vector<double> work;
    run(p, out, work);
}

}  // namespace diffrep::expr
