#include "diffrep/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "diffrep/errors.hpp"

namespace diffrep {

nlohmann::json grid_to_json(const GridSpec& g) {
    return {{"dim", g.dim()}, {"lo", g.lo()}, {"hi", g.hi()}, {"counts", g.counts()}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
    return GridSpec(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>(),
                    j.at("counts").get<std::vector<std::size_t>>());
}

nlohmann::json box_to_json(const Box& b) {
    return {{"lo", b.lo}, {"hi", b.hi}};
}

Box box_from_json(const nlohmann::json& j) {
    return Box(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>());
}

nlohmann::json to_json(const SampledFunction& f) {
    std::vector<double> flat;
    flat.reserve(2 * f.values().size());
    for (const cplx& v : f.values()) {
        flat.push_back(v.real());
        flat.push_back(v.imag());
    }
    return {{"schema", 1},
            {"type", "SampledFunction"},
            {"grid", grid_to_json(f.grid())},
            {"support", box_to_json(f.support())},
            {"values", std::move(flat)}};
}

SampledFunction function_from_json(const nlohmann::json& j) {
    if (j.value("schema", 0) != 1) throw Error("unsupported SampledFunction schema");
    GridSpec grid = grid_from_json(j.at("grid"));
    Box support = box_from_json(j.at("support"));
    const auto flat = j.at("values").get<std::vector<double>>();
    if (flat.size() != 2 * grid.size()) throw DimensionMismatch("value array does not match grid");
    std::vector<cplx> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = {flat[2 * i], flat[2 * i + 1]};
    return SampledFunction(std::move(grid), std::move(support), std::move(values));
}

void write_csv(std::ostream& os, const SampledFunction& f) {
    const GridSpec& g = f.grid();
    for (std::size_t a = 0; a < g.dim(); ++a) os << "c" << a << ',';
    os << "re,im\n";
    std::vector<double> p(g.dim());
    char buf[32];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.node(i, p);
        for (double c : p) {
            std::snprintf(buf, sizeof buf, "%.17g", c);
            os << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", f[i].real());
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", f[i].imag());
        os << buf << '\n';
    }
}

void save_function(const SampledFunction& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    os << to_json(f).dump() << '\n';
}

SampledFunction load_function(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return function_from_json(nlohmann::json::parse(is));
}

}  // namespace diffrep
