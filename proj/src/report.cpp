#include "diffrep/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "diffrep/serialize.hpp"

namespace diffrep {

namespace {

// NaN never passes a check.
Check make(std::string name, double measured, double bound, std::string rel, double hi, bool ok) {
    Check c;
    c.name = std::move(name);
    c.measured = measured;
    c.bound = bound;
    c.relation = std::move(rel);
    c.bound_hi = hi;
    c.passed = ok && std::isfinite(measured);
    return c;
}

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

nlohmann::json complex_to_json(cplx v) { return nlohmann::json::array({number(v.real()), number(v.imag())}); }

nlohmann::json to_json(const WitnessReport& w) {
    nlohmann::json j;
    j["location"] = w.location;
    j["value"] = complex_to_json(w.value);
    j["abs_value"] = number(std::abs(w.value));
    j["threshold"] = number(w.threshold);
    j["grid_searched"] = w.grid_searched.dim() ? grid_to_json(w.grid_searched) : nlohmann::json();
    j["passed"] = w.passed;
    j["diagnostics"] = w.diagnostics;
    return j;
}

Check check_le(std::string name, double measured, double bound) {
    return make(std::move(name), measured, bound, "<=", 0.0, measured <= bound);
}

Check check_lt(std::string name, double measured, double bound) {
    return make(std::move(name), measured, bound, "<", 0.0, measured < bound);
}

Check check_gt(std::string name, double measured, double bound) {
    return make(std::move(name), measured, bound, ">", 0.0, measured > bound);
}

Check check_in(std::string name, double measured, double lo, double hi) {
    return make(std::move(name), measured, lo, "in", hi, measured >= lo && measured <= hi);
}

Check check_eq(std::string name, double measured, double expected) {
    return make(std::move(name), measured, expected, "==", 0.0, measured == expected);
}

nlohmann::json to_json(const Check& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["measured"] = number(c.measured);
    j["relation"] = c.relation;
    j["bound"] = number(c.bound);
    if (c.relation == "in") j["bound_hi"] = number(c.bound_hi);
    j["passed"] = c.passed;
    return j;
}

bool Report::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["command"] = command;
    j["inputs"] = inputs;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : checks) cs.push_back(diffrep::to_json(c));
    j["checks"] = std::move(cs);
    j["results"] = results;
    j["passed"] = passed();
    return j;
}

std::string Report::to_csv() const {
    std::ostringstream os;
    os << "name,measured,relation,bound,bound_hi,passed\n";
    for (const auto& c : checks)
        os << c.name << ',' << fmt(c.measured) << ',' << c.relation << ',' << fmt(c.bound) << ','
           << fmt(c.bound_hi) << ',' << (c.passed ? "true" : "false") << '\n';
    return os.str();
}

}  // namespace diffrep
