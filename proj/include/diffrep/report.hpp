#pragma once

// Result records shared by the library and the CLI: witness reports, named
// checks with tolerances, and the versioned experiment report.

#include <string>
#include <vector>

#include <json.hpp>

#include "diffrep/grid.hpp"
#include "diffrep/sampled.hpp"

namespace diffrep {

inline constexpr int kReportSchema = 1;

struct WitnessReport {
    std::vector<double> location;
    cplx value;
    double threshold = 0.0;
    GridSpec grid_searched;
    bool passed = false;
    /// Iteration counts, residuals and cross-check values.
    nlohmann::json diagnostics = nlohmann::json::object();
};

nlohmann::json to_json(const WitnessReport& w);

/// One measured quantity compared against a bound.
struct Check {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    std::string relation;  // "<=", ">", ">=", "in" (bound..bound_hi), "=="
    double bound_hi = 0.0;
    bool passed = false;
};

Check check_le(std::string name, double measured, double bound);
Check check_lt(std::string name, double measured, double bound);
Check check_gt(std::string name, double measured, double bound);
Check check_in(std::string name, double measured, double lo, double hi);
Check check_eq(std::string name, double measured, double expected);

nlohmann::json to_json(const Check& c);

struct Report {
    std::string command;
    nlohmann::json inputs = nlohmann::json::object();
    std::vector<Check> checks;
    nlohmann::json results = nlohmann::json::object();

    void add(Check c) { checks.push_back(std::move(c)); }
    bool passed() const;
    nlohmann::json to_json() const;
    /// One row per check: name,measured,relation,bound,bound_hi,passed.
    std::string to_csv() const;
};

nlohmann::json complex_to_json(cplx v);

}  // namespace diffrep
