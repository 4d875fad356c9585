#pragma once

// Report builders behind the CLI subcommands. Each one runs a fixed,
// seed-determined experiment and records its measured residuals as checks.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "diffrep/report.hpp"

namespace diffrep::experiments {

struct Config {
    int n = 1;
    std::size_t res = 0;  // 0: the command's default resolution
    double theta = 0.0;
    double step = 1e-2;
    std::optional<double> tol;  // overrides the command's main tolerance
    std::uint64_t seed = 7;
    std::string f;  // DSL sources; empty means a seeded random input
    std::string g;
};

/// Throws PreconditionError on out-of-range values (resolution below 9, n < 1,
/// non-positive step or tolerance).
void validate(const Config& cfg);

Report conv_euclid(const Config& cfg);
Report conv_heis(const Config& cfg);
Report minimal_k(const Config& cfg);
Report certificate(const Config& cfg);
Report flow_check(const Config& cfg);
Report translate_sympl(const Config& cfg);
Report translate_cont(const Config& cfg);
Report rep_unitarity(const Config& cfg);
Report witness_sympl(const Config& cfg);
Report witness_cont(const Config& cfg);
Report shrink_demo(const Config& cfg);
/// Every command above at smoke resolution; checks are prefixed by command.
Report selftest(const Config& cfg);

using Runner = std::function<Report(const Config&)>;
const std::map<std::string, Runner>& commands();

}  // namespace diffrep::experiments
