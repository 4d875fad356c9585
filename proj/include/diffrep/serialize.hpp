#pragma once

// Portable text serialization of SampledFunction: a JSON document carrying the
// grid and support box plus a flat array of interleaved (re, im) node values,
// and a CSV export of node coordinates and values for external tools.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "diffrep/sampled.hpp"

namespace diffrep {

nlohmann::json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);
nlohmann::json box_to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SampledFunction& f);
SampledFunction function_from_json(const nlohmann::json& j);

void write_csv(std::ostream& os, const SampledFunction& f);

void save_function(const SampledFunction& f, const std::string& path);
SampledFunction load_function(const std::string& path);

}  // namespace diffrep
