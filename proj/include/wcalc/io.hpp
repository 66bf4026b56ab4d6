#pragma once

#include "wcalc/cylinder.hpp"
#include "wcalc/measure.hpp"
#include "wcalc/transport.hpp"
#include "wcalc/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace wcalc {

using Json = nlohmann::json;

Json load_json(const std::string& path);

// { "dim": d, "atoms": [[...],...], "weights": [...] }
EmpiricalMeasure measure_from_json(const Json& j);
EmpiricalMeasure read_measure(const std::string& path);
Json measure_to_json(const EmpiricalMeasure& mu);

// { "components": [ {"mass": m, "measure": <inline object or path>} ] }
MetaMeasure meta_measure_from_json(const Json& j, const std::string& base_dir);
MetaMeasure read_meta_measure(const std::string& path);

// { "mean": [...], "cov": [[...]] }
GaussianMeasure gaussian_from_json(const Json& j);

// { "type": "gaussian_bump" | "coord_bump" | "poly", ... }
SmoothFeature feature_from_json(const Json& j);
// "linear" | "square" | "polynomial" | "tanh"
OuterFunction outer_from_json(const Json& j, Index arity);
// { "outer": {...}, "features": [ ... ] }
CylinderFunction cylinder_from_json(const Json& j);

std::vector<double> read_scalar_csv(const std::string& path);  // one value per line

// shortest round-trip formatting, fixed across runs
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace wcalc
