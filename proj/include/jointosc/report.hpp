#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "jointosc/conditions.hpp"
#include "jointosc/gallery.hpp"
#include "jointosc/singular.hpp"
#include "jointosc/sparse.hpp"
#include "jointosc/young.hpp"

namespace jointosc {

using Json = nlohmann::ordered_json;

/// Finite doubles as numbers, everything else as null.
Json number(double v);

Json to_json(const ConditionSpec& spec);
/// {condition, params, window, per_scale, sup_lower_bound, growth_ratio}.
Json to_json(const ConditionReport& report);
/// One row per scale: level,count,max,argmax_left,argmax_right.
void write_scale_csv(std::ostream& out, const ConditionReport& report);

Json to_json(const NormEstimate& estimate);
/// {root, cubes, gamma, alpha_max, depth}.
Json to_json(const SparseFamily& family);
Json to_json(const DominationReport& report, const Domain& domain);
Json to_json(const SparseBound& bound);
/// {name, params, window_hint}.
Json to_json(const GalleryPair& pair);
Json to_json(const BpVerdict& verdict);

/// Pretty JSON followed by a newline.
void write_json(std::ostream& out, const Json& j);
void write_json(const std::string& path, const Json& j);

}  // namespace jointosc
