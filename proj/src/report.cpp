#include "jointosc/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace jointosc {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const ConditionSpec& spec) {
  Json j;
  j["condition"] = to_string(spec.condition);
  if (spec.condition == Condition::s_p || spec.condition == Condition::t_p) j["p"] = spec.p;
  if (spec.A) j["A"] = spec.A->spec();
  if (spec.B) j["B"] = spec.B->spec();
  if (spec.C) j["C"] = spec.C->spec();
  return j;
}

Json to_json(const ConditionReport& report) {
  Json j;
  j["condition"] = to_string(report.spec.condition);
  j["params"] = to_json(report.spec);
  j["params"]["family"] = report.family;
  j["window"] = {report.window.left(), report.window.right()};
  j["n_cells"] = report.window.n_cells();
  Json scales = Json::array();
  for (const auto& s : report.per_scale) {
    scales.push_back({{"level", s.level},
                      {"count", s.count},
                      {"max", number(s.max)},
                      {"argmax", {s.left, s.right}}});
  }
  j["per_scale"] = scales;
  j["sup_lower_bound"] = number(report.sup_lower_bound);
  j["growth_ratio"] = number(report.growth_ratio);
  j["growth_slope"] = number(report.growth_slope);
  return j;
}

void write_scale_csv(std::ostream& out, const ConditionReport& report) {
  out << "level,count,max,argmax_left,argmax_right\n";
  out.precision(17);
  for (const auto& s : report.per_scale)
    out << s.level << ',' << s.count << ',' << s.max << ',' << s.left << ',' << s.right << '\n';
}

Json to_json(const NormEstimate& e) {
  return {{"value", number(e.value)},
          {"iterations", e.iterations},
          {"residual", number(e.residual)},
          {"grid_size", e.grid_size}};
}

Json to_json(const SparseFamily& family) {
  Json j;
  j["root"] = {family.root.left(family.domain), family.root.right(family.domain)};
  Json cubes = Json::array();
  for (const auto& node : family.nodes) {
    cubes.push_back({{"level", node.cube.level},
                     {"index", node.cube.index},
                     {"carved_cells", node.carved},
                     {"depth", node.depth},
                     {"alpha", number(node.alpha)},
                     {"fallback", node.fallback}});
  }
  j["cubes"] = cubes;
  j["gamma"] = number(family.gamma);
  j["alpha_max"] = number(family.alpha_max);
  j["depth"] = family.depth;
  j["fallback_nodes"] = family.fallback_nodes;
  j["cz_ok"] = family.cz_ok;
  j["carved_disjoint"] = family.carved_disjoint;
  j["depth_mass_ratio"] = number(family.depth_mass_ratio);
  return j;
}

Json to_json(const DominationReport& report, const Domain& domain) {
  Json cells = Json::array();
  for (auto i : report.violation_cells) cells.push_back({{"cell", i}, {"x", domain.midpoint(i)}});
  return {{"max_ratio", number(report.max_ratio)},
          {"cells_checked", report.cells_checked},
          {"violation_cells", cells}};
}

Json to_json(const SparseBound& b) {
  return {{"bound", number(b.bound)},
          {"pairing", number(b.pairing)},
          {"domination", number(b.domination)},
          {"majorants", {number(b.majorants[0]), number(b.majorants[1]), number(b.majorants[2]), number(b.majorants[3])}},
          {"maximal_chain", number(b.maximal_chain)},
          {"bp_warning", b.bp_warning},
          {"warnings", b.warnings}};
}

Json to_json(const GalleryPair& pair) {
  Json params = Json::object();
  for (const auto& [k, v] : pair.params) params[k] = number(v);
  if (!pair.schedule.empty()) {
    Json sched = Json::array();
    for (const auto& [k, c] : pair.schedule) sched.push_back({{"k", k}, {"c", number(c)}});
    params["schedule"] = sched;
  }
  return {{"name", pair.name},
          {"params", params},
          {"window_hint", {{"left", pair.window_hint.left},
                           {"right", pair.window_hint.right},
                           {"n_cells", pair.window_hint.n_cells}}}};
}

Json to_json(const BpVerdict& v) {
  return {{"p", v.p},
          {"member", v.member},
          {"method", v.method == BpMethod::closed_form ? "closed_form" : "numeric_tail"},
          {"tail_estimate", number(v.tail_estimate)},
          {"decay_exponent", number(v.decay_exponent)},
          {"increments_decreasing", v.increments_decreasing}};
}

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_json(out, j);
}

}  // namespace jointosc
