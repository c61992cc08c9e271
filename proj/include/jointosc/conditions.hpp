#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jointosc/grid.hpp"
#include "jointosc/young.hpp"

namespace jointosc {

/// The symbols (b1, b2) together with their product b1 b2 on one Domain.
struct SymbolPair {
  SampledFunction b1;
  SampledFunction b2;
  SampledFunction product;
  std::string label;

  SymbolPair() = default;
  /// Throws DomainMismatch unless all three share a Domain.
  SymbolPair(SampledFunction b1, SampledFunction b2, SampledFunction product, std::string label);

  /// Product assembled from the factors (node-wise when either carries nodes).
  static SymbolPair from_factors(SampledFunction b1, SampledFunction b2, std::string label = "custom");

  const Domain& domain() const { return b1.domain(); }
};

/// Pointwise product of two functions; exact-node data is multiplied node by node.
SampledFunction product_of(const SampledFunction& a, const SampledFunction& b);

enum class Condition { s_p, t_p, s_ab, t_c };

std::string to_string(Condition c);
Condition parse_condition(const std::string& name);

struct ConditionSpec {
  Condition condition = Condition::s_p;
  double p = 2.0;
  std::optional<YoungFunction> A;
  std::optional<YoungFunction> B;
  std::optional<YoungFunction> C;

  static ConditionSpec sp(double p) { return {Condition::s_p, p, {}, {}, {}}; }
  static ConditionSpec tp(double p) { return {Condition::t_p, p, {}, {}, {}}; }
  static ConditionSpec sab(YoungFunction a, YoungFunction b) { return {Condition::s_ab, 2.0, a, b, {}}; }
  static ConditionSpec tc(YoungFunction c) { return {Condition::t_c, 2.0, {}, {}, c}; }
  /// Throws ConfigError when a required parameter is missing.
  void validate() const;
};

/// Product of the two centered p-oscillations on Q.
double s_p(const SymbolPair& pair, const CellRange& Q, double p);
/// <|b1 - <b1>||b2 - <b2>|^p>^{1/p} with the product taken from pair.product.
double t_p(const SymbolPair& pair, const CellRange& Q, double p);
double s_ab(const SymbolPair& pair, const CellRange& Q, const YoungFunction& A, const YoungFunction& B);
double t_c(const SymbolPair& pair, const CellRange& Q, const YoungFunction& C);
double evaluate(const SymbolPair& pair, const CellRange& Q, const ConditionSpec& spec);

/// Samples of |b1 - c1||b2 - c2| = |b1 b2 - c2 b1 - c1 b2 + c1 c2| on Q, c_i = <b_i>_Q.
Samples coupled_samples(const SymbolPair& pair, const CellRange& Q);

struct ScaleEntry {
  int level = 0;
  std::size_t count = 0;
  double max = 0.0;
  CellRange argmax;
  double left = 0.0;
  double right = 0.0;
};

/// Scan result; every value is a lower bound for the supremum over all intervals.
struct ConditionReport {
  ConditionSpec spec;
  Domain window;
  std::string family = "dyadic";
  std::vector<ScaleEntry> per_scale;
  double sup_lower_bound = 0.0;
  /// Last-scale max over first-scale max (1 when both vanish).
  double growth_ratio = 1.0;
  /// Least-squares slope of log2(max) against the scale position.
  double growth_slope = 0.0;
};

/// Dyadic intervals (plus one-third shifts) at the scheduled levels.
ConditionReport scan_condition(const SymbolPair& pair, const ConditionSpec& spec, const ScanSchedule& schedule);

/// One scale per rung: rung i of the ladder is reported as level i.
ConditionReport scan_ladder(const SymbolPair& pair, const ConditionSpec& spec, const std::vector<CellRange>& rungs,
                            const std::string& family);

/// (-k, k) for each k.
std::vector<CellRange> symmetric_ladder(const Domain& domain, const std::vector<double>& ks);
/// (a, a + k) for each k.
std::vector<CellRange> anchored_ladder(const Domain& domain, double a, const std::vector<double>& ks);

/// max at the last scale over max at the scale `scales - 1` positions earlier.
double tail_growth_ratio(const ConditionReport& report, int scales);

/// Left sides of the two double-average identities for mean-zero b1, b2 on Q.
struct MagicLemmaValues {
  Complex ml1;        // <<(b1(x)-b1(y))(b2(x)-b2(y)) conj(b1(x)) conj(b2(y))>>
  Complex ml2;        // same with conj(b1(x) b2(x))
  double ml1_rhs = 0;  // <|b1|^2><|b2|^2> + |<b1 conj(b2)>|^2
  double ml2_rhs = 0;  // <|b1 b2|^2> + |<b1 b2>|^2
};

/// Brute-force double averages over all sample pairs of Q.
MagicLemmaValues magic_lemma(const SampledFunction& b1, const SampledFunction& b2, const CellRange& Q);

}  // namespace jointosc
