#include "jointosc/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace jointosc {

namespace {

int shared_nodes(std::initializer_list<const SampledFunction*> fs) {
  int k = 1;
  for (const auto* f : fs) k = std::max(k, f->samples_per_cell());
  return k;
}

double power_mean(const Samples& s, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) acc += s.weights[i] * pow_abs(s.values[i], p);
  return std::pow(acc, 1.0 / p);
}

void require_p(double p, const char* who) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError(std::string(who) + ": p must be >= 1");
}

}  // namespace

SymbolPair::SymbolPair(SampledFunction b1_, SampledFunction b2_, SampledFunction product_, std::string label_)
    : b1(std::move(b1_)), b2(std::move(b2_)), product(std::move(product_)), label(std::move(label_)) {
  if (!(b1.domain() == b2.domain()) || !(b1.domain() == product.domain()))
    throw DomainMismatch("symbol pair: b1, b2 and the product must share one domain");
}

SampledFunction product_of(const SampledFunction& a, const SampledFunction& b) {
  if (!(a.domain() == b.domain())) throw DomainMismatch("product: functions live on different domains");
  if (!a.has_nodes() && !b.has_nodes()) return cellwise_product(a, b);
  const int k = shared_nodes({&a, &b});
  if ((a.has_nodes() && a.samples_per_cell() != k) || (b.has_nodes() && b.samples_per_cell() != k))
    throw DomainMismatch("product: node counts differ");
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXcd nodes(k, n);
  ComplexVector avg(n);
  const RealVector& w = gauss_legendre_rule(k).weights;
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (int j = 0; j < k; ++j) {
      nodes(j, i) = a.sample(static_cast<std::size_t>(i), j) * b.sample(static_cast<std::size_t>(i), j);
      acc += w[j] * nodes(j, i);
    }
    avg[i] = acc;
  }
  return SampledFunction(a.domain(), avg, nodes);
}

SymbolPair SymbolPair::from_factors(SampledFunction b1, SampledFunction b2, std::string label) {
  SampledFunction prod = product_of(b1, b2);
  return SymbolPair(std::move(b1), std::move(b2), std::move(prod), std::move(label));
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::s_p:
      return "s_p";
    case Condition::t_p:
      return "t_p";
    case Condition::s_ab:
      return "s_ab";
    case Condition::t_c:
      return "t_c";
  }
  return "?";
}

Condition parse_condition(const std::string& name) {
  static const std::map<std::string, Condition> names = {
      {"s_p", Condition::s_p}, {"t_p", Condition::t_p}, {"s_ab", Condition::s_ab}, {"t_c", Condition::t_c}};
  auto it = names.find(name);
  if (it == names.end()) throw ConfigError("condition: unknown name '" + name + "' (expected s_p, t_p, s_ab, t_c)");
  return it->second;
}

void ConditionSpec::validate() const {
  switch (condition) {
    case Condition::s_p:
    case Condition::t_p:
      require_p(p, "condition");
      break;
    case Condition::s_ab:
      if (!A || !B) throw ConfigError("condition s_ab needs Young functions A and B");
      break;
    case Condition::t_c:
      if (!C) throw ConfigError("condition t_c needs a Young function C");
      break;
  }
}

double s_p(const SymbolPair& pair, const CellRange& Q, double p) {
  require_p(p, "s_p");
  return centered_oscillation(pair.b1, Q, p) * centered_oscillation(pair.b2, Q, p);
}

Samples coupled_samples(const SymbolPair& pair, const CellRange& Q) {
  check_range(pair.domain(), Q);
  const Complex c1 = average(pair.b1, Q), c2 = average(pair.b2, Q);
  const int k = shared_nodes({&pair.b1, &pair.b2, &pair.product});
  const auto n = static_cast<Eigen::Index>(Q.size()) * k;
  Samples s;
  s.values.resize(n);
  s.weights.resize(n);
  const double inv = 1.0 / static_cast<double>(Q.size());
  const RealVector w = k == 1 ? RealVector::Ones(1) : gauss_legendre_rule(k).weights;
  const Complex cc = c1 * c2;
  Eigen::Index at = 0;
  for (std::size_t i = Q.begin; i < Q.end; ++i) {
    for (int j = 0; j < k; ++j, ++at) {
      const Complex v = pair.product.sample(i, j) - c2 * pair.b1.sample(i, j) - c1 * pair.b2.sample(i, j) + cc;
      s.values[at] = std::abs(v);
      s.weights[at] = w[j] * inv;
    }
  }
  return s;
}

double t_p(const SymbolPair& pair, const CellRange& Q, double p) {
  require_p(p, "t_p");
  return power_mean(coupled_samples(pair, Q), p);
}

double s_ab(const SymbolPair& pair, const CellRange& Q, const YoungFunction& A, const YoungFunction& B) {
  const double a = luxemburg_norm(gather_abs_samples(pair.b1, Q, average(pair.b1, Q)), A);
  if (a == 0.0) return 0.0;
  return a * luxemburg_norm(gather_abs_samples(pair.b2, Q, average(pair.b2, Q)), B);
}

double t_c(const SymbolPair& pair, const CellRange& Q, const YoungFunction& C) {
  return luxemburg_norm(coupled_samples(pair, Q), C);
}

double evaluate(const SymbolPair& pair, const CellRange& Q, const ConditionSpec& spec) {
  switch (spec.condition) {
    case Condition::s_p:
      return s_p(pair, Q, spec.p);
    case Condition::t_p:
      return t_p(pair, Q, spec.p);
    case Condition::s_ab:
      return s_ab(pair, Q, *spec.A, *spec.B);
    case Condition::t_c:
      return t_c(pair, Q, *spec.C);
  }
  return 0.0;
}

namespace {

struct Evaluated {
  int level;
  CellRange cells;
  double value;
};

void finish(ConditionReport& r) {
  r.sup_lower_bound = 0.0;
  for (const auto& s : r.per_scale) r.sup_lower_bound = std::max(r.sup_lower_bound, s.max);
  if (r.per_scale.empty()) return;
  const double first = r.per_scale.front().max, last = r.per_scale.back().max;
  if (first == 0.0) {
    r.growth_ratio = last == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  } else {
    r.growth_ratio = last / first;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < r.per_scale.size(); ++i) {
    if (!(r.per_scale[i].max > 0)) continue;
    const double x = static_cast<double>(i), y = std::log2(r.per_scale[i].max);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  r.growth_slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
}

ConditionReport assemble(const SymbolPair& pair, const ConditionSpec& spec, const std::vector<Evaluated>& vals,
                         const std::string& family) {
  ConditionReport r;
  r.spec = spec;
  r.window = pair.domain();
  r.family = family;
  for (const auto& e : vals) {
    if (!std::isfinite(e.value) || e.value < 0) throw NumericalError("scan: non-finite condition value", e.value);
    if (r.per_scale.empty() || r.per_scale.back().level != e.level) {
      ScaleEntry s;
      s.level = e.level;
      s.max = -1.0;
      r.per_scale.push_back(s);
    }
    ScaleEntry& s = r.per_scale.back();
    ++s.count;
    if (e.value > s.max || (e.value == s.max && e.cells.begin < s.argmax.begin)) {
      s.max = e.value;
      s.argmax = e.cells;
    }
  }
  const Domain& d = pair.domain();
  for (auto& s : r.per_scale) {
    s.left = d.cell_left(s.argmax.begin);
    s.right = d.cell_left(s.argmax.end);
  }
  finish(r);
  return r;
}

}  // namespace

ConditionReport scan_condition(const SymbolPair& pair, const ConditionSpec& spec, const ScanSchedule& schedule) {
  spec.validate();
  const auto intervals = dyadic_scan(pair.domain(), schedule);
  std::vector<Evaluated> vals(intervals.size());
  parallel_for(intervals.size(), [&](std::size_t k) {
    vals[k] = {intervals[k].level, intervals[k].cells, evaluate(pair, intervals[k].cells, spec)};
  });
  std::stable_sort(vals.begin(), vals.end(), [](const Evaluated& a, const Evaluated& b) { return a.level < b.level; });
  return assemble(pair, spec, vals, "dyadic");
}

ConditionReport scan_ladder(const SymbolPair& pair, const ConditionSpec& spec, const std::vector<CellRange>& rungs,
                            const std::string& family) {
  spec.validate();
  std::vector<Evaluated> vals(rungs.size());
  parallel_for(rungs.size(), [&](std::size_t k) {
    vals[k] = {static_cast<int>(k), rungs[k], evaluate(pair, rungs[k], spec)};
  });
  return assemble(pair, spec, vals, family);
}

std::vector<CellRange> symmetric_ladder(const Domain& domain, const std::vector<double>& ks) {
  std::vector<CellRange> out;
  for (double k : ks) out.push_back(cells_of(domain, -k, k));
  return out;
}

std::vector<CellRange> anchored_ladder(const Domain& domain, double a, const std::vector<double>& ks) {
  std::vector<CellRange> out;
  for (double k : ks) out.push_back(cells_of(domain, a, a + k));
  return out;
}

double tail_growth_ratio(const ConditionReport& report, int scales) {
  const int n = static_cast<int>(report.per_scale.size());
  if (scales < 2 || scales > n) throw ConfigError("tail_growth_ratio: need 2 <= scales <= number of scales");
  const double first = report.per_scale[static_cast<std::size_t>(n - scales)].max;
  const double last = report.per_scale.back().max;
  if (first == 0.0) return last == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return last / first;
}

MagicLemmaValues magic_lemma(const SampledFunction& b1, const SampledFunction& b2, const CellRange& Q) {
  if (!(b1.domain() == b2.domain())) throw DomainMismatch("magic_lemma: domains differ");
  check_range(b1.domain(), Q);
  const int k = shared_nodes({&b1, &b2});
  const RealVector w = k == 1 ? RealVector::Ones(1) : gauss_legendre_rule(k).weights;
  const auto n = static_cast<Eigen::Index>(Q.size()) * k;
  ComplexVector x1(n), x2(n);
  RealVector wt(n);
  Eigen::Index at = 0;
  for (std::size_t i = Q.begin; i < Q.end; ++i) {
    for (int j = 0; j < k; ++j, ++at) {
      x1[at] = b1.sample(i, j);
      x2[at] = b2.sample(i, j);
      wt[at] = w[j] / static_cast<double>(Q.size());
    }
  }
  MagicLemmaValues out;
  Complex s1 = 0.0, s2 = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    Complex r1 = 0.0, r2 = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
      const Complex d = (x1[a] - x1[b]) * (x2[a] - x2[b]) * wt[b];
      r1 += d * std::conj(x2[b]);
      r2 += d;
    }
    s1 += wt[a] * std::conj(x1[a]) * r1;
    s2 += wt[a] * std::conj(x1[a] * x2[a]) * r2;
  }
  out.ml1 = s1;
  out.ml2 = s2;
  double m11 = 0, m22 = 0, m4 = 0;
  Complex c12 = 0.0, p12 = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    m11 += wt[a] * std::norm(x1[a]);
    m22 += wt[a] * std::norm(x2[a]);
    m4 += wt[a] * std::norm(x1[a] * x2[a]);
    c12 += wt[a] * x1[a] * std::conj(x2[a]);
    p12 += wt[a] * x1[a] * x2[a];
  }
  out.ml1_rhs = m11 * m22 + std::norm(c12);
  out.ml2_rhs = m4 + std::norm(p12);
  return out;
}

}  // namespace jointosc
