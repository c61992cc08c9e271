#include "jointosc/young.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "jointosc/quadrature.hpp"

namespace jointosc {

namespace {

constexpr double kE = std::numbers::e;
const double kEe = std::exp(kE);

void check_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(std::string("young: ") + what + " must be positive and finite");
}

// log-linear segment lookup: index i with log_t[i] <= u < log_t[i+1], clamped to the end segments
std::size_t segment(const YoungFunction::Table& tab, double u) {
  const auto& lt = tab.log_t;
  if (u <= lt.front()) return 0;
  if (u >= lt.back()) return lt.size() - 2;
  auto it = std::upper_bound(lt.begin(), lt.end(), u);
  return static_cast<std::size_t>(it - lt.begin()) - 1;
}

std::shared_ptr<YoungFunction::Table> build_table(const std::vector<double>& t, const std::vector<double>& a) {
  if (t.size() != a.size()) throw ConfigError("young table: t and A columns differ in length");
  auto tab = std::make_shared<YoungFunction::Table>();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == 0.0 && a[i] == 0.0) continue;
    if (!(t[i] > 0) || !(a[i] > 0) || !std::isfinite(t[i]) || !std::isfinite(a[i]))
      throw ConfigError("young table: rows must have t > 0 and A > 0 (apart from a leading 0,0 row)");
    if (!tab->log_t.empty() && !(std::log(t[i]) > tab->log_t.back()))
      throw ConfigError("young table: t must be strictly increasing");
    tab->log_t.push_back(std::log(t[i]));
    tab->log_a.push_back(std::log(a[i]));
  }
  if (tab->log_t.size() < 2) throw ConfigError("young table: need at least two positive rows");
  for (std::size_t i = 0; i + 1 < tab->log_t.size(); ++i) {
    tab->slope.push_back((tab->log_a[i + 1] - tab->log_a[i]) / (tab->log_t[i + 1] - tab->log_t[i]));
  }
  return tab;
}

void validate_table(const YoungFunction& A) {
  const auto& tab = *A.table();
  if (tab.slope.front() < 1.0 - 1e-9) throw ConfigError("young table: not convex near 0 (log-log slope below 1)");
  for (double s : tab.slope) {
    if (!(s > 0)) throw ConfigError("young table: A is not strictly increasing");
  }
  // discrete convexity of the table points: secant slopes non-decreasing
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < tab.log_t.size(); ++i) {
    const double t0 = std::exp(tab.log_t[i]), t1 = std::exp(tab.log_t[i + 1]);
    const double s = (std::exp(tab.log_a[i + 1]) - std::exp(tab.log_a[i])) / (t1 - t0);
    if (s < prev * (1.0 - 1e-7)) throw ConfigError("young table: A is not convex");
    prev = s;
  }
  const double lo = std::exp(tab.log_t.front()), hi = std::exp(tab.log_t.back());
  const auto probes = log_probes(lo, hi, 64);
  const double r0 = A(probes.front()) / probes.front();
  const double r1 = A(probes.back()) / probes.back();
  if (!(r1 >= 10.0 * r0)) throw ConfigError("young table: A(t)/t does not grow by 10x across the table");
}

double parse_number(const std::string& s, const std::string& field) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("young spec: field '" + field + "' is not a number: '" + s + "'");
  }
}

std::map<std::string, double> parse_params(const std::string& body) {
  std::map<std::string, double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("young spec: expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = parse_number(item.substr(eq + 1), item.substr(0, eq));
  }
  return out;
}

double require(const std::map<std::string, double>& m, const std::string& key, const std::string& family) {
  auto it = m.find(key);
  if (it == m.end()) throw ConfigError("young spec: " + family + " needs '" + key + "'");
  return it->second;
}

}  // namespace

YoungFunction YoungFunction::power(double p) {
  check_positive(p, "p");
  if (p < 1.0) throw ConfigError("young: power exponent must be >= 1");
  YoungFunction a;
  a.family_ = YoungFamily::power;
  a.p_ = p;
  return a;
}

YoungFunction YoungFunction::log_bump(double p, double delta) {
  check_positive(p, "p");
  if (p < 1.0) throw ConfigError("young: log_bump exponent must be >= 1");
  if (!std::isfinite(delta) || p - 1.0 + delta < 0.0) throw ConfigError("young: log_bump needs p - 1 + delta >= 0");
  YoungFunction a;
  a.family_ = YoungFamily::log_bump;
  a.p_ = p;
  a.delta_ = delta;
  return a;
}

YoungFunction YoungFunction::loglog_bump(double p, double delta) {
  check_positive(p, "p");
  if (p < 1.0) throw ConfigError("young: loglog_bump exponent must be >= 1");
  if (!std::isfinite(delta) || p - 1.0 + delta < 0.0) throw ConfigError("young: loglog_bump needs p - 1 + delta >= 0");
  YoungFunction a;
  a.family_ = YoungFamily::loglog_bump;
  a.p_ = p;
  a.delta_ = delta;
  return a;
}

YoungFunction YoungFunction::phi0() {
  YoungFunction a = loglog_bump(2.0, 0.5);
  a.family_ = YoungFamily::phi0;
  return a;
}

YoungFunction YoungFunction::tabulated(std::vector<double> t, std::vector<double> a) {
  YoungFunction y;
  y.family_ = YoungFamily::tabulated;
  y.p_ = 0.0;
  y.table_ = build_table(t, a);
  validate_table(y);
  return y;
}

double YoungFunction::operator()(double t) const {
  if (!(t >= 0)) throw ConfigError("young: argument must be >= 0");
  if (t == 0.0) return 0.0;
  switch (family_) {
    case YoungFamily::power:
      return pow_abs(t, p_);
    case YoungFamily::log_bump:
      return std::pow(t, p_) * std::pow(std::log(kE + t), p_ - 1.0 + delta_);
    case YoungFamily::loglog_bump:
    case YoungFamily::phi0:
      return std::pow(t, p_) * std::pow(std::log(kE + t), p_ - 1.0) *
             std::pow(std::log(std::log(kEe + t)), p_ - 1.0 + delta_);
    case YoungFamily::tabulated: {
      const double u = std::log(t);
      const std::size_t i = segment(*table_, u);
      return std::exp(table_->log_a[i] + table_->slope[i] * (u - table_->log_t[i]));
    }
  }
  return 0.0;
}

double YoungFunction::derivative(double t) const {
  if (!(t >= 0)) throw ConfigError("young: argument must be >= 0");
  switch (family_) {
    case YoungFamily::power:
      if (t == 0.0) return p_ == 1.0 ? 1.0 : 0.0;
      return p_ * std::pow(t, p_ - 1.0);
    case YoungFamily::log_bump: {
      if (t == 0.0) return p_ == 1.0 ? 1.0 : 0.0;
      const double L = std::log(kE + t), a = p_ - 1.0 + delta_;
      return std::pow(t, p_ - 1.0) * std::pow(L, a) * (p_ + a * t / ((kE + t) * L));
    }
    case YoungFamily::loglog_bump:
    case YoungFamily::phi0: {
      if (t == 0.0) return p_ == 1.0 ? 1.0 : 0.0;
      const double L = std::log(kE + t), LL = std::log(kEe + t), M = std::log(LL), b = p_ - 1.0 + delta_;
      const double base = std::pow(t, p_ - 1.0) * std::pow(L, p_ - 1.0) * std::pow(M, b);
      return base * (p_ + (p_ - 1.0) * t / ((kE + t) * L) + b * t / ((kEe + t) * LL * M));
    }
    case YoungFamily::tabulated: {
      if (t == 0.0) return table_->slope.front() == 1.0 ? (*this)(1.0) : 0.0;
      const std::size_t i = segment(*table_, std::log(t));
      return table_->slope[i] * (*this)(t) / t;
    }
  }
  return 0.0;
}

std::string YoungFunction::spec() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case YoungFamily::power:
      os << "power:p=" << p_;
      break;
    case YoungFamily::log_bump:
      os << "logbump:p=" << p_ << ",delta=" << delta_;
      break;
    case YoungFamily::loglog_bump:
      os << "loglogbump:p=" << p_ << ",delta=" << delta_;
      break;
    case YoungFamily::phi0:
      os << "phi0";
      break;
    case YoungFamily::tabulated:
      if (complement_of_) {
        os << "complement(" << complement_of_->spec() << ")";
      } else {
        os << "table:" << table_->log_t.size() << "pts";
      }
      break;
  }
  return os.str();
}

double eval(const YoungFunction& a, double t) { return a(t); }

double inverse(const YoungFunction& a, double s) {
  if (!(s >= 0) || !std::isfinite(s)) throw ConfigError("young inverse: argument must be finite and >= 0");
  if (s == 0.0) return 0.0;
  if (a.family() == YoungFamily::power) return std::pow(s, 1.0 / a.p());
  double lo = 0.0, hi = 1.0;
  const double cap = std::ldexp(1.0, 128);
  while (a(hi) < s) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap) throw NumericalError("young inverse: bracket exceeded 2^128", hi);
  }
  // safeguarded Newton inside the bracket [lo, hi]
  double t = 0.5 * (lo + hi);
  // relative in s: A is tiny near 0 and an absolute residual would stop at once
  const double tol = 1e-10 * s;
  for (int it = 0; it < 200; ++it) {
    const double v = a(t) - s;
    if (std::abs(v) <= 1e-4 * tol) return t;
    if (v > 0) hi = t; else lo = t;
    const double d = a.derivative(t);
    double next = d > 0 ? t - v / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) {
      t = next;
      break;
    }
    t = next;
  }
  if (std::abs(a(t) - s) > tol) throw NumericalError("young inverse: residual above tolerance", t);
  return t;
}

YoungFunction complementary(const YoungFunction& a, int points, double t_min, double t_max) {
  if (points < 2 || !(t_min > 0) || !(t_max > t_min)) throw ConfigError("complementary: bad tabulation grid");
  if (a.family() == YoungFamily::power && a.p() == 1.0)
    throw ConfigError("complementary: A(t) = t is not superlinear; its complement is not finite");
  const auto ts = log_probes(t_min, t_max, points);
  std::vector<double> values(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    // the maximiser s* solves A'(s) = t; A' is non-decreasing
    double lo = 0.0, hi = 1.0;
    while (a.derivative(hi) < t) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw NumericalError("complementary: slope root bracket overflow", hi);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (a.derivative(mid) < t) lo = mid; else hi = mid;
    }
    const double root = 0.5 * (lo + hi);
    auto g = [&](double s) { return s * t - a(s); };
    double x0 = 0.5 * root, x3 = 2.0 * root;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = x3 - r * (x3 - x0), x2 = x0 + r * (x3 - x0);
    double g1 = g(x1), g2 = g(x2);
    for (int it = 0; it < 200 && x3 - x0 > 1e-15 * x3; ++it) {
      if (g1 < g2) {
        x0 = x1;
        x1 = x2;
        g1 = g2;
        x2 = x0 + r * (x3 - x0);
        g2 = g(x2);
      } else {
        x3 = x2;
        x2 = x1;
        g2 = g1;
        x1 = x3 - r * (x3 - x0);
        g1 = g(x1);
      }
    }
    values[k] = std::max({g1, g2, g(root), 0.0});
    if (!(values[k] > 0)) throw NumericalError("complementary: non-positive Legendre value", values[k]);
  }
  YoungFunction out;
  out.family_ = YoungFamily::tabulated;
  out.p_ = 0.0;
  out.table_ = build_table(ts, values);
  out.complement_of_ = std::make_shared<const YoungFunction>(a);
  return out;
}

namespace {

BpVerdict closed_form_bp(const YoungFunction& a, double p) {
  BpVerdict v;
  v.p = p;
  v.method = BpMethod::closed_form;
  switch (a.family()) {
    case YoungFamily::power:
    case YoungFamily::log_bump:
    case YoungFamily::loglog_bump:
    case YoungFamily::phi0:
      // a bump t^q L(t) with L slowly growing is in B_p exactly when q < p
      v.member = a.p() < p;
      break;
    case YoungFamily::tabulated: {
      // complement of a built-in with exponent q: Abar ~ t^{q'} times a slowly decaying factor
      const YoungFunction& base = *a.complement_of();
      const double q = base.p();
      const double qc = q / (q - 1.0);
      // power: Abar = c t^{q'}; bumps: t^{q'} over a log or loglog factor with exponent above 1 when delta > 0
      const bool boundary = std::abs(qc - p) <= 1e-12 * p;
      v.member = qc < p || (boundary && base.family() != YoungFamily::power && base.delta() > 0);
      break;
    }
  }
  return v;
}

void numeric_tail(const YoungFunction& a, double p, BpVerdict& v) {
  // int_1^T A(t) t^{-p-1} dt = int_0^{log T} A(e^u) e^{-p u} du, per decade
  const double ln10 = std::log(10.0);
  std::vector<double> inc;
  double total = 0.0;
  for (int d = 0; d < 12; ++d) {
    auto g = [&](double u) { return std::exp(std::log(std::max(a(std::exp(u)), 1e-300)) - p * u); };
    const double part = integrate(g, d * ln10, (d + 1) * ln10, 1e-300, 1e-10).value;
    inc.push_back(part);
    total += part;
  }
  v.tail_estimate = total;
  // fit log(increment) against log(decade index) on the upper half
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  bool decreasing = true;
  for (int d = 6; d < 12; ++d) {
    if (d > 6 && inc[d] > inc[d - 1] * (1 + 1e-9)) decreasing = false;
    if (!(inc[d] > 0)) continue;
    const double x = std::log(d + 1.0), y = std::log(inc[d]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  v.increments_decreasing = decreasing;
  v.decay_exponent = n >= 2 ? -(n * sxy - sx * sy) / (n * sxx - sx * sx) : std::numeric_limits<double>::infinity();
}

}  // namespace

BpVerdict bp_classify(const YoungFunction& a, double p) {
  if (!(p > 1.0)) throw ConfigError("bp_classify: p must exceed 1");
  BpVerdict v;
  const bool closed = a.family() != YoungFamily::tabulated ||
                      (a.complement_of() != nullptr && a.complement_of()->family() != YoungFamily::tabulated);
  if (closed) {
    v = closed_form_bp(a, p);
  }
  v.p = p;
  numeric_tail(a, p, v);
  if (!closed) {
    v.method = BpMethod::numeric_tail;
    v.member = v.increments_decreasing && v.decay_exponent > 1.5;
  }
  return v;
}

double luxemburg_norm(const Samples& s, const YoungFunction& a) {
  const Eigen::Index n = s.values.size();
  double vmax = 0.0, mean = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = s.values[i];
    if (!std::isfinite(v)) throw DataError("luxemburg: non-finite sample");
    vmax = std::max(vmax, v);
    mean += s.weights[i] * v;
  }
  if (vmax == 0.0) return 0.0;
  auto constraint = [&](double lambda) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (s.values[i] > 0) acc += s.weights[i] * a(s.values[i] / lambda);
    }
    return acc;
  };
  // Jensen: at lo the constraint is >= 1; at hi every sample has A(v/hi) <= 1
  const double a1 = inverse(a, 1.0);
  double lo = mean / a1, hi = vmax / a1;
  if (!(lo > 0)) lo = hi * 1e-300;
  for (int it = 0; it < 400; ++it) {
    if (hi / lo - 1.0 < 1e-14) break;
    const double mid = std::sqrt(lo * hi);
    const double c = constraint(mid);
    if (c > 1.0) {
      lo = mid;
    } else {
      hi = mid;
      if (c >= 1.0 - 1e-12) break;
    }
  }
  return hi;
}

double luxemburg(const SampledFunction& f, const CellRange& Q, const YoungFunction& a) {
  check_range(f.domain(), Q);
  return luxemburg_norm(gather_abs_samples(f, Q), a);
}

namespace {

// every cell-aligned interval: out[i] = max_{a <= i < b} v(a, b)
template <class Value>
RealVector exhaustive_sup(std::size_t n, Value value) {
  RealVector out = RealVector::Zero(static_cast<Eigen::Index>(n));
  std::vector<RealVector> rows(n);
  parallel_for(n, [&](std::size_t a) {
    RealVector suffix(static_cast<Eigen::Index>(n - a));
    double best = 0.0;
    std::vector<double> v(n - a);
    for (std::size_t b = a + 1; b <= n; ++b) v[b - a - 1] = value(a, b);
    for (std::size_t j = n - a; j-- > 0;) {
      best = std::max(best, v[j]);
      suffix[static_cast<Eigen::Index>(j)] = best;  // best over b > a + j
    }
    rows[a] = std::move(suffix);
  });
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = a; i < n; ++i) {
      auto& o = out[static_cast<Eigen::Index>(i)];
      o = std::max(o, rows[a][static_cast<Eigen::Index>(i - a)]);
    }
  }
  return out;
}

}  // namespace

SampledFunction orlicz_maximal(const SampledFunction& f, const YoungFunction& a, const MaximalScan& scan) {
  const Domain& dom = f.domain();
  const std::size_t n = dom.n_cells();
  RealVector out = RealVector::Zero(static_cast<Eigen::Index>(n));
  const bool is_m = a.family() == YoungFamily::power && a.p() == 1.0;
  if (scan.exhaustive) {
    if (is_m) {
      std::vector<double> prefix(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const Samples s = gather_abs_samples(f, {i, i + 1});
        prefix[i + 1] = prefix[i] + s.values.dot(s.weights);
      }
      out = exhaustive_sup(n, [&](std::size_t l, std::size_t r) {
        return (prefix[r] - prefix[l]) / static_cast<double>(r - l);
      });
    } else {
      if (n > 1024) throw ConfigError("orlicz_maximal: exhaustive mode with a general Young function needs n_cells <= 1024");
      out = exhaustive_sup(n, [&](std::size_t l, std::size_t r) { return luxemburg(f, CellRange{l, r}, a); });
    }
  } else {
    const auto intervals = dyadic_scan(dom, scan.schedule);
    std::vector<double> vals(intervals.size());
    parallel_for(intervals.size(), [&](std::size_t k) { vals[k] = luxemburg(f, intervals[k].cells, a); });
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      for (std::size_t i = intervals[k].cells.begin; i < intervals[k].cells.end; ++i) {
        auto& o = out[static_cast<Eigen::Index>(i)];
        o = std::max(o, vals[k]);
      }
    }
  }
  return SampledFunction(dom, out.cast<Complex>());
}

YoungFunction parse_young(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  if (head == "phi0") {
    if (!body.empty()) throw ConfigError("young spec: phi0 takes no parameters");
    return YoungFunction::phi0();
  }
  if (head == "table") {
    if (body.empty()) throw ConfigError("young spec: table needs a path");
    return read_young_table(body);
  }
  const auto params = parse_params(body);
  if (head == "power") return YoungFunction::power(require(params, "p", head));
  if (head == "logbump") return YoungFunction::log_bump(require(params, "p", head), require(params, "delta", head));
  if (head == "loglogbump")
    return YoungFunction::loglog_bump(require(params, "p", head), require(params, "delta", head));
  throw ConfigError("young spec: unknown family '" + head + "'");
}

YoungFunction read_young_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("young table: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("young table: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,A") throw DataError("young table: header must be 't,A'");
  std::vector<double> t, a;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError("young table: row " + std::to_string(row) + " lacks a comma");
    try {
      t.push_back(std::stod(line.substr(0, comma)));
      a.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw DataError("young table: row " + std::to_string(row) + " is not numeric");
    }
  }
  return YoungFunction::tabulated(std::move(t), std::move(a));
}

std::vector<double> log_probes(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi > lo) || count < 2) throw ConfigError("log_probes: need 0 < lo < hi and count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

DualityRange duality_sandwich(const YoungFunction& a, const YoungFunction& abar, const std::vector<double>& probes) {
  DualityRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (double t : probes) {
    const double ratio = inverse(a, t) * inverse(abar, t) / t;
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  return r;
}

double dominance_constant(const YoungFunction& a, const YoungFunction& b, const std::vector<double>& probes) {
  double c = 1.0;
  for (double t : probes) c = std::max(c, a(t) / b(t));
  return c;
}

double inverse_product_constant(const YoungFunction& a, const YoungFunction& b, const YoungFunction& c,
                                const std::vector<double>& probes, double t0) {
  double best = 0.0;
  for (double t : probes) {
    if (t < t0) continue;
    best = std::max(best, inverse(b, t) * inverse(c, t) / inverse(a, t));
  }
  return best;
}

}  // namespace jointosc
