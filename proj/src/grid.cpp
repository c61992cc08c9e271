#include "jointosc/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace jointosc {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  int j = 0;
  while ((std::size_t{1} << j) < n) ++j;
  return j;
}

CellRule make_gauss_legendre(int k) {
  CellRule rule;
  rule.offsets.resize(k);
  rule.weights.resize(k);
  for (int i = 0; i < k; ++i) {
    // Newton on P_k starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= k; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      const double pk = k == 0 ? 1.0 : (k == 1 ? x : p1);
      const double pkm1 = k == 1 ? 1.0 : p0;
      dp = k * (x * pk - pkm1) / (x * x - 1.0);
      const double dx = pk / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int n = 2; n <= k; ++n) {
      const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      p0 = p1;
      p1 = p2;
    }
    const double pk = k == 1 ? x : p1;
    const double pkm1 = k == 1 ? 1.0 : p0;
    dp = k * (x * pk - pkm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] to [0, 1]; ascending order.
    rule.offsets[k - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[k - 1 - i] = 0.5 * w;
  }
  rule.weights /= rule.weights.sum();
  return rule;
}

}  // namespace

Domain::Domain(double left, double right, std::size_t n_cells)
    : left_(left), right_(right), n_cells_(n_cells) {
  if (!(left < right) || !std::isfinite(left) || !std::isfinite(right)) {
    throw ConfigError("domain: need finite left < right");
  }
  if (!is_power_of_two(n_cells)) {
    throw ConfigError("domain: n_cells must be a power of two, got " + std::to_string(n_cells));
  }
  depth_ = log2_exact(n_cells);
}

std::size_t Domain::cell_of(double x) const {
  if (!(x >= left_ && x < right_)) {
    std::ostringstream msg;
    msg << "point " << x << " outside window [" << left_ << ", " << right_ << ")";
    throw DomainMismatch(msg.str());
  }
  auto i = static_cast<std::size_t>((x - left_) / cell_width());
  return std::min(i, n_cells_ - 1);
}

CellRange cells_of(const Domain& domain, double a, double b) {
  const double h = domain.cell_width();
  const double ia = (a - domain.left()) / h;
  const double ib = (b - domain.left()) / h;
  const double ra = std::round(ia), rb = std::round(ib);
  if (std::abs(ia - ra) > 1e-9 || std::abs(ib - rb) > 1e-9 || ra < 0 || rb > static_cast<double>(domain.n_cells()) ||
      rb <= ra) {
    std::ostringstream msg;
    msg << "interval [" << a << ", " << b << ") is not a cell-aligned subinterval of the window";
    throw DomainMismatch(msg.str());
  }
  return {static_cast<std::size_t>(ra), static_cast<std::size_t>(rb)};
}

CellRange DyadicInterval::cells(const Domain& domain) const {
  if (level < 0 || level > domain.depth()) {
    throw DomainMismatch("dyadic level " + std::to_string(level) + " outside 0.." + std::to_string(domain.depth()));
  }
  const std::size_t width = std::size_t{1} << (domain.depth() - level);
  if (index >= (std::size_t{1} << level)) {
    throw DomainMismatch("dyadic index " + std::to_string(index) + " outside level " + std::to_string(level));
  }
  return {index * width, (index + 1) * width};
}

double DyadicInterval::left(const Domain& domain) const {
  return domain.left() + domain.length() * static_cast<double>(index) / std::ldexp(1.0, level);
}

double DyadicInterval::right(const Domain& domain) const {
  return domain.left() + domain.length() * static_cast<double>(index + 1) / std::ldexp(1.0, level);
}

DyadicInterval dyadic_from_cells(const Domain& domain, const CellRange& r) {
  const std::size_t w = r.size();
  if (!is_power_of_two(w) || r.begin % w != 0 || r.end > domain.n_cells()) {
    throw ConfigError("cell range is not a dyadic interval of the window");
  }
  return {domain.depth() - log2_exact(w), r.begin / w};
}

const CellRule& gauss_legendre_rule(int k) {
  if (k < 1 || k > 64) throw ConfigError("gauss_legendre_rule: k must be in 1..64");
  static std::mutex mutex;
  static std::map<int, CellRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, make_gauss_legendre(k)).first;
  return it->second;
}

SampledFunction::SampledFunction(Domain domain, ComplexVector values)
    : domain_(domain), values_(std::move(values)), provenance_(Provenance::sampled) {
  if (static_cast<std::size_t>(values_.size()) != domain_.n_cells()) {
    throw DataError("sampled function: expected " + std::to_string(domain_.n_cells()) + " values, got " +
                    std::to_string(values_.size()));
  }
  if (!values_.allFinite()) throw DataError("sampled function: non-finite value");
}

SampledFunction::SampledFunction(Domain domain, ComplexVector averages, Eigen::MatrixXcd nodes)
    : domain_(domain), values_(std::move(averages)), nodes_(std::move(nodes)),
      provenance_(Provenance::exact_cell_average) {
  if (static_cast<std::size_t>(values_.size()) != domain_.n_cells() ||
      static_cast<std::size_t>(nodes_.cols()) != domain_.n_cells()) {
    throw DataError("exact function: size does not match the domain");
  }
  if (!values_.allFinite() || !nodes_.allFinite()) throw DataError("exact function: non-finite value");
  gauss_legendre_rule(static_cast<int>(nodes_.rows()));
}

SampledFunction SampledFunction::constant(const Domain& domain, Complex c) {
  return SampledFunction(domain, ComplexVector::Constant(static_cast<Eigen::Index>(domain.n_cells()), c));
}

SampledFunction SampledFunction::from_midpoints(const Domain& domain, const std::function<Complex(double)>& g) {
  ComplexVector v(static_cast<Eigen::Index>(domain.n_cells()));
  for (std::size_t i = 0; i < domain.n_cells(); ++i) v[static_cast<Eigen::Index>(i)] = g(domain.midpoint(i));
  return SampledFunction(domain, std::move(v));
}

double SampledFunction::sample_weight(int j) const {
  if (!has_nodes()) return 1.0;
  return gauss_legendre_rule(static_cast<int>(nodes_.rows())).weights[j];
}

Complex SampledFunction::sample(std::size_t cell, int j) const {
  const auto c = static_cast<Eigen::Index>(cell);
  return has_nodes() ? nodes_(j, c) : values_[c];
}

SampledFunction SampledFunction::restricted(const CellRange& keep) const {
  SampledFunction out = *this;
  for (std::size_t i = 0; i < size(); ++i) {
    if (keep.contains(i)) continue;
    const auto c = static_cast<Eigen::Index>(i);
    out.values_[c] = 0.0;
    if (has_nodes()) out.nodes_.col(c).setZero();
  }
  return out;
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& other) {
  if (!(domain_ == other.domain_)) throw DomainMismatch("sum of functions on different domains");
  values_ += other.values_;
  if (has_nodes() && other.has_nodes() && nodes_.rows() == other.nodes_.rows()) {
    nodes_ += other.nodes_;
  } else if (has_nodes() || other.has_nodes()) {
    nodes_.resize(0, 0);
    provenance_ = Provenance::sampled;
  }
  return *this;
}

SampledFunction& SampledFunction::operator*=(Complex c) {
  values_ *= c;
  nodes_ *= c;
  return *this;
}

SampledFunction operator+(SampledFunction a, const SampledFunction& b) {
  a += b;
  return a;
}

SampledFunction operator*(Complex c, SampledFunction f) {
  f *= c;
  return f;
}

SampledFunction cellwise_product(const SampledFunction& a, const SampledFunction& b) {
  if (!(a.domain() == b.domain())) throw DomainMismatch("product of functions on different domains");
  return SampledFunction(a.domain(), a.values().cwiseProduct(b.values()));
}

void check_range(const Domain& domain, const CellRange& r) {
  if (r.empty() || r.end > domain.n_cells()) {
    throw DomainMismatch("interval cells [" + std::to_string(r.begin) + ", " + std::to_string(r.end) +
                         ") not inside a window of " + std::to_string(domain.n_cells()) + " cells");
  }
}

Complex average(const SampledFunction& f, const CellRange& Q) {
  check_range(f.domain(), Q);
  return f.values().segment(static_cast<Eigen::Index>(Q.begin), static_cast<Eigen::Index>(Q.size())).mean();
}

namespace {

// <|f - shift|^p>_Q from the per-cell samples.
double abs_power_mean(const SampledFunction& f, const CellRange& Q, Complex shift, double p) {
  const int k = f.samples_per_cell();
  double total = 0.0;
  if (!f.has_nodes()) {
    for (std::size_t i = Q.begin; i < Q.end; ++i) total += pow_abs(std::abs(f[i] - shift), p);
  } else {
    const RealVector& w = gauss_legendre_rule(k).weights;
    const auto& nodes = f.nodes();
    for (std::size_t i = Q.begin; i < Q.end; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      double cell = 0.0;
      for (int j = 0; j < k; ++j) cell += w[j] * pow_abs(std::abs(nodes(j, c) - shift), p);
      total += cell;
    }
  }
  return total / static_cast<double>(Q.size());
}

}  // namespace

double lp_average(const SampledFunction& f, const CellRange& Q, double p) {
  if (!(p >= 1.0)) throw ConfigError("lp_average: p must be >= 1");
  check_range(f.domain(), Q);
  return std::pow(abs_power_mean(f, Q, 0.0, p), 1.0 / p);
}

double centered_oscillation(const SampledFunction& f, const CellRange& Q, double p) {
  if (!(p >= 1.0)) throw ConfigError("centered_oscillation: p must be >= 1");
  const Complex c = average(f, Q);
  return std::pow(abs_power_mean(f, Q, c, p), 1.0 / p);
}

Samples gather_abs_samples(const SampledFunction& f, const CellRange& Q, Complex shift) {
  check_range(f.domain(), Q);
  const int k = f.samples_per_cell();
  const auto n = static_cast<Eigen::Index>(Q.size()) * k;
  Samples s;
  s.values.resize(n);
  s.weights.resize(n);
  const double inv = 1.0 / static_cast<double>(Q.size());
  if (!f.has_nodes()) {
    s.values = (f.values().segment(static_cast<Eigen::Index>(Q.begin), n).array() - shift).abs();
    s.weights.setConstant(inv);
    return s;
  }
  const RealVector& w = gauss_legendre_rule(k).weights;
  const auto& nodes = f.nodes();
  Eigen::Index at = 0;
  for (std::size_t i = Q.begin; i < Q.end; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    for (int j = 0; j < k; ++j, ++at) {
      s.values[at] = std::abs(nodes(j, c) - shift);
      s.weights[at] = w[j] * inv;
    }
  }
  return s;
}

std::pair<int, int> resolve_levels(const Domain& domain, const ScanSchedule& schedule) {
  const int hi = schedule.max_level < 0 ? domain.depth() : schedule.max_level;
  if (schedule.min_level < 0 || schedule.min_level > hi || hi > domain.depth()) {
    throw ConfigError("scan levels " + std::to_string(schedule.min_level) + ".." + std::to_string(hi) +
                      " outside 0.." + std::to_string(domain.depth()));
  }
  return {schedule.min_level, hi};
}

std::vector<ScannedInterval> dyadic_scan(const Domain& domain, const ScanSchedule& schedule) {
  const auto [lo, hi] = resolve_levels(domain, schedule);
  std::vector<ScannedInterval> out;
  for (int level = lo; level <= hi; ++level) {
    const std::size_t width = domain.n_cells() >> level;
    const std::size_t count = std::size_t{1} << level;
    const auto shift = static_cast<std::size_t>(std::llround(static_cast<double>(width) / 3.0));
    for (std::size_t idx = 0; idx < count; ++idx) {
      out.push_back({level, {idx * width, (idx + 1) * width}, false});
      if (schedule.one_third_shift && shift > 0) {
        const std::size_t b = idx * width + shift;
        if (b + width <= domain.n_cells()) out.push_back({level, {b, b + width}, true});
      }
    }
  }
  return out;
}

SampledFunction read_function_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("function csv: empty input");
  line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
             line.end());
  if (line != "x,re,im") throw DataError("function csv: header must be `x,re,im`, got `" + line + "`");
  std::vector<double> xs;
  std::vector<Complex> vs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, re, im;
    if (!(ls >> x >> re >> im)) throw DataError("function csv: malformed row " + std::to_string(row));
    if (!std::isfinite(x) || !std::isfinite(re) || !std::isfinite(im)) {
      throw DataError("function csv: non-finite entry on row " + std::to_string(row));
    }
    xs.push_back(x);
    vs.emplace_back(re, im);
  }
  if (xs.size() < 2) throw DataError("function csv: need at least two rows");
  if (!is_power_of_two(xs.size())) throw DataError("function csv: row count must be a power of two");
  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(h > 0)) throw DataError("function csv: midpoints must increase");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double d = xs[i] - xs[i - 1];
    if (std::abs(d - h) > 1e-9 * std::abs(h)) {
      throw DataError("function csv: non-uniform spacing at row " + std::to_string(i + 2));
    }
  }
  Domain domain(xs.front() - 0.5 * h, xs.back() + 0.5 * h, xs.size());
  ComplexVector v(static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) v[static_cast<Eigen::Index>(i)] = vs[i];
  return SampledFunction(domain, std::move(v));
}

SampledFunction read_function_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_function_csv(in);
}

void write_function_csv(std::ostream& out, const SampledFunction& f) {
  out << "x,re,im\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << f.domain().midpoint(i) << ',' << f[i].real() << ',' << f[i].imag() << '\n';
  }
}

void write_function_csv(const std::string& path, const SampledFunction& f) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_function_csv(out, f);
}

int thread_count() {
  if (const char* env = std::getenv("JOINTOSC_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace jointosc
