#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "jointosc/error.hpp"

namespace jointosc {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// A window [left, right) of the line cut into 2^J equal cells.
class Domain {
 public:
  Domain() = default;
  Domain(double left, double right, std::size_t n_cells);

  double left() const { return left_; }
  double right() const { return right_; }
  double length() const { return right_ - left_; }
  std::size_t n_cells() const { return n_cells_; }
  /// J with n_cells = 2^J.
  int depth() const { return depth_; }
  double cell_width() const { return length() / static_cast<double>(n_cells_); }

  double cell_left(std::size_t i) const { return left_ + cell_width() * static_cast<double>(i); }
  double cell_right(std::size_t i) const { return cell_left(i + 1); }
  double midpoint(std::size_t i) const { return left_ + cell_width() * (static_cast<double>(i) + 0.5); }

  /// Index of the cell containing x; throws DomainMismatch outside [left, right).
  std::size_t cell_of(double x) const;

  /// Same window at twice the resolution.
  Domain refined() const { return Domain(left_, right_, 2 * n_cells_); }

  bool operator==(const Domain& other) const {
    return left_ == other.left_ && right_ == other.right_ && n_cells_ == other.n_cells_;
  }

 private:
  double left_ = 0.0;
  double right_ = 1.0;
  std::size_t n_cells_ = 1;
  int depth_ = 0;
};

/// Half-open run of whole cells [begin, end).
struct CellRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool contains(const CellRange& r) const { return r.begin >= begin && r.end <= end; }
  bool operator==(const CellRange& o) const { return begin == o.begin && end == o.end; }
};

/// Cell range covering [a, b); both endpoints must sit on cell boundaries (to 1e-9 cells).
CellRange cells_of(const Domain& domain, double a, double b);

/// Dyadic interval of the window: level l splits the window into 2^l pieces.
struct DyadicInterval {
  int level = 0;
  std::size_t index = 0;

  CellRange cells(const Domain& domain) const;
  double left(const Domain& domain) const;
  double right(const Domain& domain) const;
  DyadicInterval parent() const { return {level - 1, index / 2}; }
  DyadicInterval child(int which) const { return {level + 1, 2 * index + static_cast<std::size_t>(which)}; }
  bool operator==(const DyadicInterval& o) const { return level == o.level && index == o.index; }
};

/// The dyadic interval whose cells are exactly `r`; throws ConfigError if `r` is not dyadic.
DyadicInterval dyadic_from_cells(const Domain& domain, const CellRange& r);

/// Per-cell quadrature on the reference cell [0, 1]: offsets and weights summing to one.
struct CellRule {
  RealVector offsets;
  RealVector weights;
  int size() const { return static_cast<int>(offsets.size()); }
};

/// Gauss-Legendre rule with k points mapped to [0, 1].
const CellRule& gauss_legendre_rule(int k);

/// Number of sub-cell nodes carried by exact-cell-average functions.
inline constexpr int kDefaultNodesPerCell = 4;

enum class Provenance { sampled, exact_cell_average };

/// Complex function on a Domain, stored as one value per cell (the cell average).
///
/// Exact-cell-average functions additionally carry point values at the
/// Gauss-Legendre nodes of every cell. Those nodes feed every nonlinear cell
/// mean (|f|^p, Young functions of |f|, coupled products) while `values`
/// stays the exact cell average.
class SampledFunction {
 public:
  SampledFunction() = default;
  /// Sampled provenance: the values are taken as cell averages, constant on each cell.
  SampledFunction(Domain domain, ComplexVector values);
  /// Exact provenance: exact averages plus point values, nodes(j, i) = f(cell_left(i) + offset_j h).
  SampledFunction(Domain domain, ComplexVector averages, Eigen::MatrixXcd nodes);

  static SampledFunction constant(const Domain& domain, Complex c);
  static SampledFunction zero(const Domain& domain) { return constant(domain, 0.0); }
  /// Sampled function with values g(midpoint) (for smooth test data only).
  static SampledFunction from_midpoints(const Domain& domain, const std::function<Complex(double)>& g);

  const Domain& domain() const { return domain_; }
  const ComplexVector& values() const { return values_; }
  Provenance provenance() const { return provenance_; }
  bool has_nodes() const { return nodes_.size() > 0; }
  const Eigen::MatrixXcd& nodes() const { return nodes_; }
  Complex operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  int samples_per_cell() const { return has_nodes() ? static_cast<int>(nodes_.rows()) : 1; }
  double sample_weight(int j) const;
  Complex sample(std::size_t cell, int j) const;

  /// Drop sub-cell nodes; the result is the piecewise-constant function of cell averages.
  SampledFunction as_sampled() const { return SampledFunction(domain_, values_); }
  /// Zero outside the cells of `keep`.
  SampledFunction restricted(const CellRange& keep) const;

  SampledFunction& operator+=(const SampledFunction& other);
  SampledFunction& operator*=(Complex c);

 private:
  Domain domain_;
  ComplexVector values_;
  Eigen::MatrixXcd nodes_;
  Provenance provenance_ = Provenance::sampled;
};

SampledFunction operator+(SampledFunction a, const SampledFunction& b);
SampledFunction operator*(Complex c, SampledFunction f);
/// Cellwise product of cell values (sampled provenance).
SampledFunction cellwise_product(const SampledFunction& a, const SampledFunction& b);

/// Throws DomainMismatch unless `r` lies inside the domain.
void check_range(const Domain& domain, const CellRange& r);

/// Mean of the stored cell averages over the cells of Q.
Complex average(const SampledFunction& f, const CellRange& Q);
inline Complex average(const SampledFunction& f, const DyadicInterval& Q) {
  return average(f, Q.cells(f.domain()));
}

/// (<|f|^p>_Q)^{1/p}; p >= 1.
double lp_average(const SampledFunction& f, const CellRange& Q, double p);
inline double lp_average(const SampledFunction& f, const DyadicInterval& Q, double p) {
  return lp_average(f, Q.cells(f.domain()), p);
}

/// (<|f - <f>_Q|^p>_Q)^{1/p}: the centered p-oscillation on Q.
double centered_oscillation(const SampledFunction& f, const CellRange& Q, double p);

/// Samples of |f - shift| over Q with weights summing to one over the interval.
struct Samples {
  RealVector values;
  RealVector weights;
};
Samples gather_abs_samples(const SampledFunction& f, const CellRange& Q, Complex shift = 0.0);

/// |x|^p with the common exponents special-cased.
inline double pow_abs(double x, double p) {
  x = x < 0 ? -x : x;
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

struct ScanSchedule {
  int min_level = 0;
  int max_level = -1;  // -1: domain depth
  bool one_third_shift = true;
};

/// One interval produced by a scan.
struct ScannedInterval {
  int level = 0;
  CellRange cells;
  bool shifted = false;
};

/// Every dyadic interval of the requested levels, followed at each level by
/// the copies translated by round(length/3) cells that stay inside the window.
/// Ordered by level, then by start cell with dyadic copies first.
std::vector<ScannedInterval> dyadic_scan(const Domain& domain, const ScanSchedule& schedule);

/// Resolved level bounds; throws ConfigError when outside 0..J.
std::pair<int, int> resolve_levels(const Domain& domain, const ScanSchedule& schedule);

/// CSV with header `x,re,im`, one row per cell midpoint.
SampledFunction read_function_csv(std::istream& in);
SampledFunction read_function_csv(const std::string& path);
void write_function_csv(std::ostream& out, const SampledFunction& f);
void write_function_csv(const std::string& path, const SampledFunction& f);

/// Worker count from JOINTOSC_THREADS (default 1).
int thread_count();

/// Runs body(i) for i in [0, n) on thread_count() workers; callers store results by index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace jointosc
