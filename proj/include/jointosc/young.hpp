#pragma once

#include <memory>
#include <string>
#include <vector>

#include "jointosc/grid.hpp"

namespace jointosc {

enum class YoungFamily { power, log_bump, loglog_bump, phi0, tabulated };

/// Convex growth function A with A(0) = 0.
///
/// Built-in families:
///   power(p)            t^p
///   log_bump(p, d)      t^p log(e+t)^(p-1+d)
///   loglog_bump(p, d)   t^p log(e+t)^(p-1) loglog(e^e+t)^(p-1+d)
///   phi0                t^2 log(e+t) loglog(e^e+t)^(3/2)
/// Tabulated functions interpolate log-linearly in log t and extrapolate the
/// end segments as power laws.
class YoungFunction {
 public:
  static YoungFunction power(double p);
  static YoungFunction log_bump(double p, double delta);
  static YoungFunction loglog_bump(double p, double delta);
  static YoungFunction phi0();
  /// Points (t_i, A_i) with t_i > 0 increasing; validated on construction.
  static YoungFunction tabulated(std::vector<double> t, std::vector<double> a);

  YoungFamily family() const { return family_; }
  double p() const { return p_; }
  double delta() const { return delta_; }

  double operator()(double t) const;
  double derivative(double t) const;

  /// The built-in function this table is the complement of, if any.
  const YoungFunction* complement_of() const { return complement_of_.get(); }

  /// CLI spelling, e.g. `logbump:p=2,delta=1`.
  std::string spec() const;

  struct Table {
    std::vector<double> log_t;
    std::vector<double> log_a;
    std::vector<double> slope;  // d log A / d log t on each segment
  };
  const Table* table() const { return table_.get(); }

 private:
  friend YoungFunction complementary(const YoungFunction& a, int points, double t_min, double t_max);
  YoungFamily family_ = YoungFamily::power;
  double p_ = 2.0;
  double delta_ = 0.0;
  std::shared_ptr<const Table> table_;
  std::shared_ptr<const YoungFunction> complement_of_;
};

double eval(const YoungFunction& a, double t);

/// The t >= 0 with A(t) = s; residual below 1e-10 max(1, s).
double inverse(const YoungFunction& a, double s);

/// Tabulated Legendre transform sup_s {st - A(s)} on a log-spaced grid.
YoungFunction complementary(const YoungFunction& a, int points = 512, double t_min = 1e-6, double t_max = 1e12);

enum class BpMethod { closed_form, numeric_tail };

struct BpVerdict {
  double p = 2.0;
  bool member = false;
  BpMethod method = BpMethod::closed_form;
  /// int_1^T A(t) t^{-p-1} dt at T = 1e12.
  double tail_estimate = 0.0;
  /// Fitted exponent a in (per-decade increment) ~ decade^{-a} over the upper decades.
  double decay_exponent = 0.0;
  bool increments_decreasing = false;
};

/// Membership in B_p: int_1^inf A(t) t^{-p} dt/t < inf.
BpVerdict bp_classify(const YoungFunction& a, double p);

/// inf{lambda > 0 : sum_i w_i A(v_i / lambda) <= 1} for nonnegative samples.
double luxemburg_norm(const Samples& samples, const YoungFunction& a);

/// <|f|>_{A,Q}.
double luxemburg(const SampledFunction& f, const CellRange& Q, const YoungFunction& a);
inline double luxemburg(const SampledFunction& f, const DyadicInterval& Q, const YoungFunction& a) {
  return luxemburg(f, Q.cells(f.domain()), a);
}

/// Interval family for maximal functions: a dyadic scan, or every cell-aligned
/// interval of the window (quadratic count; meant for small grids).
struct MaximalScan {
  ScanSchedule schedule;
  bool exhaustive = false;
};

/// Per-cell supremum of <|f|>_{A,I} over scanned intervals I containing the cell.
SampledFunction orlicz_maximal(const SampledFunction& f, const YoungFunction& a, const MaximalScan& scan = {});

/// Parses `power:p=2`, `logbump:p=2,delta=1`, `loglogbump:p=2,delta=0.5`, `phi0`, `table:<path>`.
YoungFunction parse_young(const std::string& spec);

/// CSV with header `t,A`.
YoungFunction read_young_table(const std::string& path);

/// Log-spaced probe grid.
std::vector<double> log_probes(double lo, double hi, int count);

struct DualityRange {
  double min_ratio = 0.0;  // min over probes of A^{-1}(t) Abar^{-1}(t) / t
  double max_ratio = 0.0;
};

/// Ratios A^{-1}(t) Abar^{-1}(t) / t over the probes.
DualityRange duality_sandwich(const YoungFunction& a, const YoungFunction& abar, const std::vector<double>& probes);

/// max(1, sup_t A(t)/B(t)) over the probes: <|f|>_A <= C <|f|>_B when A <= C B.
double dominance_constant(const YoungFunction& a, const YoungFunction& b, const std::vector<double>& probes);

/// Smallest c with B^{-1}(t) C^{-1}(t) <= c A^{-1}(t) over probes t >= t0.
double inverse_product_constant(const YoungFunction& a, const YoungFunction& b, const YoungFunction& c,
                                const std::vector<double>& probes, double t0);

}  // namespace jointosc
