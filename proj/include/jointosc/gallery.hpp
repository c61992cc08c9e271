#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "jointosc/conditions.hpp"
#include "jointosc/grid.hpp"

namespace jointosc {

/// A function with point values and exact integrals over intervals.
struct AnalyticFunction {
  std::function<Complex(double)> value;
  std::function<Complex(double, double)> integral;
};

/// Exact cell averages from `integral`, plus point values at Gauss-Legendre nodes.
SampledFunction sample(const AnalyticFunction& g, const Domain& domain, int nodes = kDefaultNodesPerCell);

struct WindowHint {
  double left = -1.0;
  double right = 1.0;
  std::size_t n_cells = 1024;
};

struct GalleryPair {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  /// c_k per block (nip1 only).
  std::vector<std::pair<int, double>> schedule;
  AnalyticFunction b1;
  AnalyticFunction b2;
  AnalyticFunction product;
  WindowHint window_hint;
  /// Interval the domain must contain.
  double support_left = 0.0;
  double support_right = 0.0;

  SymbolPair on(const Domain& domain) const;
};

/// psi = x^{-2/(p+q)} and phi = 1/psi on (0, 1); b1 = psi, b2 = phi.
GalleryPair make_prop41_pair(double p, double q);

/// Blocks psi_k = c_k (x-k)^{-eta_k} on (k + c_k^{6k} e^{-100k^2}, k+1), k in 4N+2, k <= k_max, and
/// phi = sum over even k of (x-k)^{1/2} on (k, k+1). b1 = psi, b2 = phi.
/// An empty schedule is computed by nip1_schedule.
GalleryPair make_nip1_pair(int k_max = 6, std::vector<std::pair<int, double>> c_schedule = {});

/// The single block psi_k with constant c against the full phi (the operand of the c_k schedule).
GalleryPair make_nip1_block_pair(int k, double c);

/// Halves c_k from 1 until the measured norm of [phi, [psi_k, H]] on the reference grid is at most 2^{-k}.
std::vector<std::pair<int, double>> nip1_schedule(int k_max, const Domain& reference);
Domain nip1_reference_domain();

/// log of int_0^1 |psi_0^k - <psi_0^k>|^r for the block with constant c (log-space quadrature).
double nip1_log_block_moment(int k, double c, double r);

/// b1 = sgn 1_{[-1,1]}, b2 = sgn M(1_{[-1,1]})^{-1/2}.
GalleryPair make_jnce1_pair();

/// b1 = sgn 1_{[-1,1]}, b2 = sgn Phi0^{-1}(1 / M(1_{[-1,1]})).
GalleryPair make_lastexample_pair();

enum class BmoKind { log_pair, constant, smooth_random };
GalleryPair make_bmo_pair(BmoKind kind, std::uint64_t seed = 0);

/// Gallery lookup by CLI name: prop41, nip1, jnce1, lastexample, bmo_log, constant, smooth_random.
GalleryPair make_pair(const std::string& name, std::uint64_t seed = 0);
std::vector<std::string> pair_names();

/// M(1_{[-1,1]})(x) = min(1, 2 / (1 + |x|)).
double maximal_indicator(double x);

/// x^{-1/2} (log x)^{-1} on [100, R].
AnalyticFunction log_witness(double R);
/// x^{-1/q} on [100, R].
AnalyticFunction power_witness(double q, double R);
/// 1 on [a, b).
AnalyticFunction indicator(double a, double b);
/// Random trigonometric sum with `modes` modes, periodic on [left, right).
AnalyticFunction smooth_random_function(std::uint64_t seed, double left, double right, int modes = 6);

}  // namespace jointosc
