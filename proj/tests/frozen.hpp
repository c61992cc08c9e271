#pragma once

#include <algorithm>
#include <cmath>

#include "jointosc/conditions.hpp"
#include "jointosc/gallery.hpp"
#include "jointosc/singular.hpp"

namespace jointosc {

// Fitted once on the sandwich suite (constant, bmo_log, smooth_random seeds 0..9 on [-8, 8), 1024 cells):
// 1.5 times the largest observed (S2 + T2) / norm.
inline constexpr double kSandwichConstant = 0.88;

// Fitted on the nip1 blocks k = 2, 6 of the computed schedule on the reference grid:
// 1.5 times the largest max(S_q, T_q) / c_k^{5/2}, q = 2 + 1/(2k).
// Measured: 54.2 at k = 2 and 4535 at k = 6, so the ratio is not uniform in k.
inline constexpr double kNip1BlockConstant = 6803.0;

struct SandwichValue {
  double scan = 0.0;
  double norm = 0.0;
  double ratio = 0.0;
};

/// S2 + T2 scan suprema against the commutator norm of one gallery pair.
inline SandwichValue sandwich_ratio(const GalleryPair& g, const Domain& d, const KernelOperator& H) {
  const SymbolPair pair = g.on(d);
  const ScanSchedule all{0, -1, true};
  SandwichValue v;
  v.scan = scan_condition(pair, ConditionSpec::sp(2.0), all).sup_lower_bound +
           scan_condition(pair, ConditionSpec::tp(2.0), all).sup_lower_bound;
  v.norm = operator_norm(H, pair).value;
  v.ratio = v.norm > 0 ? v.scan / v.norm : (v.scan > 0 ? HUGE_VAL : 0.0);
  return v;
}

struct BlockValue {
  double c = 0.0;
  double s_q = 0.0;
  double t_q = 0.0;
  double ratio = 0.0;  // max(S_q, T_q) / c^{5/2}
};

/// Scan of the single block pair (psi_k with constant c, full phi) on the reference grid.
inline BlockValue nip1_block_value(int k, double c) {
  const Domain d = nip1_reference_domain();
  const SymbolPair pair = make_nip1_block_pair(k, c).on(d);
  const double q = 2.0 + 0.5 / k;
  const ScanSchedule all{0, -1, true};
  BlockValue v;
  v.c = c;
  v.s_q = scan_condition(pair, ConditionSpec::sp(q), all).sup_lower_bound;
  v.t_q = scan_condition(pair, ConditionSpec::tp(q), all).sup_lower_bound;
  v.ratio = std::max(v.s_q, v.t_q) / std::pow(c, 2.5);
  return v;
}

}  // namespace jointosc
