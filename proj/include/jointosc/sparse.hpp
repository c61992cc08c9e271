#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jointosc/conditions.hpp"
#include "jointosc/singular.hpp"
#include "jointosc/young.hpp"

namespace jointosc {

/// Sorted cell indices of the window.
using CellSet = std::vector<std::size_t>;

struct SparseConfig {
  /// Fixed level-set multiplier; unset means the smallest 2^j (j = 0..alpha_ladder_top) with |E| <= e_fraction |Q|.
  std::optional<double> alpha;
  int alpha_ladder_top = 40;
  double e_fraction = 0.125;
  /// Calderon-Zygmund height for 1_E.
  double height = 0.25;
  int max_depth = 64;
};

/// Cells i of Q with |psi_i| or M_{T,Q}psi(i) above alpha <|psi|>_{3Q}, for psi in {f, b1 f, b2 f, b1 b2 f}.
CellSet exceptional_set(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f, const CellRange& Q,
                        double alpha);

/// Per-cell smallest alpha that keeps the cell out of E (0 when no psi reaches it), indexed from Q.begin.
RealVector exceptional_ratios(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f,
                              const CellRange& Q);

struct AlphaChoice {
  bool found = false;
  double alpha = 0.0;
  CellSet E;
};

AlphaChoice select_alpha(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f, const CellRange& Q,
                         const SparseConfig& config);

struct CzDecomposition {
  std::vector<DyadicInterval> cubes;
  std::size_t covered_cells = 0;
  bool mass_bound = true;        // sum |P| <= |Q| / 2
  bool covers_E = true;          // every cell of E lies in some P
  bool meets_complement = true;  // every P contains a cell outside E
  bool disjoint = true;
  bool ok() const { return mass_bound && covers_E && meets_complement && disjoint; }
};

/// Maximal dyadic P inside Q (a dyadic interval of the domain) with <1_E>_P > height.
/// Throws ConfigError when <1_E>_Q > height.
CzDecomposition cz_decompose(const Domain& domain, const CellSet& E, const DyadicInterval& Q, double height);

struct SparseNode {
  DyadicInterval cube;
  CellSet carved;
  int depth = 0;
  double alpha = 0.0;
  bool fallback = false;  // no ladder alpha worked; children are the two halves
};

struct SparseFamily {
  Domain domain;
  DyadicInterval root;
  std::vector<SparseNode> nodes;
  double gamma = 1.0;
  double alpha_max = 0.0;
  int depth = 0;
  std::size_t fallback_nodes = 0;
  bool cz_ok = true;
  bool carved_disjoint = true;
  /// Largest total measure at depth k over 2^{-k}|root|.
  double depth_mass_ratio = 0.0;
};

/// Recursive stopping-time construction on the root; f is taken as f 1_{3 root}.
SparseFamily build_sparse(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f,
                          const DyadicInterval& root, const SparseConfig& config = {});

/// Averaging set of each sparse term: the cube itself, or its triple (the local estimate of the construction).
enum class FormSupport { cube, tripled };

struct SparseForms {
  RealVector s1, s2, s3, s4;
  RealVector total() const { return s1 + s2 + s3 + s4; }
};

/// The four sparse sums, each term averaged over and supported on Q (or 3Q).
SparseForms sparse_forms(const SparseFamily& family, const SymbolPair& pair, const SampledFunction& f,
                         FormSupport support = FormSupport::tripled);

struct DominationReport {
  double max_ratio = 0.0;
  std::vector<std::size_t> violation_cells;
  std::size_t cells_checked = 0;
};

/// |C_bT(f 1_{3 root})| / sum S_i on the root cells whose denominator exceeds 1e-14.
DominationReport verify_domination(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f,
                                   const SparseFamily& family, FormSupport support = FormSupport::tripled);

struct SparseBound {
  double bound = 0.0;        // domination constant times the sum of the four majorants
  double pairing = 0.0;      // |<C_bT f, f>|
  double domination = 0.0;
  double majorants[4] = {0, 0, 0, 0};
  /// 2 ||M_Xbar f|| ||M_Ybar f|| style chain per form, with the S_{A,B} / T_C factors as sup over the family.
  double maximal_chain = 0.0;
  bool bp_warning = false;
  std::vector<std::string> warnings;
};

/// Hoelder majorants sum_Q |Q| (Luxemburg products) for the four forms, tested against g = f.
SparseBound sparse_bound_l2(const KernelOperator& T, const SparseFamily& family, const SymbolPair& pair,
                            const SampledFunction& f, const YoungFunction& A, const YoungFunction& B,
                            const YoungFunction& C, FormSupport support = FormSupport::tripled);

}  // namespace jointosc
