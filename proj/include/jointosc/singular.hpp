#pragma once

#include <cstdint>
#include <memory>

#include "jointosc/conditions.hpp"
#include "jointosc/grid.hpp"

namespace jointosc {

enum class KernelKind { hilbert_spectral, hilbert_quadrature };

/// Hilbert transform with the unnormalized kernel 1/(x - y).
///
/// The quadrature kind is the Toeplitz sum (Hf)_i = sum_j K_{i-j} f_j with
/// K_m = 1/m outside the excluded neighbourhood |m| h < epsilon. The excluded
/// principal-value part is replaced by its first-order Taylor term, which moves
/// +-(2R+1)/2 onto K_{+-1} (R excluded neighbours on each side). The matrix
/// stays exactly antisymmetric.
///
/// The spectral kind multiplies the DFT of the cell values by -i pi sgn(k)
/// (periodic window, Nyquist mode dropped).
class KernelOperator {
 public:
  KernelOperator(KernelKind kind, const Domain& domain, double epsilon = 0.0);

  KernelKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  /// Truncation radius (one cell width by default).
  double epsilon() const { return epsilon_; }
  /// Excluded neighbours on each side of a cell.
  long excluded_radius() const { return radius_; }

  /// Toeplitz coefficient K_m of the quadrature kind.
  double kernel(long m) const;

  ComplexVector apply(const ComplexVector& values) const;
  SampledFunction apply(const SampledFunction& f) const;

  /// Exact Hilbert transform of the piecewise-constant cell-average function at x.
  Complex apply_at(const SampledFunction& f, double x) const;

  /// Dense N x N matrix (quadrature kind, small grids).
  Eigen::MatrixXd dense() const;

 private:
  KernelKind kind_;
  Domain domain_;
  double epsilon_;
  long radius_ = 0;
  std::shared_ptr<const std::vector<Complex>> kernel_fft_;
};

/// [b2, [b1, T]] f = b1b2 Tf - b2 T(b1 f) - b1 T(b2 f) + T(b1b2 f), with b1b2 from pair.product.
SampledFunction commutator_apply(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f);

/// The same operator evaluated as b2 [b1,T]f - [b1,T](b2 f).
SampledFunction commutator_apply_nested(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f);

/// Expanded commutator on the cells of `target` only, by direct quadrature sums
/// (cost |target| n_cells); f is read in full.
ComplexVector commutator_apply_on(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f,
                                  const CellRange& target);

struct NormOptions {
  double tol = 1e-6;
  int max_iterations = 5000;
  std::uint64_t seed = 0;
  /// Required above 4096 cells.
  bool matrix_free = false;
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::size_t grid_size = 0;
};

/// Largest singular value of the discretized commutator by power iteration on C*C.
/// Throws NumericalError (carrying the last estimate) when the relative change stays above tol.
NormEstimate operator_norm(const KernelOperator& T, const SymbolPair& pair, const NormOptions& options = {});

/// sup over eps = 2^k h (k = 0..J) of |sum_{|m| > 2^k} f_j / m|, together with |Tf|.
SampledFunction truncated_maximal(const KernelOperator& T, const SampledFunction& f);

/// 3Q: the cells of Q with one copy of Q's length added on each side.
CellRange tripled(const CellRange& Q);

/// M_{T,Q} f on the cells of Q (other cells zero): max over dyadic P in Q containing the
/// cell of max_{xi in P} |T(f 1_{3Q}) - T(f 1_{3P})|(xi). Throws DomainMismatch when 3Q leaves the window.
RealVector grand_maximal_local(const KernelOperator& T, const SampledFunction& f, const CellRange& Q);
RealVector grand_maximal_local(const KernelOperator& T, const ComplexVector& f, const CellRange& Q);

/// T(f 1_{3Q}) on the cells of Q by direct sums (quadrature kind).
ComplexVector local_transform(const KernelOperator& T, const ComplexVector& f, const CellRange& Q);

}  // namespace jointosc
