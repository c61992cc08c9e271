#include "jointosc/singular.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace jointosc {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

std::vector<Complex> forward(const std::vector<Complex>& in) {
  std::vector<Complex> out;
  fft_engine().fwd(out, in);
  return out;
}

std::vector<Complex> backward(const std::vector<Complex>& in) {
  std::vector<Complex> out;
  fft_engine().inv(out, in);
  return out;
}

// circulant embedding of the Toeplitz matrix K_{i-j}, length 2N
template <class Kernel>
std::vector<Complex> toeplitz_symbol(std::size_t n, Kernel k) {
  std::vector<Complex> c(2 * n, 0.0);
  for (std::size_t m = 0; m < n; ++m) c[m] = k(static_cast<long>(m));
  for (std::size_t m = 1; m < n; ++m) c[2 * n - m] = k(-static_cast<long>(m));
  return forward(c);
}

ComplexVector toeplitz_apply(const std::vector<Complex>& symbol, const ComplexVector& x) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  std::vector<Complex> pad(2 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) pad[i] = x[static_cast<Eigen::Index>(i)];
  std::vector<Complex> spec = forward(pad);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= symbol[i];
  const std::vector<Complex> y = backward(spec);
  ComplexVector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = y[i];
  return out;
}

void require_quadrature(const KernelOperator& T, const char* who) {
  if (T.kind() != KernelKind::hilbert_quadrature)
    throw ConfigError(std::string(who) + ": needs the quadrature Hilbert kernel");
}

void require_domain(const KernelOperator& T, const Domain& d, const char* who) {
  if (!(T.domain() == d)) throw DomainMismatch(std::string(who) + ": operator and function domains differ");
}

ComplexVector expanded(const KernelOperator& T, const ComplexVector& b1, const ComplexVector& b2,
                       const ComplexVector& p, const ComplexVector& f) {
  return p.cwiseProduct(T.apply(f)) - b2.cwiseProduct(T.apply(b1.cwiseProduct(f))) -
         b1.cwiseProduct(T.apply(b2.cwiseProduct(f))) + T.apply(p.cwiseProduct(f));
}

}  // namespace

KernelOperator::KernelOperator(KernelKind kind, const Domain& domain, double epsilon)
    : kind_(kind), domain_(domain), epsilon_(epsilon) {
  const double h = domain.cell_width();
  if (epsilon_ == 0.0) epsilon_ = h;
  if (!(epsilon_ > 0) || !std::isfinite(epsilon_)) throw ConfigError("kernel: epsilon must be positive");
  // excluded neighbours: |m| h < epsilon, m != 0
  radius_ = std::max(0L, static_cast<long>(std::ceil(epsilon_ / h - 1e-9)) - 1);
  if (kind_ == KernelKind::hilbert_quadrature) {
    kernel_fft_ = std::make_shared<const std::vector<Complex>>(
        toeplitz_symbol(domain.n_cells(), [this](long m) { return Complex(kernel(m), 0.0); }));
  }
}

double KernelOperator::kernel(long m) const {
  if (m == 0) return 0.0;
  const long am = m < 0 ? -m : m;
  double v = am > radius_ ? 1.0 / static_cast<double>(am) : 0.0;
  if (am == 1) v += 0.5 * static_cast<double>(2 * radius_ + 1);
  return m < 0 ? -v : v;
}

ComplexVector KernelOperator::apply(const ComplexVector& values) const {
  const auto n = static_cast<Eigen::Index>(domain_.n_cells());
  if (values.size() != n) throw DomainMismatch("kernel apply: length differs from the operator grid");
  if (kind_ == KernelKind::hilbert_quadrature) return toeplitz_apply(*kernel_fft_, values);
  std::vector<Complex> in(values.data(), values.data() + n);
  std::vector<Complex> spec = forward(in);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index freq = k <= n / 2 ? k : k - n;
    if (freq == 0 || (n % 2 == 0 && k == n / 2)) {
      spec[static_cast<std::size_t>(k)] = 0.0;
    } else {
      spec[static_cast<std::size_t>(k)] *= Complex(0.0, freq > 0 ? -kPi : kPi);
    }
  }
  const std::vector<Complex> out = backward(spec);
  return Eigen::Map<const ComplexVector>(out.data(), n);
}

SampledFunction KernelOperator::apply(const SampledFunction& f) const {
  require_domain(*this, f.domain(), "kernel apply");
  return SampledFunction(domain_, apply(f.values()));
}

Complex KernelOperator::apply_at(const SampledFunction& f, double x) const {
  require_domain(*this, f.domain(), "apply_at");
  // sum over cell boundaries z_k of (f_k - f_{k-1}) log|x - z_k|
  const std::size_t n = domain_.n_cells();
  Complex acc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const Complex right = k < n ? f[k] : Complex(0.0);
    const Complex left = k > 0 ? f[k - 1] : Complex(0.0);
    const Complex jump = right - left;
    if (jump == Complex(0.0)) continue;
    acc += jump * std::log(std::abs(x - domain_.cell_left(k)));
  }
  return acc;
}

Eigen::MatrixXd KernelOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(domain_.n_cells());
  if (kind_ != KernelKind::hilbert_quadrature) throw ConfigError("dense: only the quadrature kernel has a Toeplitz matrix");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = kernel(static_cast<long>(i - j));
  return m;
}

SampledFunction commutator_apply(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f) {
  require_domain(T, pair.domain(), "commutator");
  require_domain(T, f.domain(), "commutator");
  return SampledFunction(f.domain(),
                         expanded(T, pair.b1.values(), pair.b2.values(), pair.product.values(), f.values()));
}

SampledFunction commutator_apply_nested(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f) {
  require_domain(T, pair.domain(), "commutator");
  require_domain(T, f.domain(), "commutator");
  const ComplexVector& b1 = pair.b1.values();
  const ComplexVector& b2 = pair.b2.values();
  auto inner = [&](const ComplexVector& g) -> ComplexVector {
    return b1.cwiseProduct(T.apply(g)) - T.apply(b1.cwiseProduct(g));
  };
  const ComplexVector& v = f.values();
  return SampledFunction(f.domain(), b2.cwiseProduct(inner(v)) - inner(b2.cwiseProduct(v)));
}

ComplexVector commutator_apply_on(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f,
                                  const CellRange& target) {
  require_quadrature(T, "commutator_apply_on");
  require_domain(T, pair.domain(), "commutator");
  require_domain(T, f.domain(), "commutator");
  check_range(f.domain(), target);
  const ComplexVector& b1 = pair.b1.values();
  const ComplexVector& b2 = pair.b2.values();
  const ComplexVector& p = pair.product.values();
  const ComplexVector& v = f.values();
  const ComplexVector g1 = b1.cwiseProduct(v), g2 = b2.cwiseProduct(v), g3 = p.cwiseProduct(v);
  const auto n = static_cast<long>(f.size());
  ComplexVector out(static_cast<Eigen::Index>(target.size()));
  parallel_for(target.size(), [&](std::size_t t) {
    const long i = static_cast<long>(target.begin + t);
    Complex s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (long j = 0; j < n; ++j) {
      const double k = T.kernel(i - j);
      if (k == 0.0) continue;
      s0 += k * v[j];
      s1 += k * g1[j];
      s2 += k * g2[j];
      s3 += k * g3[j];
    }
    out[static_cast<Eigen::Index>(t)] = p[i] * s0 - b2[i] * s1 - b1[i] * s2 + s3;
  });
  return out;
}

NormEstimate operator_norm(const KernelOperator& T, const SymbolPair& pair, const NormOptions& options) {
  require_domain(T, pair.domain(), "operator_norm");
  const std::size_t n = pair.domain().n_cells();
  if (n > 4096 && !options.matrix_free) throw ConfigError("operator_norm: grids above 4096 cells need matrix_free");
  if (!(options.tol > 0) || options.max_iterations < 1) throw ConfigError("operator_norm: bad tolerance or iteration cap");
  const ComplexVector& b1 = pair.b1.values();
  const ComplexVector& b2 = pair.b2.values();
  const ComplexVector& p = pair.product.values();
  const ComplexVector c1 = b1.conjugate(), c2 = b2.conjugate(), cp = p.conjugate();
  // H* = -H, so C* is minus the commutator with conjugated symbols
  auto gram = [&](const ComplexVector& v) -> ComplexVector { return -expanded(T, c1, c2, cp, expanded(T, b1, b2, p, v)); };

  NormEstimate est;
  est.grid_size = n;
  const double scale = 4.0 * kPi * (1.0 + b1.cwiseAbs().maxCoeff()) * (1.0 + b2.cwiseAbs().maxCoeff()) *
                       (1.0 + p.cwiseAbs().maxCoeff());
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  ComplexVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = Complex(re, im);
  }
  v /= v.norm();
  double prev = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const ComplexVector u = gram(v);
    const double lambda = u.norm();
    est.iterations = it;
    if (lambda == 0.0) {
      est.value = 0.0;
      est.residual = 0.0;
      return est;
    }
    const double sigma = std::sqrt(lambda);
    est.value = sigma;
    if (sigma <= 1e-12 * scale) {
      // the commutator vanishes to rounding
      est.residual = 0.0;
      return est;
    }
    est.residual = it > 1 ? std::abs(sigma - prev) / sigma : 1.0;
    if (it > 1 && est.residual <= options.tol) return est;
    prev = sigma;
    v = u / lambda;
  }
  throw NumericalError("operator_norm: power iteration did not converge", est.value);
}

SampledFunction truncated_maximal(const KernelOperator& T, const SampledFunction& f) {
  require_quadrature(T, "truncated_maximal");
  require_domain(T, f.domain(), "truncated_maximal");
  const std::size_t n = f.size();
  RealVector out = T.apply(f.values()).cwiseAbs();
  const int depth = f.domain().depth();
  std::vector<RealVector> levels(static_cast<std::size_t>(depth + 1));
  parallel_for(levels.size(), [&](std::size_t k) {
    const long cut = 1L << k;
    const auto symbol = toeplitz_symbol(n, [cut](long m) {
      const long am = m < 0 ? -m : m;
      return Complex(am > cut ? 1.0 / static_cast<double>(m) : 0.0, 0.0);
    });
    levels[k] = toeplitz_apply(symbol, f.values()).cwiseAbs();
  });
  for (const auto& l : levels) out = out.cwiseMax(l);
  return SampledFunction(f.domain(), out.cast<Complex>());
}

CellRange tripled(const CellRange& Q) {
  const std::size_t m = Q.size();
  if (Q.begin < m) return {0, 0};
  return {Q.begin - m, Q.end + m};
}

ComplexVector local_transform(const KernelOperator& T, const ComplexVector& f, const CellRange& Q) {
  require_quadrature(T, "local_transform");
  const std::size_t m = Q.size();
  if (Q.begin < m || Q.end + m > static_cast<std::size_t>(f.size()))
    throw DomainMismatch("local operator: 3Q leaves the window");
  const long lo = static_cast<long>(Q.begin - m), hi = static_cast<long>(Q.end + m);
  ComplexVector out(static_cast<Eigen::Index>(m));
  for (std::size_t t = 0; t < m; ++t) {
    const long i = static_cast<long>(Q.begin + t);
    Complex s = 0.0;
    for (long j = lo; j < hi; ++j) s += T.kernel(i - j) * f[j];
    out[static_cast<Eigen::Index>(t)] = s;
  }
  return out;
}

RealVector grand_maximal_local(const KernelOperator& T, const SampledFunction& f, const CellRange& Q) {
  require_domain(T, f.domain(), "grand_maximal_local");
  return grand_maximal_local(T, f.values(), Q);
}

RealVector grand_maximal_local(const KernelOperator& T, const ComplexVector& v, const CellRange& Q) {
  require_quadrature(T, "grand_maximal_local");
  const std::size_t m = Q.size();
  if (m == 0 || (m & (m - 1)) != 0) throw ConfigError("grand_maximal_local: Q must have a power-of-two cell count");
  const ComplexVector g = local_transform(T, v, Q);
  RealVector out = RealVector::Zero(v.size());
  for (std::size_t s = m / 2; s >= 1; s /= 2) {
    for (std::size_t start = Q.begin; start < Q.end; start += s) {
      double mx = 0.0;
      for (std::size_t i = start; i < start + s; ++i) {
        Complex d = g[static_cast<Eigen::Index>(i - Q.begin)];
        const long lo = static_cast<long>(start - s), hi = static_cast<long>(start + 2 * s);
        for (long j = lo; j < hi; ++j) d -= T.kernel(static_cast<long>(i) - j) * v[j];
        mx = std::max(mx, std::abs(d));
      }
      for (std::size_t i = start; i < start + s; ++i) {
        auto& o = out[static_cast<Eigen::Index>(i)];
        o = std::max(o, mx);
      }
    }
    if (s == 1) break;
  }
  return out;
}

}  // namespace jointosc
