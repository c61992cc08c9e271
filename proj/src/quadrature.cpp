#include "jointosc/quadrature.hpp"
#include "jointosc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace jointosc {

namespace {

// Kronrod nodes on [0, 1) of the symmetric 15-point rule; odd entries are the Gauss nodes.
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t kMaxEvaluations = 20'000'000;

struct Panel {
  double kronrod;
  double gauss;
};

Panel gk15(const std::function<double(double)>& g, double a, double b) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  const double fc = g(c);
  double k = fc * kWgk[7];
  double gs = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = r * kXgk[j];
    const double f1 = g(c - dx), f2 = g(c + dx);
    k += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gs += kWg[j / 2] * (f1 + f2);
  }
  return {k * r, gs * r};
}

void adapt(const std::function<double(double)>& g, double a, double b, double tol, int depth, QuadratureResult& out) {
  const Panel p = gk15(g, a, b);
  out.evaluations += 15;
  if (!std::isfinite(p.kronrod)) throw NumericalError("integrate: non-finite integrand on a panel", out.value);
  if (out.evaluations > kMaxEvaluations) throw NumericalError("integrate: evaluation budget exhausted", out.value);
  const double err = std::abs(p.kronrod - p.gauss);
  if (err <= tol || depth <= 0 || !(b - a > 1e-300)) {
    out.value += p.kronrod;
    out.error_estimate += err;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(g, a, m, 0.5 * tol, depth - 1, out);
  adapt(g, m, b, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& g, double a, double b, double abs_tol, double rel_tol,
                           int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  if (b < a) {
    out = integrate(g, b, a, abs_tol, rel_tol, max_depth);
    out.value = -out.value;
    return out;
  }
  const Panel coarse = gk15(g, a, b);
  if (!std::isfinite(coarse.kronrod)) throw NumericalError("integrate: non-finite integrand", coarse.kronrod);
  const double tol = std::max(abs_tol, rel_tol * std::abs(coarse.kronrod));
  adapt(g, a, b, tol, max_depth, out);
  out.evaluations += 15;
  return out;
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& g, double a, double b,
                                       double abs_tol, double rel_tol) {
  const double re = integrate([&](double x) { return g(x).real(); }, a, b, abs_tol, rel_tol).value;
  const double im = integrate([&](double x) { return g(x).imag(); }, a, b, abs_tol, rel_tol).value;
  return {re, im};
}

}  // namespace jointosc
