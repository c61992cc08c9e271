// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jointosc/conditions.hpp"
#include "jointosc/gallery.hpp"
#include "jointosc/singular.hpp"
#include "jointosc/sparse.hpp"
#include "jointosc/young.hpp"
#include "frozen.hpp"

using namespace jointosc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SampledFunction random_cells(const Domain& d, std::mt19937_64& rng, bool complex_values) {
  std::normal_distribution<double> g;
  ComplexVector v(static_cast<Eigen::Index>(d.n_cells()));
  for (auto& z : v) z = Complex(g(rng), complex_values ? g(rng) : 0.0);
  return SampledFunction(d, v);
}

SampledFunction centered(const SampledFunction& f, const CellRange& Q) {
  ComplexVector v = f.values();
  v.array() -= average(f, Q);
  return SampledFunction(f.domain(), v);
}

double rel(Complex a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Outcome magic_lemma_identities() {
  const Domain d(0.0, 1.0, 256);
  const CellRange Q{0, 256};
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto b1 = centered(random_cells(d, rng, true), Q);
    const auto b2 = centered(random_cells(d, rng, true), Q);
    const auto m = magic_lemma(b1, b2, Q);
    worst = std::max({worst, rel(std::abs(m.ml1), m.ml1_rhs), rel(m.ml2, m.ml2_rhs)});
  }
  const AnalyticFunction lin{[](double x) { return Complex(x - 0.5); },
                             [](double a, double b) { return Complex(0.5 * (b - a) * (a + b - 1.0)); }};
  const auto b = sample(lin, d);
  const auto m = magic_lemma(b, b, Q);
  const double e1 = rel(std::abs(m.ml1), 1.0 / 72.0), e2 = rel(m.ml2, 7.0 / 360.0);
  const bool ok = worst <= 1e-10 && e1 <= 1e-10 && e2 <= 1e-10;
  return {ok, "random worst rel " + fmt("%.2e", worst) + ", x-1/2: " + fmt("%.2e", e1) + " / " + fmt("%.2e", e2)};
}

std::vector<YoungFunction> built_ins() {
  return {YoungFunction::power(1.5),          YoungFunction::power(2.0),         YoungFunction::power(3.0),
          YoungFunction::log_bump(2.0, 1.0),  YoungFunction::log_bump(1.5, 0.5), YoungFunction::loglog_bump(2.0, 0.5),
          YoungFunction::loglog_bump(3.0, 1.0), YoungFunction::phi0()};
}

Outcome young_duality() {
  const auto probes = log_probes(1e-4, 1e8, 1000);
  double lo = 1e300, hi = 0.0;
  for (const auto& a : built_ins()) {
    const auto r = duality_sandwich(a, complementary(a), probes);
    lo = std::min(lo, r.min_ratio);
    hi = std::max(hi, r.max_ratio);
  }
  const bool ok = lo >= 1.0 - 1e-6 && hi <= 2.0 * (1.0 + 1e-6);
  return {ok, "A^-1 Abar^-1 / t in [" + fmt("%.9f", lo) + ", " + fmt("%.9f", hi) + "]"};
}

CellRange random_interval(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t a = pick(rng), b = pick(rng);
  if (a > b) std::swap(a, b);
  return {a, b + 1};
}

SampledFunction heavy_cells(const Domain& d, std::mt19937_64& rng) {
  std::student_t_distribution<double> t(2.0);
  ComplexVector v(static_cast<Eigen::Index>(d.n_cells()));
  for (auto& z : v) z = Complex(t(rng), t(rng));
  return SampledFunction(d, v);
}

Outcome generalized_holder() {
  const Domain d(0.0, 1.0, 128);
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (const auto& a : {YoungFunction::power(2.0), YoungFunction::log_bump(2.0, 1.0)}) {
    const auto abar = complementary(a);
    for (int t = 0; t < 1000; ++t) {
      const auto f = heavy_cells(d, rng), g = heavy_cells(d, rng);
      const auto Q = random_interval(rng, d.n_cells());
      double lhs = 0.0;
      for (auto i = Q.begin; i < Q.end; ++i) lhs += std::abs(f[i] * g[i]);
      lhs /= static_cast<double>(Q.size());
      const double rhs = 2.0 * luxemburg(f, Q, a) * luxemburg(g, Q, abar);
      worst = std::max(worst, lhs / rhs);
    }
  }
  return {worst <= 1.0 + 1e-8, "max <|fg|> / (2 |f|_A |g|_Abar) = " + fmt("%.6f", worst)};
}

Outcome luxemburg_power() {
  const Domain d(0.0, 1.0, 256);
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    const auto a = YoungFunction::power(p);
    for (int t = 0; t < 500; ++t) {
      const auto f = heavy_cells(d, rng);
      const auto Q = random_interval(rng, d.n_cells());
      const double lp = lp_average(f, Q, p);
      worst = std::max(worst, std::abs(luxemburg(f, Q, a) - lp) / lp);
    }
  }
  return {worst <= 1e-8, "worst rel " + fmt("%.2e", worst)};
}

std::vector<double> powers_of_two(double lo, double hi) {
  std::vector<double> ks;
  for (double k = lo; k <= hi; k *= 2) ks.push_back(k);
  return ks;
}

double l2_norm(const ComplexVector& v, double h) { return std::sqrt(v.squaredNorm() * h); }

Outcome jnce1_two_sided() {
  const GalleryPair g = make_jnce1_pair();
  const Domain d(-65536.0, 65536.0, 131072);
  const SymbolPair pair = g.on(d);
  const ScanSchedule all{0, -1, true};
  const double s2 = scan_condition(pair, ConditionSpec::sp(2.0), all).sup_lower_bound;
  const double t2 = scan_condition(pair, ConditionSpec::tp(2.0), all).sup_lower_bound;

  const YoungFunction lb = YoungFunction::log_bump(2.0, 1.0);
  const auto ks = powers_of_two(16.0, 65536.0);
  const double gab =
      scan_ladder(pair, ConditionSpec::sab(lb, lb), symmetric_ladder(d, ks), "symmetric").growth_ratio;
  const double gc = scan_ladder(pair, ConditionSpec::tc(lb), anchored_ladder(d, 0.0, ks), "anchored").growth_ratio;

  const Domain wide(-1048576.0, 1048576.0, 2097152);
  const SymbolPair wpair = g.on(wide);
  const KernelOperator H(KernelKind::hilbert_quadrature, wide);
  const CellRange unit = cells_of(wide, -1.0, 1.0);
  std::vector<double> norms;
  for (double R : {1e3, 1e4, 1e5, 1e6}) {
    const auto f = sample(log_witness(R), wide);
    norms.push_back(l2_norm(commutator_apply_on(H, wpair, f, unit), wide.cell_width()));
  }
  bool increasing = true;
  for (std::size_t i = 1; i < norms.size(); ++i) increasing = increasing && norms[i] > norms[i - 1];
  const double increase = norms.back() / norms.front() - 1.0;

  const bool ok = s2 <= 4.0 && t2 <= 4.0 && gab >= 1.8 && gc >= 1.8 && increasing && increase >= 0.2;
  std::ostringstream s;
  s << "S2 " << fmt("%.4f", s2) << ", T2 " << fmt("%.4f", t2) << ", S_AB growth " << fmt("%.3f", gab)
    << ", T_C growth " << fmt("%.3f", gc) << ", witness norms";
  for (double v : norms) s << ' ' << fmt("%.5g", v);
  s << " (+" << fmt("%.1f", 100 * increase) << "%)";
  return {ok, s.str()};
}

Outcome prop41_separation() {
  const GalleryPair g = make_prop41_pair(1.5, 3.0);
  const Domain d(0.0, 1.0, 65536);
  const SymbolPair pair = g.on(d);
  const ScanSchedule all{0, -1, true};
  const double gs = tail_growth_ratio(scan_condition(pair, ConditionSpec::sp(1.5), all), 4);
  const double gt = tail_growth_ratio(scan_condition(pair, ConditionSpec::tp(1.5), all), 4);

  const Domain fine(0.0, 1.0, 1u << 20);
  const SymbolPair fpair = g.on(fine);
  std::vector<double> s3;
  for (int n = 4; n <= 20; ++n) s3.push_back(s_p(fpair, cells_of(fine, 0.0, std::ldexp(1.0, -n)), 3.0));
  bool monotone = true;
  for (std::size_t i = 1; i < s3.size(); ++i) monotone = monotone && s3[i] > s3[i - 1];
  const double factor = s3.back() / s3.front();

  // S3 on a fixed interval under refinement, reported alongside (not part of the verdict)
  const CellRange head = cells_of(fine, 0.0, 1.0 / 16.0);
  const double s3_coarse = s_p(g.on(Domain(0.0, 1.0, 256)), {0, 16}, 3.0);
  const double s3_fine = s_p(fpair, head, 3.0);

  const bool ok = gs <= 1.1 && gt <= 1.1 && monotone && factor >= 2.0;
  std::ostringstream s;
  s << "S_3/2 tail growth " << fmt("%.4f", gs) << ", T_3/2 tail growth " << fmt("%.4f", gt) << ", S3(0,2^-n) n=4 "
    << fmt("%.4f", s3.front()) << " -> n=20 " << fmt("%.4f", s3.back()) << " (factor " << fmt("%.3f", factor)
    << (monotone ? ", increasing)" : ", not increasing)") << "; S3(0,1/16) at 2^8 cells " << fmt("%.4f", s3_coarse)
    << " vs 2^20 cells " << fmt("%.4f", s3_fine);
  return {ok, s.str()};
}

SampledFunction supported_on(const AnalyticFunction& g, const Domain& d, const CellRange& keep) {
  return sample(g, d).restricted(keep);
}

Outcome sparse_construction() {
  const Domain d(-8.0, 8.0, 1024);
  const DyadicInterval root{2, 1};
  int failures = 0;
  double worst_ratio = 0.0, worst_drift = 1.0, min_gamma = 1.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GalleryPair g = make_bmo_pair(BmoKind::smooth_random, seed);
    const AnalyticFunction fa = smooth_random_function(1000 + seed, -8.0, 8.0);
    double ratios[2] = {0, 0};
    for (int level = 0; level < 2; ++level) {
      const Domain dd = level == 0 ? d : d.refined();
      const SymbolPair pair = g.on(dd);
      const KernelOperator H(KernelKind::hilbert_quadrature, dd);
      const auto f = supported_on(fa, dd, tripled(root.cells(dd)));
      const SparseFamily fam = build_sparse(H, pair, f, root);
      const DominationReport rep = verify_domination(H, pair, f, fam);
      min_gamma = std::min(min_gamma, fam.gamma);
      const bool ok = fam.gamma >= 0.5 && fam.cz_ok && fam.carved_disjoint && std::isfinite(rep.max_ratio) &&
                      rep.violation_cells.empty();
      if (!ok) ++failures;
      ratios[level] = rep.max_ratio;
    }
    worst_ratio = std::max({worst_ratio, ratios[0], ratios[1]});
    worst_drift = std::max(worst_drift, std::max(ratios[0], ratios[1]) / std::min(ratios[0], ratios[1]));
  }
  const bool ok = failures == 0 && worst_drift < 2.0;
  return {ok, "failed instances " + std::to_string(failures) + ", min gamma " + fmt("%.3f", min_gamma) +
                  ", max ratio " + fmt("%.4f", worst_ratio) + ", refinement drift x" + fmt("%.3f", worst_drift)};
}

Outcome hilbert_cross_validation() {
  const Domain d(-16.0, 16.0, 4096);
  const KernelOperator spectral(KernelKind::hilbert_spectral, d), quad(KernelKind::hilbert_quadrature, d);
  double worst = 0.0;
  // spectrum held away from 0 so the periodized spectral kind sees no window mass
  for (double omega : {5.0, 6.0, 8.0, 10.0}) {
    const auto f = SampledFunction::from_midpoints(d, [omega](double x) {
      return Complex(std::exp(-0.5 * x * x) * std::cos(omega * x));
    });
    const ComplexVector a = spectral.apply(f.values()), b = quad.apply(f.values());
    worst = std::max(worst, (a - b).norm() / a.norm());
  }
  const Domain w(-8.0, 8.0, 4096);
  const auto ind = sample(indicator(-1.0, 1.0), w);
  const KernelOperator hq(KernelKind::hilbert_quadrature, w);
  const Complex at2 = hq.apply(ind.values())[static_cast<Eigen::Index>(w.cell_of(2.0 + 0.5 * w.cell_width()))];
  const double err = std::abs(at2.real() - std::log(3.0));
  const bool ok = worst <= 1e-3 && err <= 5e-3;
  return {ok, "spectral vs quadrature rel L2 " + fmt("%.2e", worst) + ", |H1(2) - log 3| " + fmt("%.2e", err)};
}

Outcome lower_bound_sandwich() {
  const Domain d(-8.0, 8.0, 1024);
  const KernelOperator H(KernelKind::hilbert_quadrature, d);
  std::vector<GalleryPair> suite = {make_bmo_pair(BmoKind::constant), make_bmo_pair(BmoKind::log_pair)};
  for (std::uint64_t s = 0; s < 10; ++s) suite.push_back(make_bmo_pair(BmoKind::smooth_random, s));
  double worst = 0.0;
  int violations = 0;
  for (const auto& g : suite) {
    const auto r = sandwich_ratio(g, d, H);
    worst = std::max(worst, r.ratio);
    if (r.scan > kSandwichConstant * r.norm) ++violations;
  }
  return {violations == 0, "C = " + fmt("%.3f", kSandwichConstant) + ", worst (S2+T2)/norm " + fmt("%.4f", worst) +
                               ", violations " + std::to_string(violations)};
}

Outcome upper_bound_coherence() {
  const Domain d(-8.0, 8.0, 1024);
  const DyadicInterval root{2, 1};
  const GalleryPair g = make_bmo_pair(BmoKind::log_pair);
  const SymbolPair pair = g.on(d);
  const KernelOperator H(KernelKind::hilbert_quadrature, d);
  const YoungFunction a = YoungFunction::power(2.5);
  int violations = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    // complex f: for real f the antisymmetric real commutator gives <Cf, f> = 0
    const auto re = smooth_random_function(2000 + seed, -8.0, 8.0), im = smooth_random_function(3000 + seed, -8.0, 8.0);
    const AnalyticFunction fc{[re, im](double x) { return re.value(x) + Complex(0, 1) * im.value(x); },
                              [re, im](double a, double b) { return re.integral(a, b) + Complex(0, 1) * im.integral(a, b); }};
    const auto f = supported_on(fc, d, root.cells(d));
    const SparseFamily fam = build_sparse(H, pair, f, root);
    const SparseBound b = sparse_bound_l2(H, fam, pair, f, a, a, a);
    if (!(b.bound >= b.pairing)) ++violations;
    worst = std::max(worst, b.pairing / b.bound);
  }
  return {violations == 0,
          "max pairing / bound " + fmt("%.4e", worst) + ", violations " + std::to_string(violations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"magic-lemma identities", magic_lemma_identities},
      {"Young duality", young_duality},
      {"generalized Hoelder", generalized_holder},
      {"Luxemburg vs L^p", luxemburg_power},
      {"jnce1 two-sidedness", jnce1_two_sided},
      {"prop41 separation", prop41_separation},
      {"sparse construction", sparse_construction},
      {"Hilbert cross-validation", hilbert_cross_validation},
      {"lower-bound sandwich", lower_bound_sandwich},
      {"upper-bound coherence", upper_bound_coherence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2zu %s: %s (%s) [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
