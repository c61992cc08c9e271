#include "jointosc/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "jointosc/quadrature.hpp"
#include "jointosc/singular.hpp"
#include "jointosc/young.hpp"

namespace jointosc {

namespace {

constexpr double kPi = std::numbers::pi;

// int_a^b x^s dx for 0 <= a <= b, s > -1, without cancellation for narrow [a, b]
double pow_integral(double s, double a, double b) {
  if (!(b > a)) return 0.0;
  const double e = s + 1.0;
  if (a == 0.0) return std::pow(b, e) / e;
  return std::pow(a, e) * std::expm1(e * std::log1p((b - a) / a)) / e;
}

double overlap(double a, double b, double lo, double hi) { return std::max(0.0, std::min(b, hi) - std::max(a, lo)); }

// int_a^b sgn(x) g(|x|) dx from G(s, t) = int_s^t g, 0 <= s <= t
template <class G>
double odd_integral(double a, double b, G g_int) {
  if (a >= 0) return g_int(a, b);
  if (b <= 0) return -g_int(-b, -a);
  return g_int(0.0, b) - g_int(0.0, -a);
}

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

// (1+t2)^{3/2} - (1+t1)^{3/2} for 0 <= t1 <= t2, without cancellation
double three_halves_difference(double t1, double t2) {
  const double u1 = 1.0 + t1, u2 = 1.0 + t2;
  const double cubes = (t2 - t1) * (u2 * u2 + u2 * u1 + u1 * u1);
  return cubes / (std::pow(u2, 1.5) + std::pow(u1, 1.5));
}

struct TrigTerm {
  double amplitude;
  double omega;
  double phase;  // a cos(omega (x - origin) + phase)
};

struct TrigSum {
  double origin = 0.0;
  std::vector<TrigTerm> terms;

  double value(double x) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.amplitude * std::cos(t.omega * (x - origin) + t.phase);
    return s;
  }
  double integral(double a, double b) const {
    double s = 0.0;
    const double mid = 0.5 * (a + b) - origin, half = 0.5 * (b - a);
    for (const auto& t : terms) {
      if (t.omega == 0.0) {
        s += t.amplitude * std::cos(t.phase) * (b - a);
      } else {
        s += t.amplitude * 2.0 * std::cos(t.omega * mid + t.phase) * std::sin(t.omega * half) / t.omega;
      }
    }
    return s;
  }
};

TrigSum random_trig(std::uint64_t seed, double left, double right, int modes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * kPi);
  TrigSum s;
  s.origin = left;
  const double L = right - left;
  s.terms.push_back({normal(rng), 0.0, 0.0});
  for (int k = 1; k <= modes; ++k) {
    const double a = normal(rng) / std::pow(static_cast<double>(k), 1.5);
    const double phase = uniform(rng);
    s.terms.push_back({a, 2.0 * kPi * k / L, phase});
  }
  return s;
}

TrigSum trig_product(const TrigSum& x, const TrigSum& y) {
  TrigSum p;
  p.origin = x.origin;
  for (const auto& a : x.terms) {
    for (const auto& b : y.terms) {
      const double amp = 0.5 * a.amplitude * b.amplitude;
      p.terms.push_back({amp, a.omega + b.omega, a.phase + b.phase});
      p.terms.push_back({amp, a.omega - b.omega, a.phase - b.phase});
    }
  }
  return p;
}

AnalyticFunction from_trig(TrigSum s) {
  auto shared = std::make_shared<const TrigSum>(std::move(s));
  return {[shared](double x) { return Complex(shared->value(x)); },
          [shared](double a, double b) { return Complex(shared->integral(a, b)); }};
}

AnalyticFunction constant_function(double c) {
  return {[c](double) { return Complex(c); }, [c](double a, double b) { return Complex(c * (b - a)); }};
}

AnalyticFunction signed_indicator_unit() {
  return {[](double x) { return Complex(std::abs(x) <= 1.0 ? sgn(x) : 0.0); },
          [](double a, double b) {
            return Complex(odd_integral(a, b, [](double s, double t) { return overlap(s, t, 0.0, 1.0); }));
          }};
}

WindowHint symmetric_hint(double half, std::size_t n) { return {-half, half, n}; }

struct Nip1Block {
  int k;
  double c;
  double eta;
  double cut;  // c^{6k} e^{-100 k^2}, possibly underflowed to 0
};

Nip1Block nip1_block(int k, double c) {
  const double eta = 1.0 / (2.0 + 1.0 / k);
  const double log_cut = 6.0 * k * std::log(c) - 100.0 * k * k;
  return {k, c, eta, std::exp(log_cut)};
}

GalleryPair nip1_from_blocks(int k_max, const std::vector<Nip1Block>& blocks) {
  GalleryPair g;
  g.name = "nip1";
  g.params = {{"k_max", static_cast<double>(k_max)}};
  for (const auto& b : blocks) g.schedule.push_back({b.k, b.c});
  g.support_left = 0.0;
  g.support_right = k_max + 1.0;
  double half = 1.0;
  while (half < k_max + 1.0) half *= 2.0;
  g.window_hint = symmetric_hint(half, 4096);
  auto bl = std::make_shared<const std::vector<Nip1Block>>(blocks);
  // psi: c (x-k)^{-eta} on (k + cut, k + 1)
  g.b1.value = [bl](double x) {
    for (const auto& b : *bl) {
      const double u = x - b.k;
      if (u > b.cut && u < 1.0) return Complex(b.c * std::pow(u, -b.eta));
    }
    return Complex(0.0);
  };
  g.b1.integral = [bl](double a, double c) {
    double s = 0.0;
    for (const auto& b : *bl) {
      const double lo = std::max(a - b.k, b.cut), hi = std::min(c - b.k, 1.0);
      if (hi > lo) s += b.c * pow_integral(-b.eta, lo, hi);
    }
    return Complex(s);
  };
  // phi: (x-k)^{1/2} on (k, k+1) for every even k
  g.b2.value = [](double x) {
    const double k = std::floor(x);
    if (std::fmod(k, 2.0) != 0.0) return Complex(0.0);
    return Complex(std::sqrt(x - k));
  };
  g.b2.integral = [](double a, double b) {
    double s = 0.0;
    for (double k = std::floor(a); k < b; k += 1.0) {
      if (std::fmod(k, 2.0) != 0.0) continue;
      const double lo = std::max(a - k, 0.0), hi = std::min(b - k, 1.0);
      if (hi > lo) s += pow_integral(0.5, lo, hi);
    }
    return Complex(s);
  };
  // psi phi: c (x-k)^{1/2 - eta} on the psi blocks (k even)
  g.product.value = [bl](double x) {
    for (const auto& b : *bl) {
      const double u = x - b.k;
      if (u > b.cut && u < 1.0) return Complex(b.c * std::pow(u, 0.5 - b.eta));
    }
    return Complex(0.0);
  };
  g.product.integral = [bl](double a, double c) {
    double s = 0.0;
    for (const auto& b : *bl) {
      const double lo = std::max(a - b.k, b.cut), hi = std::min(c - b.k, 1.0);
      if (hi > lo) s += b.c * pow_integral(0.5 - b.eta, lo, hi);
    }
    return Complex(s);
  };
  return g;
}

std::vector<int> nip1_ks(int k_max) {
  std::vector<int> ks;
  for (int k = 2; k <= k_max; k += 4) ks.push_back(k);
  return ks;
}

}  // namespace

SampledFunction sample(const AnalyticFunction& g, const Domain& domain, int nodes) {
  const std::size_t n = domain.n_cells();
  const CellRule& rule = gauss_legendre_rule(nodes);
  const double h = domain.cell_width();
  ComplexVector avg(static_cast<Eigen::Index>(n));
  Eigen::MatrixXcd pts(nodes, static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    const auto c = static_cast<Eigen::Index>(i);
    const double a = domain.cell_left(i), b = domain.cell_right(i);
    avg[c] = g.integral(a, b) / (b - a);
    for (int j = 0; j < nodes; ++j) pts(j, c) = g.value(a + rule.offsets[j] * h);
  });
  for (Eigen::Index i = 0; i < avg.size(); ++i) {
    if (!std::isfinite(avg[i].real()) || !std::isfinite(avg[i].imag()))
      throw DataError("sample: non-finite cell average at cell " + std::to_string(i));
  }
  return SampledFunction(domain, avg, pts);
}

SymbolPair GalleryPair::on(const Domain& domain) const {
  if (support_left < domain.left() || support_right > domain.right())
    throw DomainMismatch("pair " + name + ": window must contain [" + std::to_string(support_left) + ", " +
                         std::to_string(support_right) + "]");
  return SymbolPair(sample(b1, domain), sample(b2, domain), sample(product, domain), name);
}

GalleryPair make_prop41_pair(double p, double q) {
  if (!(p > 1.0) || !(q > p) || !std::isfinite(q)) throw ConfigError("prop41: need 1 < p < q < inf");
  const double a = 2.0 / (p + q);
  GalleryPair g;
  g.name = "prop41";
  g.params = {{"p", p}, {"q", q}};
  g.window_hint = {0.0, 1.0, 65536};
  g.support_left = 0.0;
  g.support_right = 1.0;
  g.b1 = {[a](double x) { return Complex(x > 0 && x < 1 ? std::pow(x, -a) : 0.0); },
          [a](double l, double r) { return Complex(pow_integral(-a, std::max(l, 0.0), std::min(r, 1.0))); }};
  g.b2 = {[a](double x) { return Complex(x > 0 && x < 1 ? std::pow(x, a) : 0.0); },
          [a](double l, double r) { return Complex(pow_integral(a, std::max(l, 0.0), std::min(r, 1.0))); }};
  g.product = indicator(0.0, 1.0);
  return g;
}

Domain nip1_reference_domain() { return Domain(-8.0, 8.0, 2048); }

std::vector<std::pair<int, double>> nip1_schedule(int k_max, const Domain& reference) {
  std::vector<std::pair<int, double>> out;
  const KernelOperator H(KernelKind::hilbert_quadrature, reference);
  for (int k : nip1_ks(k_max)) {
    double c = 1.0;
    for (int halvings = 0; halvings < 200; ++halvings) {
      const GalleryPair block = make_nip1_block_pair(k, c);
      const double norm = operator_norm(H, block.on(reference)).value;
      if (norm <= std::ldexp(1.0, -k)) break;
      c *= 0.5;
    }
    out.push_back({k, c});
  }
  return out;
}

GalleryPair make_nip1_block_pair(int k, double c) {
  if (k < 2 || k % 4 != 2) throw ConfigError("nip1 block: k must lie in 4N + 2");
  if (!(c > 0) || c > 1.0) throw ConfigError("nip1 block: c must lie in (0, 1]");
  GalleryPair g = nip1_from_blocks(k, {nip1_block(k, c)});
  g.name = "nip1_block";
  g.params = {{"k", static_cast<double>(k)}, {"c", c}};
  return g;
}

GalleryPair make_nip1_pair(int k_max, std::vector<std::pair<int, double>> c_schedule) {
  if (k_max < 2) throw ConfigError("nip1: k_max must be at least 2");
  if (c_schedule.empty()) c_schedule = nip1_schedule(k_max, nip1_reference_domain());
  std::vector<Nip1Block> blocks;
  for (int k : nip1_ks(k_max)) {
    auto it = std::find_if(c_schedule.begin(), c_schedule.end(), [k](const auto& e) { return e.first == k; });
    if (it == c_schedule.end()) throw ConfigError("nip1: schedule lacks c_k for k = " + std::to_string(k));
    if (!(it->second > 0) || it->second > 1.0) throw ConfigError("nip1: c_k must lie in (0, 1]");
    blocks.push_back(nip1_block(k, it->second));
  }
  return nip1_from_blocks(k_max, blocks);
}

double nip1_log_block_moment(int k, double c, double r) {
  if (k < 1 || !(c > 0) || !(r >= 1)) throw ConfigError("nip1 moment: need k >= 1, c > 0, r >= 1");
  const double eta = 1.0 / (2.0 + 1.0 / k);
  const double log_cut = 6.0 * k * std::log(c) - 100.0 * k * k;
  const double mean = c * -std::expm1((1.0 - eta) * log_cut) / (1.0 - eta);
  // x = e^u on (cut, 1): |c e^{-eta u} - mean|^r e^u, with log|e^a - e^b| = max + log(1 - e^{min - max})
  const double log_c = std::log(c), log_mean = std::log(mean);
  auto log_g = [&](double u) {
    const double a = log_c - eta * u;
    const double hi = std::max(a, log_mean), lo = std::min(a, log_mean);
    if (hi == lo) return -std::numeric_limits<double>::infinity();
    return r * (hi + std::log(-std::expm1(lo - hi))) + u;
  };
  const double lead = std::max({log_g(log_cut), log_g(0.0), log_mean * r + log_cut});
  auto g = [&](double u) { return std::exp(log_g(u) - lead); };
  double total = std::exp(log_cut + r * log_mean - lead);  // the gap (0, cut) where psi = 0
  const double split = -std::log(mean / c) / eta;
  if (split > log_cut && split < 0.0) {
    total += integrate(g, log_cut, split, 1e-300, 1e-10).value + integrate(g, split, 0.0, 1e-300, 1e-10).value;
  } else {
    total += integrate(g, log_cut, 0.0, 1e-300, 1e-10).value;
  }
  return lead + std::log(total);
}

double maximal_indicator(double x) {
  const double ax = std::abs(x);
  return ax <= 1.0 ? 1.0 : 2.0 / (1.0 + ax);
}

GalleryPair make_jnce1_pair() {
  GalleryPair g;
  g.name = "jnce1";
  g.window_hint = symmetric_hint(65536.0, 131072);
  g.support_left = -1.0;
  g.support_right = 1.0;
  g.b1 = signed_indicator_unit();
  auto mag = [](double s, double t) {
    double v = overlap(s, t, 0.0, 1.0);
    const double lo = std::max(s, 1.0);
    if (t > lo) v += std::sqrt(2.0) / 3.0 * three_halves_difference(lo, t);
    return v;
  };
  g.b2 = {[](double x) { return Complex(sgn(x) / std::sqrt(maximal_indicator(x))); },
          [mag](double a, double b) { return Complex(odd_integral(a, b, mag)); }};
  g.product = indicator(-1.0, 1.0);
  return g;
}

GalleryPair make_lastexample_pair() {
  GalleryPair g;
  g.name = "lastexample";
  g.window_hint = symmetric_hint(65536.0, 131072);
  g.support_left = -1.0;
  g.support_right = 1.0;
  const YoungFunction phi0 = YoungFunction::phi0();
  const double inner = inverse(phi0, 1.0);
  auto magnitude = [phi0, inner](double t) { return t <= 1.0 ? inner : inverse(phi0, (1.0 + t) / 2.0); };
  auto mag = [magnitude, inner](double s, double t) {
    double v = inner * overlap(s, t, 0.0, 1.0);
    const double lo = std::max(s, 1.0);
    if (t > lo) v += integrate(magnitude, lo, t, 1e-300, 1e-13).value;
    return v;
  };
  g.params = {{"phi0_inverse_at_1", inner}};
  g.b1 = signed_indicator_unit();
  g.b2 = {[magnitude](double x) { return Complex(sgn(x) * magnitude(std::abs(x))); },
          [mag](double a, double b) { return Complex(odd_integral(a, b, mag)); }};
  g.product = {[inner](double x) { return Complex(std::abs(x) <= 1.0 ? inner : 0.0); },
               [inner](double a, double b) { return Complex(inner * overlap(a, b, -1.0, 1.0)); }};
  return g;
}

GalleryPair make_bmo_pair(BmoKind kind, std::uint64_t seed) {
  GalleryPair g;
  g.window_hint = symmetric_hint(8.0, 1024);
  g.support_left = g.support_right = 0.0;
  switch (kind) {
    case BmoKind::log_pair: {
      g.name = "bmo_log";
      auto F = [](double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)) - x; };
      auto F2 = [](double x) {
        if (x == 0.0) return 0.0;
        const double l = std::log(std::abs(x));
        return x * (l * l - 2.0 * l + 2.0);
      };
      g.b1 = {[](double x) { return Complex(std::log(std::abs(x))); },
              [F](double a, double b) { return Complex(F(b) - F(a)); }};
      g.b2 = g.b1;
      g.product = {[](double x) {
                     const double l = std::log(std::abs(x));
                     return Complex(l * l);
                   },
                   [F2](double a, double b) { return Complex(F2(b) - F2(a)); }};
      break;
    }
    case BmoKind::constant:
      g.name = "constant";
      g.b1 = constant_function(1.0);
      g.b2 = constant_function(1.0);
      g.product = constant_function(1.0);
      break;
    case BmoKind::smooth_random: {
      g.name = "smooth_random";
      g.params = {{"seed", static_cast<double>(seed)}};
      const double l = g.window_hint.left, r = g.window_hint.right;
      const TrigSum s1 = random_trig(2 * seed + 1, l, r, 6), s2 = random_trig(2 * seed + 2, l, r, 6);
      g.b1 = from_trig(s1);
      g.b2 = from_trig(s2);
      g.product = from_trig(trig_product(s1, s2));
      break;
    }
  }
  return g;
}

std::vector<std::string> pair_names() {
  return {"prop41", "nip1", "jnce1", "lastexample", "bmo_log", "constant", "smooth_random"};
}

GalleryPair make_pair(const std::string& name, std::uint64_t seed) {
  if (name == "prop41") return make_prop41_pair(1.5, 3.0);
  if (name == "nip1") return make_nip1_pair();
  if (name == "jnce1") return make_jnce1_pair();
  if (name == "lastexample") return make_lastexample_pair();
  if (name == "bmo_log") return make_bmo_pair(BmoKind::log_pair);
  if (name == "constant") return make_bmo_pair(BmoKind::constant);
  if (name == "smooth_random") return make_bmo_pair(BmoKind::smooth_random, seed);
  throw ConfigError("pair: unknown gallery name '" + name + "'");
}

AnalyticFunction log_witness(double R) {
  if (!(R > 100.0)) throw ConfigError("witness: R must exceed 100");
  // int x^{-1/2} / log x dx = li(sqrt x)
  auto li_sqrt = [](double x) { return std::expint(0.5 * std::log(x)); };
  return {[R](double x) { return Complex(x >= 100.0 && x < R ? 1.0 / (std::sqrt(x) * std::log(x)) : 0.0); },
          [R, li_sqrt](double a, double b) {
            const double lo = std::max(a, 100.0), hi = std::min(b, R);
            return Complex(hi > lo ? li_sqrt(hi) - li_sqrt(lo) : 0.0);
          }};
}

AnalyticFunction power_witness(double q, double R) {
  if (!(q > 1.0) || !(R > 100.0)) throw ConfigError("witness: need q > 1 and R > 100");
  return {[q, R](double x) { return Complex(x >= 100.0 && x < R ? std::pow(x, -1.0 / q) : 0.0); },
          [q, R](double a, double b) {
            return Complex(pow_integral(-1.0 / q, std::max(a, 100.0), std::min(b, R)));
          }};
}

AnalyticFunction indicator(double a, double b) {
  return {[a, b](double x) { return Complex(x >= a && x < b ? 1.0 : 0.0); },
          [a, b](double l, double r) { return Complex(overlap(l, r, a, b)); }};
}

AnalyticFunction smooth_random_function(std::uint64_t seed, double left, double right, int modes) {
  if (!(right > left) || modes < 1) throw ConfigError("smooth_random_function: bad window or mode count");
  return from_trig(random_trig(seed, left, right, modes));
}

}  // namespace jointosc
