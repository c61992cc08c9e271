#include <doctest.h>

#include <algorithm>

#include "generators.hpp"
#include "jointosc/gallery.hpp"
#include "jointosc/sparse.hpp"

using namespace jointosc;

namespace {

struct Setup {
  Domain d{0.0, 4.0, 256};
  KernelOperator H{KernelKind::hilbert_quadrature, d};
  DyadicInterval root{2, 1};
};

SymbolPair random_pair(gen::Rng& rng, const Domain& d) {
  return SymbolPair::from_factors(gen::function(rng, d), gen::function(rng, d));
}

CellSet cells_between(std::size_t a, std::size_t b) {
  CellSet s;
  for (std::size_t i = a; i < b; ++i) s.push_back(i);
  return s;
}

}  // namespace

TEST_CASE("zero function stops at the root") {
  Setup s;
  gen::Rng rng(61);
  const auto pair = random_pair(rng, s.d);
  const auto f = SampledFunction::zero(s.d);
  const auto family = build_sparse(s.H, pair, f, s.root);
  REQUIRE(family.nodes.size() == 1);
  CHECK(family.nodes[0].cube == s.root);
  CHECK(family.nodes[0].carved.size() == s.root.cells(s.d).size());
  CHECK(family.gamma == 1.0);
  const auto rep = verify_domination(s.H, pair, f, family);
  CHECK(rep.max_ratio == 0.0);
  CHECK(rep.violation_cells.empty());
}

TEST_CASE("Calderon-Zygmund examples") {
  const Domain d(0.0, 1.0, 64);
  const DyadicInterval Q{0, 0};
  const auto empty = cz_decompose(d, {}, Q, 0.25);
  CHECK(empty.cubes.empty());
  CHECK(empty.ok());

  const auto quarter = cz_decompose(d, cells_between(0, 16), Q, 0.25);
  REQUIRE(quarter.cubes.size() == 1);
  CHECK(quarter.cubes[0] == DyadicInterval{1, 0});
  CHECK(quarter.ok());

  CHECK_THROWS_AS(cz_decompose(d, cells_between(0, 32), Q, 0.25), ConfigError);
}

TEST_CASE("property: Calderon-Zygmund invariants on random sets") {
  gen::Rng rng(62);
  const Domain d(0.0, 1.0, 256);
  const DyadicInterval Q{0, 0};
  for (int t = 0; t < 200; ++t) {
    CellSet E;
    const double density = gen::uniform(rng, 0.0, 0.125);
    for (std::size_t i = 0; i < d.n_cells(); ++i)
      if (gen::uniform(rng, 0, 1) < density) E.push_back(i);
    // the mass bound sum |P| <= |Q|/2 needs |E| <= height |Q| / 2
    if (static_cast<double>(E.size()) > 0.125 * static_cast<double>(d.n_cells())) continue;
    const auto cz = cz_decompose(d, E, Q, 0.25);
    CHECK(cz.ok());
    std::size_t total = 0;
    for (const auto& P : cz.cubes) {
      const auto r = P.cells(d);
      total += r.size();
      const auto inside = std::count_if(E.begin(), E.end(), [&](std::size_t i) { return r.contains(i); });
      CHECK(static_cast<double>(inside) > 0.25 * static_cast<double>(r.size()));
      if (P.level > 0) {
        const auto pr = P.parent().cells(d);
        const auto pin = std::count_if(E.begin(), E.end(), [&](std::size_t i) { return pr.contains(i); });
        CHECK(static_cast<double>(pin) <= 0.25 * static_cast<double>(pr.size()));
      }
    }
    CHECK(2 * total <= d.n_cells());
  }
}

TEST_CASE("property: exceptional set shrinks as alpha grows") {
  Setup s;
  gen::Rng rng(63);
  for (int t = 0; t < 20; ++t) {
    const auto pair = random_pair(rng, s.d);
    const auto f = gen::function(rng, s.d);
    const auto Q = s.root.cells(s.d);
    const double a1 = gen::uniform(rng, 0.5, 8.0), a2 = a1 * gen::uniform(rng, 1.0, 4.0);
    const CellSet e1 = exceptional_set(s.H, pair, f, Q, a1);
    const CellSet e2 = exceptional_set(s.H, pair, f, Q, a2);
    CHECK(std::includes(e1.begin(), e1.end(), e2.begin(), e2.end()));
    const RealVector ratios = exceptional_ratios(s.H, pair, f, Q);
    for (std::size_t i = Q.begin; i < Q.end; ++i) {
      const bool in = std::binary_search(e1.begin(), e1.end(), i);
      CHECK(in == (ratios[static_cast<Eigen::Index>(i - Q.begin)] > a1));
    }
  }
}

TEST_CASE("constant pair has vanishing forms and bound") {
  Setup s;
  gen::Rng rng(64);
  const auto pair = SymbolPair::from_factors(SampledFunction::constant(s.d, 2.0), SampledFunction::constant(s.d, -1.0));
  const auto f = gen::function(rng, s.d);
  const auto family = build_sparse(s.H, pair, f, s.root);
  const auto forms = sparse_forms(family, pair, f);
  CHECK(forms.total().cwiseAbs().maxCoeff() <= 1e-14);
  const auto A = YoungFunction::power(2.5);
  const auto bound = sparse_bound_l2(s.H, family, pair, f, A, A, A);
  CHECK(bound.bound <= 1e-12);
  CHECK(bound.pairing <= 1e-10);
}

TEST_CASE("single-cube forms match direct averages") {
  const Domain d(0.0, 1.0, 16);
  gen::Rng rng(65);
  const auto b1 = gen::function(rng, d), b2 = gen::function(rng, d), f = gen::function(rng, d);
  const auto pair = SymbolPair::from_factors(b1, b2);
  SparseFamily family;
  family.domain = d;
  family.root = {0, 0};
  SparseNode node;
  node.cube = {0, 0};
  family.nodes.push_back(node);
  const auto forms = sparse_forms(family, pair, f, FormSupport::cube);

  Complex m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < 16; ++i) m1 += b1[i] / 16.0, m2 += b2[i] / 16.0;
  double s4 = 0, mf = 0;
  for (std::size_t i = 0; i < 16; ++i) {
    s4 += std::abs(b1[i] - m1) * std::abs(b2[i] - m2) * std::abs(f[i]) / 16.0;
    mf += std::abs(f[i]) / 16.0;
  }
  for (Eigen::Index i = 0; i < 16; ++i) {
    const auto u = static_cast<std::size_t>(i);
    CHECK(forms.s4[i] == doctest::Approx(s4).epsilon(1e-12));
    CHECK(forms.s1[i] == doctest::Approx(std::abs(b1[u] - m1) * std::abs(b2[u] - m2) * mf).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sparse_forms(family, pair, f, FormSupport::tripled), DomainMismatch);
}

TEST_CASE("property: sparse families are sparse and dominate") {
  Setup s;
  gen::Rng rng(66);
  for (int t = 0; t < 12; ++t) {
    const auto pair = random_pair(rng, s.d);
    const auto f = gen::function(rng, s.d);
    const auto family = build_sparse(s.H, pair, f, s.root);
    CHECK(family.cz_ok);
    CHECK(family.carved_disjoint);
    CHECK(family.depth_mass_ratio <= 1.0 + 1e-12);
    if (family.fallback_nodes == 0) CHECK(family.gamma >= 0.5);
    std::vector<int> owner(s.d.n_cells(), 0);
    for (const auto& node : family.nodes) {
      const auto r = node.cube.cells(s.d);
      for (auto i : node.carved) {
        CHECK(r.contains(i));
        ++owner[i];
      }
    }
    CHECK(*std::max_element(owner.begin(), owner.end()) <= 1);
    const auto rep = verify_domination(s.H, pair, f, family);
    CHECK(rep.violation_cells.empty());
    CHECK(rep.max_ratio < 1e3);
  }
}

TEST_CASE("pairing is below the sparse bound") {
  Setup s;
  const auto g = make_bmo_pair(BmoKind::smooth_random, 3);
  const Domain d(-8.0, 8.0, 1024);
  const KernelOperator H(KernelKind::hilbert_quadrature, d);
  const auto pair = g.on(d);
  gen::Rng rng(67);
  const auto f = gen::function(rng, d);
  const DyadicInterval root{3, 3};
  const auto family = build_sparse(H, pair, f, root);
  const auto A = YoungFunction::power(2.5);
  const auto bound = sparse_bound_l2(H, family, pair, f, A, A, A);
  CHECK(bound.domination > 0);
  CHECK(bound.pairing <= bound.bound * (1 + 1e-12));
}
