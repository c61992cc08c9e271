#include "jointosc/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace jointosc {

namespace {

struct Psi {
  ComplexVector values[4];
};

Psi psi_functions(const SymbolPair& pair, const ComplexVector& f) {
  Psi p;
  p.values[0] = f;
  p.values[1] = pair.b1.values().cwiseProduct(f);
  p.values[2] = pair.b2.values().cwiseProduct(f);
  p.values[3] = pair.product.values().cwiseProduct(f);
  return p;
}

double abs_mean(const ComplexVector& v, const CellRange& r) {
  return v.segment(static_cast<Eigen::Index>(r.begin), static_cast<Eigen::Index>(r.size())).cwiseAbs().mean();
}

RealVector ratios_for(const KernelOperator& T, const Psi& psi, const CellRange& Q) {
  const CellRange R = tripled(Q);
  if (R.empty() || R.end > static_cast<std::size_t>(psi.values[0].size()))
    throw DomainMismatch("sparse: 3Q leaves the window");
  RealVector r = RealVector::Zero(static_cast<Eigen::Index>(Q.size()));
  for (const auto& v : psi.values) {
    const double avg = abs_mean(v, R);
    if (avg == 0.0) continue;
    const RealVector m = grand_maximal_local(T, v, Q);
    for (std::size_t i = Q.begin; i < Q.end; ++i) {
      const auto at = static_cast<Eigen::Index>(i - Q.begin);
      const double top = std::max(std::abs(v[static_cast<Eigen::Index>(i)]), m[static_cast<Eigen::Index>(i)]);
      r[at] = std::max(r[at], top / avg);
    }
  }
  return r;
}

CellSet level_set(const RealVector& r, const CellRange& Q, double alpha) {
  CellSet E;
  for (Eigen::Index k = 0; k < r.size(); ++k)
    if (r[k] > alpha) E.push_back(Q.begin + static_cast<std::size_t>(k));
  return E;
}

AlphaChoice choose(const RealVector& r, const CellRange& Q, const SparseConfig& config) {
  AlphaChoice c;
  const double cap = config.e_fraction * static_cast<double>(Q.size());
  if (config.alpha) {
    c.alpha = *config.alpha;
    c.E = level_set(r, Q, c.alpha);
    c.found = static_cast<double>(c.E.size()) <= cap;
    return c;
  }
  for (int j = 0; j <= config.alpha_ladder_top; ++j) {
    const double alpha = std::ldexp(1.0, j);
    CellSet E = level_set(r, Q, alpha);
    if (static_cast<double>(E.size()) <= cap) {
      c.found = true;
      c.alpha = alpha;
      c.E = std::move(E);
      return c;
    }
  }
  c.alpha = std::ldexp(1.0, config.alpha_ladder_top);
  c.E = level_set(r, Q, c.alpha);
  return c;
}

ComplexVector restricted_to(const ComplexVector& f, const CellRange& keep) {
  ComplexVector out = ComplexVector::Zero(f.size());
  const auto b = static_cast<Eigen::Index>(keep.begin), n = static_cast<Eigen::Index>(keep.size());
  out.segment(b, n) = f.segment(b, n);
  return out;
}

void require_root(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f) {
  if (!(T.domain() == pair.domain()) || !(T.domain() == f.domain()))
    throw DomainMismatch("sparse: operator, pair and f must share one domain");
}

}  // namespace

RealVector exceptional_ratios(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f,
                              const CellRange& Q) {
  require_root(T, pair, f);
  return ratios_for(T, psi_functions(pair, f.values()), Q);
}

CellSet exceptional_set(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f, const CellRange& Q,
                        double alpha) {
  if (!(alpha > 0)) throw ConfigError("exceptional_set: alpha must be positive");
  return level_set(exceptional_ratios(T, pair, f, Q), Q, alpha);
}

AlphaChoice select_alpha(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f, const CellRange& Q,
                         const SparseConfig& config) {
  return choose(exceptional_ratios(T, pair, f, Q), Q, config);
}

CzDecomposition cz_decompose(const Domain& domain, const CellSet& E, const DyadicInterval& Q, double height) {
  const CellRange q = Q.cells(domain);
  std::vector<char> inE(q.size(), 0);
  for (std::size_t c : E) {
    if (!q.contains(c)) throw ConfigError("cz_decompose: E must lie inside Q");
    inE[c - q.begin] = 1;
  }
  std::vector<std::size_t> prefix(q.size() + 1, 0);
  for (std::size_t i = 0; i < q.size(); ++i) prefix[i + 1] = prefix[i] + static_cast<std::size_t>(inE[i]);
  auto mass = [&](const CellRange& r) { return prefix[r.end - q.begin] - prefix[r.begin - q.begin]; };
  if (static_cast<double>(mass(q)) > height * static_cast<double>(q.size()))
    throw ConfigError("cz_decompose: <1_E>_Q exceeds the height; the root itself would be selected");

  CzDecomposition out;
  std::deque<DyadicInterval> todo;
  if (q.size() > 1) {
    todo.push_back(Q.child(0));
    todo.push_back(Q.child(1));
  }
  while (!todo.empty()) {
    const DyadicInterval P = todo.front();
    todo.pop_front();
    const CellRange r = P.cells(domain);
    const std::size_t m = mass(r);
    if (m == 0) continue;
    if (static_cast<double>(m) > height * static_cast<double>(r.size())) {
      out.cubes.push_back(P);
    } else if (r.size() > 1) {
      todo.push_back(P.child(0));
      todo.push_back(P.child(1));
    }
  }
  std::sort(out.cubes.begin(), out.cubes.end(), [&](const DyadicInterval& a, const DyadicInterval& b) {
    return a.cells(domain).begin < b.cells(domain).begin;
  });
  // property checks, cell-exact
  std::vector<char> covered(q.size(), 0);
  std::size_t total = 0;
  for (const auto& P : out.cubes) {
    const CellRange r = P.cells(domain);
    total += r.size();
    bool outside = false;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      if (covered[i - q.begin]) out.disjoint = false;
      covered[i - q.begin] = 1;
      if (!inE[i - q.begin]) outside = true;
    }
    if (!outside) out.meets_complement = false;
  }
  out.covered_cells = total;
  out.mass_bound = 2 * total <= q.size();
  for (std::size_t i = 0; i < q.size(); ++i)
    if (inE[i] && !covered[i]) out.covers_E = false;
  return out;
}

SparseFamily build_sparse(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f,
                          const DyadicInterval& root, const SparseConfig& config) {
  require_root(T, pair, f);
  if (!(config.height > 0 && config.height < 1)) throw ConfigError("sparse: height must lie in (0, 1)");
  if (!(config.e_fraction > 0 && config.e_fraction <= config.height)) throw ConfigError("sparse: e_fraction must lie in (0, height]");
  const Domain& dom = f.domain();
  const CellRange rootCells = root.cells(dom);
  const CellRange R = tripled(rootCells);
  if (R.empty() || R.end > dom.n_cells()) throw DomainMismatch("sparse: 3 x root leaves the window");
  const Psi psi = psi_functions(pair, restricted_to(f.values(), R));

  SparseFamily fam;
  fam.domain = dom;
  fam.root = root;
  struct Pending {
    DyadicInterval cube;
    int depth;
  };
  std::vector<Pending> frontier{{root, 0}};
  while (!frontier.empty()) {
    std::vector<SparseNode> made(frontier.size());
    std::vector<std::vector<Pending>> kids(frontier.size());
    std::vector<char> cz_good(frontier.size(), 1);
    parallel_for(frontier.size(), [&](std::size_t k) {
      const Pending& node = frontier[k];
      const CellRange q = node.cube.cells(dom);
      SparseNode& out = made[k];
      out.cube = node.cube;
      out.depth = node.depth;
      if (q.size() == 1 || node.depth >= config.max_depth) {
        for (std::size_t i = q.begin; i < q.end; ++i) out.carved.push_back(i);
        return;
      }
      const AlphaChoice choice = choose(ratios_for(T, psi, q), q, config);
      out.alpha = choice.alpha;
      std::vector<DyadicInterval> children;
      if (choice.found) {
        const CzDecomposition cz = cz_decompose(dom, choice.E, node.cube, config.height);
        cz_good[k] = cz.ok() ? 1 : 0;
        children = cz.cubes;
      } else {
        out.fallback = true;
        children = {node.cube.child(0), node.cube.child(1)};
      }
      std::vector<char> taken(q.size(), 0);
      for (const auto& P : children) {
        const CellRange r = P.cells(dom);
        for (std::size_t i = r.begin; i < r.end; ++i) taken[i - q.begin] = 1;
        kids[k].push_back({P, node.depth + 1});
      }
      for (std::size_t i = q.begin; i < q.end; ++i)
        if (!taken[i - q.begin]) out.carved.push_back(i);
    });
    std::vector<Pending> next;
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      if (!cz_good[k]) fam.cz_ok = false;
      if (made[k].fallback) ++fam.fallback_nodes;
      fam.alpha_max = std::max(fam.alpha_max, made[k].alpha);
      fam.depth = std::max(fam.depth, made[k].depth);
      fam.nodes.push_back(std::move(made[k]));
      for (auto& c : kids[k]) next.push_back(c);
    }
    frontier = std::move(next);
  }

  // serial post-pass: carved sets disjoint, sparseness, depth mass
  std::vector<char> mark(dom.n_cells(), 0);
  std::vector<std::size_t> depth_mass(static_cast<std::size_t>(fam.depth + 1), 0);
  fam.gamma = 1.0;
  for (const auto& n : fam.nodes) {
    for (std::size_t c : n.carved) {
      if (mark[c]) fam.carved_disjoint = false;
      mark[c] = 1;
    }
    const std::size_t size = n.cube.cells(dom).size();
    fam.gamma = std::min(fam.gamma, static_cast<double>(n.carved.size()) / static_cast<double>(size));
    depth_mass[static_cast<std::size_t>(n.depth)] += size;
  }
  for (std::size_t k = 0; k < depth_mass.size(); ++k) {
    const double allowed = std::ldexp(static_cast<double>(rootCells.size()), -static_cast<int>(k));
    fam.depth_mass_ratio = std::max(fam.depth_mass_ratio, static_cast<double>(depth_mass[k]) / allowed);
  }
  return fam;
}

SparseForms sparse_forms(const SparseFamily& family, const SymbolPair& pair, const SampledFunction& f,
                         FormSupport support) {
  if (!(pair.domain() == family.domain) || !(f.domain() == family.domain))
    throw DomainMismatch("sparse_forms: family, pair and f must share one domain");
  const auto n = static_cast<Eigen::Index>(family.domain.n_cells());
  SparseForms s{RealVector::Zero(n), RealVector::Zero(n), RealVector::Zero(n), RealVector::Zero(n)};
  const ComplexVector& b1 = pair.b1.values();
  const ComplexVector& b2 = pair.b2.values();
  const RealVector af = f.values().cwiseAbs();
  for (const auto& node : family.nodes) {
    CellRange r = node.cube.cells(family.domain);
    if (support == FormSupport::tripled) {
      r = tripled(r);
      if (r.empty() || r.end > family.domain.n_cells()) throw DomainMismatch("sparse_forms: 3Q leaves the window");
    }
    const auto b = static_cast<Eigen::Index>(r.begin), m = static_cast<Eigen::Index>(r.size());
    const Complex c1 = b1.segment(b, m).mean(), c2 = b2.segment(b, m).mean();
    const RealVector o1 = (b1.segment(b, m).array() - c1).abs().matrix();
    const RealVector o2 = (b2.segment(b, m).array() - c2).abs().matrix();
    const auto fseg = af.segment(b, m);
    const double mf = fseg.mean();
    const double m1f = o1.cwiseProduct(fseg).mean();
    const double m2f = o2.cwiseProduct(fseg).mean();
    const double m12f = o1.cwiseProduct(o2).cwiseProduct(fseg).mean();
    s.s1.segment(b, m) += o1.cwiseProduct(o2) * mf;
    s.s2.segment(b, m) += o2 * m1f;
    s.s3.segment(b, m) += o1 * m2f;
    s.s4.segment(b, m).array() += m12f;
  }
  return s;
}

DominationReport verify_domination(const KernelOperator& T, const SymbolPair& pair, const SampledFunction& f,
                                   const SparseFamily& family, FormSupport support) {
  require_root(T, pair, f);
  const CellRange root = family.root.cells(family.domain);
  const CellRange R = tripled(root);
  const SampledFunction local(f.domain(), restricted_to(f.values(), R));
  const ComplexVector c = commutator_apply(T, pair, local).values();
  const RealVector denom = sparse_forms(family, pair, local, support).total();
  DominationReport rep;
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  for (std::size_t i = root.begin; i < root.end; ++i) {
    const auto at = static_cast<Eigen::Index>(i);
    const double num = std::abs(c[at]);
    ++rep.cells_checked;
    if (denom[at] > 1e-14) {
      rep.max_ratio = std::max(rep.max_ratio, num / denom[at]);
    } else if (num > 1e-10 * scale) {
      rep.violation_cells.push_back(i);
    }
  }
  return rep;
}

SparseBound sparse_bound_l2(const KernelOperator& T, const SparseFamily& family, const SymbolPair& pair,
                            const SampledFunction& f, const YoungFunction& A, const YoungFunction& B,
                            const YoungFunction& C, FormSupport support) {
  require_root(T, pair, f);
  SparseBound out;
  const YoungFunction Abar = complementary(A), Bbar = complementary(B), Cbar = complementary(C);
  for (const auto* y : {&Abar, &Bbar, &Cbar}) {
    if (!bp_classify(*y, 2.0).member) {
      out.bp_warning = true;
      out.warnings.push_back("complement of " + y->complement_of()->spec() + " is not in B_2");
    }
  }
  const Domain& dom = family.domain;
  const double h = dom.cell_width();
  const CellRange root = family.root.cells(dom);
  const CellRange R = tripled(root);
  const SampledFunction local(f.domain(), restricted_to(f.values(), R));
  const ComplexVector cf = commutator_apply(T, pair, local).values();
  // g = f restricted to the root: the pairing then lives on the root cells
  const ComplexVector g = restricted_to(f.values(), root);
  out.pairing = std::abs(g.dot(cf)) * h;
  out.domination = verify_domination(T, pair, f, family, support).max_ratio;

  const ComplexVector& b1 = pair.b1.values();
  const ComplexVector& b2 = pair.b2.values();
  double sab = 0.0, tc = 0.0;
  for (const auto& node : family.nodes) {
    CellRange r = node.cube.cells(dom);
    if (support == FormSupport::tripled) r = tripled(r);
    const auto b = static_cast<Eigen::Index>(r.begin), m = static_cast<Eigen::Index>(r.size());
    const Complex c1 = b1.segment(b, m).mean(), c2 = b2.segment(b, m).mean();
    Samples o1, o2, o12, sf, sg;
    o1.values = (b1.segment(b, m).array() - c1).abs().matrix();
    o2.values = (b2.segment(b, m).array() - c2).abs().matrix();
    o12.values = o1.values.cwiseProduct(o2.values);
    sf.values = local.values().segment(b, m).cwiseAbs();
    sg.values = g.segment(b, m).cwiseAbs();
    const RealVector w = RealVector::Constant(m, 1.0 / static_cast<double>(m));
    o1.weights = o2.weights = o12.weights = sf.weights = sg.weights = w;
    const double len = static_cast<double>(m) * h;
    const double lA = luxemburg_norm(o1, A), lB = luxemburg_norm(o2, B), lC = luxemburg_norm(o12, C);
    sab = std::max(sab, lA * lB);
    tc = std::max(tc, lC);
    const double fA = luxemburg_norm(sf, Abar), fB = luxemburg_norm(sf, Bbar), fC = luxemburg_norm(sf, Cbar);
    const double gA = luxemburg_norm(sg, Abar), gB = luxemburg_norm(sg, Bbar), gC = luxemburg_norm(sg, Cbar);
    const double mf = sf.values.mean(), mg = sg.values.mean();
    out.majorants[0] += len * mf * 2.0 * lC * gC;
    out.majorants[1] += len * 2.0 * lA * fA * 2.0 * lB * gB;
    out.majorants[2] += len * 2.0 * lB * fB * 2.0 * lA * gA;
    out.majorants[3] += len * 2.0 * lC * fC * mg;
  }
  out.bound = out.domination * (out.majorants[0] + out.majorants[1] + out.majorants[2] + out.majorants[3]);

  // maximal-function chain over dyadic scans (diagnostic)
  const SampledFunction absf(dom, local.values().cwiseAbs());
  const SampledFunction absg(dom, g.cwiseAbs());
  const YoungFunction one = YoungFunction::power(1.0);
  auto pairing = [&](const SampledFunction& u, const SampledFunction& v) {
    return u.values().cwiseAbs().dot(v.values().cwiseAbs()) * h;
  };
  const double sparse_factor = (support == FormSupport::tripled ? 3.0 : 1.0) / std::max(family.gamma, 1e-300);
  out.maximal_chain =
      out.domination * sparse_factor *
      (2.0 * tc * pairing(orlicz_maximal(absf, one), orlicz_maximal(absg, Cbar)) +
       4.0 * sab * pairing(orlicz_maximal(absf, Abar), orlicz_maximal(absg, Bbar)) +
       4.0 * sab * pairing(orlicz_maximal(absf, Bbar), orlicz_maximal(absg, Abar)) +
       2.0 * tc * pairing(orlicz_maximal(absf, Cbar), orlicz_maximal(absg, one)));
  return out;
}

}  // namespace jointosc
