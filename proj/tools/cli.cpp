#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "jointosc/conditions.hpp"
#include "jointosc/gallery.hpp"
#include "jointosc/report.hpp"
#include "jointosc/singular.hpp"
#include "jointosc/sparse.hpp"
#include "jointosc/young.hpp"

namespace jointosc {

namespace {

/// Where the symbols come from and which grid they are sampled on.
struct PairOptions {
  std::string pair;
  std::string b1_path, b2_path, product_path;
  std::vector<double> window;
  std::size_t n_cells = 0;
  std::uint64_t seed = 0;
  int k_max = 6;
};

struct ResolvedPair {
  SymbolPair symbols;
  Json description;
};

void add_pair_options(CLI::App* cmd, PairOptions& o) {
  cmd->add_option("--pair", o.pair, "Gallery pair name");
  cmd->add_option("--b1", o.b1_path, "CSV (x,re,im) for b1");
  cmd->add_option("--b2", o.b2_path, "CSV (x,re,im) for b2");
  cmd->add_option("--product", o.product_path, "CSV for b1 b2 (default: cellwise product)");
  cmd->add_option("--window", o.window, "Window left right")->expected(2);
  cmd->add_option("--ncells", o.n_cells, "Number of cells (power of two)");
  cmd->add_option("--seed", o.seed, "Seed for random gallery members and test functions");
  cmd->add_option("--k-max", o.k_max, "nip1 block cap");
}

GalleryPair gallery_pair(const PairOptions& o) {
  if (o.pair == "nip1") return make_nip1_pair(o.k_max);
  return make_pair(o.pair, o.seed);
}

Domain resolve_domain(const PairOptions& o, const WindowHint& hint) {
  const double l = o.window.empty() ? hint.left : o.window[0];
  const double r = o.window.empty() ? hint.right : o.window[1];
  const std::size_t n = o.n_cells ? o.n_cells : hint.n_cells;
  if (!(r > l)) throw ConfigError("--window: left must be below right");
  return Domain(l, r, n);
}

ResolvedPair resolve_pair(const PairOptions& o) {
  if (!o.pair.empty()) {
    if (!o.b1_path.empty() || !o.b2_path.empty()) throw ConfigError("--pair: give a gallery name or --b1/--b2, not both");
    const GalleryPair g = gallery_pair(o);
    const Domain d = resolve_domain(o, g.window_hint);
    return {g.on(d), to_json(g)};
  }
  if (o.b1_path.empty() || o.b2_path.empty()) throw ConfigError("--pair: need a gallery name or both --b1 and --b2");
  SampledFunction b1 = read_function_csv(o.b1_path), b2 = read_function_csv(o.b2_path);
  Json desc = {{"name", "csv"}, {"b1", o.b1_path}, {"b2", o.b2_path}};
  if (!o.product_path.empty()) {
    desc["product"] = o.product_path;
    return {SymbolPair(b1, b2, read_function_csv(o.product_path), "csv"), desc};
  }
  return {SymbolPair::from_factors(b1, b2, "csv"), desc};
}

Json domain_json(const Domain& d) { return {{"window", {d.left(), d.right()}}, {"n_cells", d.n_cells()}}; }

Json pair_config(const PairOptions& o, const ResolvedPair& p) {
  Json j = domain_json(p.symbols.domain());
  j["pair"] = p.description;
  j["seed"] = o.seed;
  return j;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ConfigError(flag + ": expected a..b");
  try {
    return {std::stod(text.substr(0, dots)), std::stod(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ConfigError(flag + ": cannot parse '" + text + "'");
  }
}

std::optional<YoungFunction> optional_young(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  return parse_young(spec);
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    write_json(out, j);
  } else {
    write_json(path, j);
  }
}

// scan

struct ScanOptions {
  PairOptions pair;
  std::string condition = "s_p";
  double p = 2.0;
  std::string A, B, C;
  std::string levels;
  bool no_shift = false;
  std::string ladder;
  std::string k_range = "16..65536";
  double anchor = 0.0;
  std::string out, csv;
};

int cmd_scan(const ScanOptions& o, std::ostream& out) {
  ConditionSpec spec{parse_condition(o.condition), o.p, optional_young(o.A), optional_young(o.B), optional_young(o.C)};
  spec.validate();
  const ResolvedPair rp = resolve_pair(o.pair);
  Json config = pair_config(o.pair, rp);
  config["command"] = "scan";
  config["condition"] = to_json(spec);

  ConditionReport report;
  if (o.ladder.empty()) {
    ScanSchedule schedule;
    schedule.one_third_shift = !o.no_shift;
    if (!o.levels.empty()) {
      const auto [lo, hi] = parse_range(o.levels, "--levels");
      schedule.min_level = static_cast<int>(lo);
      schedule.max_level = static_cast<int>(hi);
    }
    const auto [lo, hi] = resolve_levels(rp.symbols.domain(), schedule);
    config["levels"] = {lo, hi};
    config["one_third_shift"] = schedule.one_third_shift;
    report = scan_condition(rp.symbols, spec, schedule);
  } else {
    const auto [k0, k1] = parse_range(o.k_range, "--k-range");
    if (!(k0 > 0) || !(k1 >= k0)) throw ConfigError("--k-range: need 0 < a <= b");
    std::vector<double> ks;
    for (double k = k0; k <= k1 * (1 + 1e-12); k *= 2) ks.push_back(k);
    std::vector<CellRange> rungs;
    if (o.ladder == "symmetric") {
      rungs = symmetric_ladder(rp.symbols.domain(), ks);
    } else if (o.ladder == "anchored") {
      rungs = anchored_ladder(rp.symbols.domain(), o.anchor, ks);
      config["anchor"] = o.anchor;
    } else {
      throw ConfigError("--ladder: expected symmetric or anchored");
    }
    config["ladder"] = o.ladder;
    config["k_range"] = {k0, k1};
    report = scan_ladder(rp.symbols, spec, rungs, o.ladder);
  }
  Json j = to_json(report);
  j["config"] = config;
  emit(j, o.out, out);
  if (!o.csv.empty()) {
    std::ofstream csv(o.csv);
    if (!csv) throw DataError("--csv: cannot write " + o.csv);
    write_scale_csv(csv, report);
  }
  return 0;
}

// commutator

struct CommutatorOptions {
  PairOptions pair;
  std::string mode = "norm";
  std::string kernel = "quadrature";
  double epsilon = 0.0;
  std::string input = "witness_f";
  double R = 1e4;
  double q = 2.0;
  std::vector<double> target;
  double tol = 1e-6;
  int max_iterations = 5000;
  bool matrix_free = false;
  std::string out, function_out;
};

KernelKind parse_kernel(const std::string& name) {
  if (name == "quadrature") return KernelKind::hilbert_quadrature;
  if (name == "spectral") return KernelKind::hilbert_spectral;
  throw ConfigError("--kernel: expected quadrature or spectral, got '" + name + "'");
}

SampledFunction resolve_input(const std::string& input, double R, double q, const Domain& d, std::uint64_t seed) {
  if (input == "witness_f") return sample(log_witness(R), d);
  if (input == "witness_power") return sample(power_witness(q, R), d);
  if (input == "random") return sample(smooth_random_function(seed, d.left(), d.right()), d);
  if (input == "zero") return SampledFunction::zero(d);
  SampledFunction f = read_function_csv(input);
  if (!(f.domain() == d)) throw DomainMismatch("--input: file grid differs from the pair grid");
  return f;
}

int cmd_commutator(const CommutatorOptions& o, std::ostream& out) {
  const ResolvedPair rp = resolve_pair(o.pair);
  const Domain& d = rp.symbols.domain();
  const KernelOperator T(parse_kernel(o.kernel), d, o.epsilon);
  Json config = pair_config(o.pair, rp);
  config["command"] = "commutator";
  config["mode"] = o.mode;
  config["kernel"] = o.kernel;
  config["epsilon"] = T.epsilon();

  Json j;
  if (o.mode == "norm") {
    NormOptions no;
    no.tol = o.tol;
    no.max_iterations = o.max_iterations;
    no.seed = o.pair.seed;
    no.matrix_free = o.matrix_free || d.n_cells() > 4096;
    config["tol"] = no.tol;
    config["max_iterations"] = no.max_iterations;
    config["matrix_free"] = no.matrix_free;
    j = to_json(operator_norm(T, rp.symbols, no));
  } else if (o.mode == "apply") {
    const SampledFunction f = resolve_input(o.input, o.R, o.q, d, o.pair.seed);
    config["input"] = o.input;
    if (o.input.rfind("witness", 0) == 0) config["R"] = o.R;
    if (o.input == "witness_power") config["q"] = o.q;
    const double tl = o.target.empty() ? -1.0 : o.target[0];
    const double tr = o.target.empty() ? 1.0 : o.target[1];
    const CellRange target = cells_of(d, std::max(tl, d.left()), std::min(tr, d.right()));
    config["target"] = {d.cell_left(target.begin), d.cell_left(target.end)};
    const SampledFunction g = commutator_apply(T, rp.symbols, f);
    double sq = 0.0, total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      total += std::norm(g[i]);
      if (target.contains(i)) sq += std::norm(g[i]);
    }
    const double h = d.cell_width();
    j = {{"l2_on_target", number(std::sqrt(sq * h))}, {"l2_total", number(std::sqrt(total * h))}};
    if (!o.function_out.empty()) {
      write_function_csv(o.function_out, g);
      j["function_csv"] = o.function_out;
    }
  } else {
    throw ConfigError("--mode: expected apply or norm, got '" + o.mode + "'");
  }
  j["config"] = config;
  emit(j, o.out, out);
  return 0;
}

// sparse

struct SparseOptions {
  PairOptions pair;
  int root_level = 2;
  std::size_t root_index = 1;
  std::string f = "random";
  std::optional<double> alpha;
  bool verify = false;
  bool bound = false;
  std::string A = "power:p=2.5", B = "power:p=2.5", C = "power:p=2.5";
  std::string support = "tripled";
  std::string out;
};

int cmd_sparse(const SparseOptions& o, std::ostream& out) {
  const ResolvedPair rp = resolve_pair(o.pair);
  const Domain& d = rp.symbols.domain();
  const DyadicInterval root{o.root_level, o.root_index};
  if (o.root_level < 0 || o.root_level > d.depth() || o.root_index >= (std::size_t{1} << o.root_level))
    throw ConfigError("--root-level/--root-index: not a dyadic interval of the window");
  const CellRange keep = tripled(root.cells(d));
  if (keep.empty() || keep.end > d.n_cells()) throw ConfigError("--root-level: 3 root must lie inside the window");
  SampledFunction f;
  if (o.f == "random") {
    f = sample(smooth_random_function(1000 + o.pair.seed, d.left(), d.right()), d).restricted(keep);
  } else if (o.f == "zero") {
    f = SampledFunction::zero(d);
  } else {
    f = read_function_csv(o.f);
    if (!(f.domain() == d)) throw DomainMismatch("--f: file grid differs from the pair grid");
  }
  FormSupport support;
  if (o.support == "tripled") {
    support = FormSupport::tripled;
  } else if (o.support == "cube") {
    support = FormSupport::cube;
  } else {
    throw ConfigError("--support: expected cube or tripled");
  }
  const KernelOperator T(KernelKind::hilbert_quadrature, d);
  SparseConfig sc;
  sc.alpha = o.alpha;
  const SparseFamily fam = build_sparse(T, rp.symbols, f, root, sc);

  Json config = pair_config(o.pair, rp);
  config["command"] = "sparse";
  config["root"] = {{"level", o.root_level}, {"index", o.root_index}};
  config["f"] = o.f;
  config["alpha"] = o.alpha ? number(*o.alpha) : Json("auto");
  config["support"] = o.support;
  Json j;
  j["family"] = to_json(fam);
  if (o.verify) j["domination"] = to_json(verify_domination(T, rp.symbols, f, fam, support), d);
  if (o.bound) {
    const YoungFunction a = parse_young(o.A), b = parse_young(o.B), c = parse_young(o.C);
    config["A"] = a.spec();
    config["B"] = b.spec();
    config["C"] = c.spec();
    j["bound"] = to_json(sparse_bound_l2(T, fam, rp.symbols, f, a, b, c, support));
  }
  j["config"] = config;
  emit(j, o.out, out);
  return 0;
}

// young

struct YoungOptions {
  std::string fn;
  bool duality = false;
  double probe_min = 1e-4, probe_max = 1e8;
  int probes = 1000;
  std::optional<double> bp;
  std::string of = "self";
  std::vector<double> eval_at;
  std::vector<double> inverse_at;
  std::string out;
};

int cmd_young(const YoungOptions& o, std::ostream& out) {
  const YoungFunction a = parse_young(o.fn);
  Json config = {{"command", "young"}, {"fn", a.spec()}};
  Json j;
  if (!o.eval_at.empty()) {
    Json rows = Json::array();
    for (double t : o.eval_at) rows.push_back({{"t", t}, {"value", number(eval(a, t))}});
    j["eval"] = rows;
  }
  if (!o.inverse_at.empty()) {
    Json rows = Json::array();
    for (double s : o.inverse_at) rows.push_back({{"s", s}, {"inverse", number(inverse(a, s))}});
    j["inverse"] = rows;
  }
  if (o.duality) {
    if (o.probes < 2 || !(o.probe_min > 0) || !(o.probe_max > o.probe_min))
      throw ConfigError("--probes/--probe-min/--probe-max: need at least 2 probes on 0 < min < max");
    const auto probes = log_probes(o.probe_min, o.probe_max, o.probes);
    const auto r = duality_sandwich(a, complementary(a), probes);
    config["probes"] = {{"min", o.probe_min}, {"max", o.probe_max}, {"count", o.probes}};
    j["duality"] = {{"min_ratio", number(r.min_ratio)}, {"max_ratio", number(r.max_ratio)}};
  }
  if (o.bp) {
    config["of"] = o.of;
    if (o.of == "self") {
      j["bp"] = to_json(bp_classify(a, *o.bp));
    } else if (o.of == "complement") {
      j["bp"] = to_json(bp_classify(complementary(a), *o.bp));
    } else {
      throw ConfigError("--of: expected self or complement");
    }
  }
  if (j.empty()) throw ConfigError("young: give at least one of --eval, --inverse, --duality, --bp");
  j["config"] = config;
  emit(j, o.out, out);
  return 0;
}

// pair

int cmd_pair_list(std::ostream& out) {
  Json j = Json::array();
  for (const auto& n : pair_names()) j.push_back(n);
  write_json(out, j);
  return 0;
}

int cmd_pair_show(const std::string& name, const PairOptions& o, std::ostream& out) {
  PairOptions po = o;
  po.pair = name;
  Json j = to_json(gallery_pair(po));
  j["config"] = {{"command", "pair show"}, {"seed", o.seed}, {"k_max", o.k_max}};
  write_json(out, j);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint oscillation toolkit: condition scans, iterated commutators, sparse domination."};
  app.require_subcommand(1);

  ScanOptions scan;
  auto* sc = app.add_subcommand("scan", "Scan a condition over dyadic intervals or a ladder");
  add_pair_options(sc, scan.pair);
  sc->add_option("--condition", scan.condition, "s_p, t_p, s_ab or t_c");
  sc->add_option("--p", scan.p, "Exponent for s_p / t_p");
  sc->add_option("--A", scan.A, "Young function A (s_ab)");
  sc->add_option("--B", scan.B, "Young function B (s_ab)");
  sc->add_option("--C", scan.C, "Young function C (t_c)");
  sc->add_option("--levels", scan.levels, "Level range a..b");
  sc->add_flag("--no-shift", scan.no_shift, "Skip the one-third shifted copies");
  sc->add_option("--ladder", scan.ladder, "symmetric (-k,k) or anchored (a,a+k) instead of a dyadic scan");
  sc->add_option("--k-range", scan.k_range, "Ladder range a..b, doubling");
  sc->add_option("--anchor", scan.anchor, "Left end a of the anchored ladder");
  sc->add_option("--out", scan.out, "JSON report path (default stdout)");
  sc->add_option("--csv", scan.csv, "Per-scale CSV path");

  CommutatorOptions com;
  auto* cc = app.add_subcommand("commutator", "Apply [b2,[b1,H]] or estimate its norm");
  add_pair_options(cc, com.pair);
  cc->add_option("--mode", com.mode, "apply or norm");
  cc->add_option("--kernel", com.kernel, "quadrature or spectral");
  cc->add_option("--epsilon", com.epsilon, "Quadrature truncation radius (default one cell)");
  cc->add_option("--input", com.input, "witness_f, witness_power, random, zero or a CSV path");
  cc->add_option("--R", com.R, "Witness cutoff R");
  cc->add_option("--q", com.q, "Exponent of witness_power");
  cc->add_option("--target", com.target, "Interval for the output norm (default -1 1)")->expected(2);
  cc->add_option("--tol", com.tol, "Power iteration tolerance");
  cc->add_option("--max-iterations", com.max_iterations, "Power iteration cap");
  cc->add_flag("--matrix-free", com.matrix_free, "Matrix-free power iteration (forced above 4096 cells)");
  cc->add_option("--out", com.out, "JSON report path (default stdout)");
  cc->add_option("--function-out", com.function_out, "CSV path for the output function");

  SparseOptions sp;
  auto* spc = app.add_subcommand("sparse", "Build a sparse family and check domination");
  add_pair_options(spc, sp.pair);
  spc->add_option("--root-level", sp.root_level, "Level of the root interval");
  spc->add_option("--root-index", sp.root_index, "Index of the root interval");
  spc->add_option("--f", sp.f, "random, zero or a CSV path");
  spc->add_option("--alpha", sp.alpha, "Fixed level-set multiplier");
  spc->add_flag("--verify", sp.verify, "Check pointwise domination");
  spc->add_flag("--bound", sp.bound, "Orlicz sparse bound against the pairing");
  spc->add_option("--A", sp.A, "Young function A");
  spc->add_option("--B", sp.B, "Young function B");
  spc->add_option("--C", sp.C, "Young function C");
  spc->add_option("--support", sp.support, "cube or tripled sparse forms");
  spc->add_option("--out", sp.out, "JSON report path (default stdout)");

  YoungOptions yo;
  auto* yc = app.add_subcommand("young", "Young function checks");
  yc->add_option("--fn", yo.fn, "Young function spec")->required();
  yc->add_flag("--duality", yo.duality, "A^-1 Abar^-1 / t over log-spaced probes");
  yc->add_option("--probe-min", yo.probe_min, "Smallest probe");
  yc->add_option("--probe-max", yo.probe_max, "Largest probe");
  yc->add_option("--probes", yo.probes, "Probe count");
  yc->add_option("--bp", yo.bp, "Classify membership in B_p");
  yc->add_option("--of", yo.of, "self or complement");
  yc->add_option("--eval", yo.eval_at, "Evaluate A at t");
  yc->add_option("--inverse", yo.inverse_at, "Evaluate A^-1 at s");
  yc->add_option("--out", yo.out, "JSON report path (default stdout)");

  auto* pc = app.add_subcommand("pair", "Gallery pairs");
  pc->require_subcommand(1);
  pc->add_subcommand("list", "Gallery names");
  PairOptions show;
  std::string show_name;
  auto* psc = pc->add_subcommand("show", "Pair parameters and window hint");
  psc->add_option("name", show_name, "Gallery name")->required();
  psc->add_option("--seed", show.seed, "Seed");
  psc->add_option("--k-max", show.k_max, "nip1 block cap");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (sc->parsed()) return cmd_scan(scan, out);
    if (cc->parsed()) return cmd_commutator(com, out);
    if (spc->parsed()) return cmd_sparse(sp, out);
    if (yc->parsed()) return cmd_young(yo, out);
    if (psc->parsed()) return cmd_pair_show(show_name, show, out);
    return cmd_pair_list(out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << " (last estimate " << e.last_value() << ")\n";
    return 4;
  } catch (const std::overflow_error& e) {
    err << "numerical error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace jointosc
