// sparsepdo: experiment driver. Every subcommand writes CSV (stdout or --out)
// and a short summary on stderr.
//
// Exit status: 0 pass, 1 fail, 2 configuration error, 3 non-finite result.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "acceptance.hpp"
#include "sparsepdo/config.hpp"
#include "sparsepdo/csv.hpp"
#include "sparsepdo/maximal.hpp"
#include "sparsepdo/multiplier.hpp"
#include "sparsepdo/parallel.hpp"
#include "sparsepdo/pdo.hpp"
#include "sparsepdo/sparse.hpp"
#include "sparsepdo/weights.hpp"

using namespace sparsepdo;

namespace {

struct Run {
  ExperimentConfig cfg;
  std::set<std::string> given;  // keys set by the config file or on the command line
  std::ostream* os = &std::cout;
  bool plot = false;
  bool nonfinite = false;

  bool has(const std::string& key) const { return given.count(key) > 0; }

  std::string str(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    const auto it = cfg.extra.find(key);
    if (it != cfg.extra.end()) return it->second;
    if (fallback) return *fallback;
    throw ConfigError("missing parameter --" + key);
  }
  double num(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const auto it = cfg.extra.find(key);
    if (it != cfg.extra.end()) return parse_number(it->second);
    if (fallback) return *fallback;
    throw ConfigError("missing parameter --" + key);
  }
  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) const {
    const auto it = cfg.extra.find(key);
    if (it != cfg.extra.end()) return parse_int(it->second);
    if (fallback) return *fallback;
    throw ConfigError("missing parameter --" + key);
  }
  std::mt19937_64 rng(std::uint64_t stream) const {
    std::seed_seq seq{std::uint64_t(cfg.seed), stream};
    return std::mt19937_64(seq);
  }
  void finish(const CsvWriter& w) { nonfinite = nonfinite || w.saw_nonfinite(); }
};

using Handler = bool (*)(Run&);

struct Command {
  CLI::App* app = nullptr;
  Handler handler = nullptr;
  std::map<std::string, std::string> values;  // node-stable storage for CLI11
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::string config_path;
  bool quick = false;
  bool plot = false;

  void add(const std::string& key, const std::string& help) {
    std::string flag = key;
    for (char& c : flag)
      if (c == '_') c = '-';
    options.emplace_back(key, app->add_option("--" + flag, values[key], help));
  }
};

// Test input: a few modulated bumps with physical parameters.
GridFunction bumps(const Lattice& lat, std::mt19937_64& rng, int count = 4) {
  const double narrow = std::max(0.08, 2.0 * lat.spacing());
  const double omega = std::min(12.0, lat.nyquist() / 4.0);
  GridFunction f(lat);
  for (int i = 0; i < count; ++i)
    f.values() += random_bump(rng, lat.length(), i == 0 ? narrow : 0.3, i == 0 ? 2.0 * narrow : 2.0, omega)
                      .on(lat)
                      .values();
  return f;
}

ExponentPair exponent_pair(const Run& run) {
  if (run.has("r") || run.has("sprime")) return {run.num("r"), run.num("sprime")};
  if (!run.cfg.exponents.empty()) return {run.cfg.exponents.front().first, run.cfg.exponents.front().second};
  throw ConfigError("missing exponent pair (--r and --sprime, or exponents = r:s')");
}

void write_plot(const Run& run, const std::string& body) {
  if (!run.plot) return;
  if (run.cfg.out.empty()) throw ConfigError("--plot needs --out");
  std::ofstream gp(run.cfg.out + ".gp");
  gp << "set datafile separator ','\nset key autotitle columnhead\n" << body;
}

// ---------------------------------------------------------------------------

bool cmd_region(Run& run) {
  const Region R = region_vertices(run.num("m"), run.num("rho", 0.0), run.cfg.n);
  CsvWriter w(*run.os, {"vertex", "x", "y"});
  for (std::size_t i = 0; i < R.vertices.size(); ++i)
    w.row({static_cast<long long>(i + 1), R.vertices[i][0], R.vertices[i][1]});
  run.finish(w);
  std::cerr << "vertex case " << R.vertex_case << ", x = 1/r, y = 1/s'\n";
  write_plot(run, "set xrange [0:1]\nset yrange [0:1]\nplot '" + run.cfg.out +
                      "' using 2:3 with linespoints title 'region'\n");
  return true;
}

bool cmd_decay(Run& run) {
  const Symbol a = symbol_from_preset(run.cfg.symbol);
  const Lattice lat = run.cfg.lattice();
  const std::string mode = run.str("norm", "22");
  const int j_min = run.integer("j_min", 4);
  const int j_max = run.cfg.j_max > 0 ? run.cfg.j_max : 9;
  const double eps = run.cfg.epsilon;
  CsvWriter w(*run.os, {"j", "l", "r", "s", "norm", "bound_kind"});

  if (mode == "pieces") {
    std::vector<std::pair<int, int>> tasks;
    for (int j = j_min; j <= j_max; ++j) {
      auto [lo, hi] = spatial_range(a, j, lat);
      if (run.cfg.l_range) {
        lo = std::max(lo, run.cfg.l_range->first);
        hi = std::min(hi, run.cfg.l_range->second);
      }
      for (int l = lo; l <= hi; ++l) tasks.emplace_back(j, l);
    }
    const auto norms = parallel_map<NormResult>(tasks.size(), [&](std::size_t i) {
      return opnorm(spatial_piece(a, tasks[i].first, tasks[i].second, lat), 2, 2);
    });
    for (std::size_t i = 0; i < tasks.size(); ++i)
      w.row({static_cast<long long>(tasks[i].first), static_cast<long long>(tasks[i].second), 2.0, 2.0,
             norms[i].estimate, to_string(norms[i].kind)});
    run.finish(w);
    return true;
  }

  double r = 2.0, s = 2.0, bound = a.params.m;
  if (mode == "1inf") {
    r = 1.0;
    s = kInf;
    bound = a.params.m + 1.0;
  } else if (mode == "kernel") {
    r = s = 1.0;
    bound = a.params.m + (1.0 - a.params.rho) / 2.0;
  } else if (mode == "rs") {
    r = run.num("r");
    s = run.num("s");
    bound = kInf;
  } else if (mode != "22") {
    throw ConfigError("--norm must be 22, 1inf, kernel, rs or pieces");
  }
  std::vector<int> js;
  for (int j = j_min; j <= j_max; ++j) js.push_back(j);
  const auto norms = parallel_map<NormResult>(js.size(), [&](std::size_t i) {
    if (mode == "kernel") return NormResult{kernel_l1(a, js[i], lat), kernel_l1(a, js[i], lat), BoundKind::Exact};
    return opnorm(local_part(a, js[i], eps, lat), r, s);
  });
  std::vector<double> values;
  for (std::size_t i = 0; i < js.size(); ++i) {
    values.push_back(norms[i].estimate);
    w.row({static_cast<long long>(js[i]), static_cast<long long>(std::floor(js[i] * eps + 1e-12)), r, s,
           norms[i].estimate, to_string(norms[i].kind)});
  }
  run.finish(w);
  const DecayFit fit = decay_fit(js, values);
  std::cerr << "slope " << format_number(fit.slope) << " (rms residual " << format_number(fit.residual) << ")";
  if (std::isfinite(bound)) std::cerr << ", bound " << format_number(bound) << " + 0.15";
  std::cerr << '\n';
  write_plot(run, "set logscale y 2\nplot '" + run.cfg.out + "' using 1:5 with linespoints title 'norm'\n");
  return fit.slope <= bound + 0.15;
}

bool cmd_dominate(Run& run) {
  const Symbol a = symbol_from_preset(run.cfg.symbol);
  const Lattice lat = run.cfg.lattice();
  const ExponentPair pt = exponent_pair(run);
  DominateOptions opt;
  opt.decomposition.epsilon = run.cfg.epsilon;
  opt.decomposition.j_max = run.cfg.j_max;
  const auto results = parallel_map<DominateResult>(std::size_t(run.cfg.trials), [&](std::size_t t) {
    auto rng = run.rng(t);
    const GridFunction f = bumps(lat, rng), g = bumps(lat, rng);
    return dominate(a, f, g, pt, opt);
  });
  CsvWriter w(*run.os, {"trial", "pairing", "form", "ratio"});
  double worst = 0.0;
  for (std::size_t t = 0; t < results.size(); ++t) {
    w.row({static_cast<long long>(t), results[t].pairing, results[t].sparse_value, results[t].ratio});
    worst = std::max(worst, results[t].ratio);
  }
  run.finish(w);
  if (!results.empty() && !results.front().warning.empty()) std::cerr << "warning: " << results.front().warning << '\n';
  std::cerr << "max ratio " << format_number(worst) << '\n';
  return results.front().warning.empty() && std::isfinite(worst);
}

bool cmd_sharpness(Run& run) {
  SharpnessOptions o;
  if (run.has("L")) o.length = run.cfg.length;
  if (run.has("N")) o.samples = run.cfg.samples;
  o.epsilon = run.cfg.epsilon;
  std::vector<int> js;
  for (int j = run.integer("j_min", 4); j <= (run.cfg.j_max > 0 ? run.cfg.j_max : 9); ++j) js.push_back(j);
  const auto rows = sharpness_probe(run.num("m"), run.num("rho", 0.0), run.cfg.n, exponent_pair(run), js, o);
  std::map<int, double> best;
  for (const auto& row : rows) best[row.j] = std::max(best[row.j], row.ratio);
  CsvWriter w(*run.os, {"j", "ratio"});
  bool monotone = true;
  double prev = 0.0;
  for (const auto& [j, v] : best) {
    w.row({static_cast<long long>(j), v});
    monotone = monotone && v > prev;
    prev = v;
  }
  run.finish(w);
  const double growth = best.rbegin()->second / best.begin()->second;
  std::cerr << "growth " << format_number(growth) << (monotone ? ", monotone\n" : ", not monotone\n");
  write_plot(run, "set logscale y 2\nplot '" + run.cfg.out + "' using 1:2 with linespoints title 'ratio'\n");
  return monotone && growth >= 2.0;
}

MaximalKind control_kind(const std::string& text) {
  const Preset p = parse_preset(text);
  if (p.name == "hl") return MaximalKind::hl();
  if (p.name == "lp") return MaximalKind::lp(p.require("p"));
  if (p.name == "gamma") return MaximalKind::power_gamma(p.require("gamma"));
  if (p.name == "iterated") return MaximalKind::iterated(int(p.require("k")));
  throw ConfigError("--control must be hl, lp:p=.., gamma:gamma=.. or iterated:k=..");
}

bool cmd_weights(Run& run) {
  const Lattice lat = run.cfg.lattice();
  const std::string spec = run.str("weight", "power:a=0.5");
  const Weight w = weight_from_preset(spec, lat);
  const std::string check = run.str("check", "ap");
  if (check == "ap" || check == "rh") {
    const double q = run.num(check == "ap" ? "p" : "q", 2.0);
    const double v = check == "ap" ? ap_characteristic(w, q) : rh_characteristic(w, q);
    CsvWriter out(*run.os, {check == "ap" ? "p" : "q", check});
    out.row({q, v});
    run.finish(out);
    return std::isfinite(v);
  }
  const double p = run.num("p", 2.0), r = run.num("r", 1.0), s = run.num("s", 4.0);
  if (check == "equiv") {
    const auto rep = ap_rh_equivalence_check([&](const Lattice& l) { return weight_from_preset(spec, l); }, lat, p, r, s);
    CsvWriter out(*run.os, {"N", "lhs_ap", "lhs_rh", "rhs_ap"});
    for (int i = 0; i < 2; ++i)
      out.row({static_cast<long long>(lat.samples()) << i, rep.lhs_ap[std::size_t(i)], rep.lhs_rh[std::size_t(i)],
               rep.rhs_ap[std::size_t(i)]});
    std::cerr << "lhs " << (rep.lhs_holds ? "holds" : "fails") << ", rhs " << (rep.rhs_holds ? "holds" : "fails")
              << (rep.agree ? ", agree\n" : ", disagree\n");
    return rep.agree;
  }
  CsvWriter out(*run.os, check == "sparse" ? std::vector<std::string>{"trial", "lhs", "rhs", "ratio"}
                                            : std::vector<std::string>{"trial", "ratio"});
  bool ok = true;
  if (check == "sparse") {
    const int k_hi = lat.length_log2() - 1, k_lo = std::max(lat.cell_scale() + 3, k_hi - 6);
    for (int t = 0; t < run.cfg.trials; ++t) {
      auto rng = run.rng(std::uint64_t(t));
      const SparseCollection S{random_sparse_family(lat, rng, k_lo, k_hi), 0.5, std::nullopt};
      const GridFunction f = bumps(lat, rng, 3), g = bumps(lat, rng, 3);
      const auto res = weighted_sparse_bound_check(S, f, g, w, r, s, p);
      out.row({static_cast<long long>(t), res.lhs, res.rhs, res.ratio});
      ok = ok && std::isfinite(res.ratio);
    }
  } else if (check == "fs" || check == "cf") {
    const Symbol a = symbol_from_preset(run.cfg.symbol);
    const MaximalKind control = control_kind(run.str("control", "hl"));
    for (int t = 0; t < run.cfg.trials; ++t) {
      auto rng = run.rng(std::uint64_t(t));
      const GridFunction f = bumps(lat, rng);
      const double v = check == "fs" ? fefferman_stein_check(a, f, w, p, control) : coifman_fefferman_check(a, f, w, p);
      out.row({static_cast<long long>(t), v});
      ok = ok && std::isfinite(v);
    }
  } else {
    throw ConfigError("--check must be ap, rh, equiv, sparse, fs or cf");
  }
  run.finish(out);
  return ok;
}

bool cmd_pointwise(Run& run) {
  const Symbol a = symbol_from_preset(run.cfg.symbol);
  const Lattice lat = run.cfg.lattice();
  auto rng = run.rng(0);
  const GridFunction f = bumps(lat, rng, 3);
  const PointwiseResult res = pointwise_dominate(a, f, run.num("r", 2.0));
  CsvWriter w(*run.os, {"x", "Tf", "Af", "ratio"});
  for (Index i = 0; i < lat.samples(); ++i) {
    const double tf = std::abs(res.Tf[i]), af = res.Af[i].real();
    w.row({lat.position(i), tf, af, af > 0.0 ? tf / af : 0.0});
  }
  run.finish(w);
  if (run.has("dump")) {
    std::ofstream dump(run.str("dump"));
    write_family(dump, res.collection.family);
  }
  std::cerr << "ratio " << format_number(res.ratio) << ", " << res.collection.family.size() << " cubes, kappa up to "
            << format_number(res.max_kappa) << (res.partial ? ", depth cap reached\n" : "\n");
  return !res.partial;
}

bool cmd_grand(Run& run) {
  const Symbol a = symbol_from_preset(run.cfg.symbol);
  auto rng = run.rng(0);
  GrandWeakOptions o;
  o.trials = run.cfg.trials;
  const auto rep = grand_maximal_weak_type(a, run.cfg.lattice(), run.num("r", 1.5), rng, o);
  CsvWriter w(*run.os, {"trial", "majorant"});
  for (std::size_t t = 0; t < rep.majorant_per_trial.size(); ++t)
    w.row({static_cast<long long>(t), rep.majorant_per_trial[t]});
  run.finish(w);
  std::cerr << "weak constant " << format_number(rep.weak_constant) << ", majorant constant "
            << format_number(rep.majorant_constant) << ", large cubes " << format_number(rep.large_cube_constant)
            << " (p = " << format_number(rep.p) << ", s = " << format_number(rep.s) << ")\n";
  return std::isfinite(rep.majorant_constant) && std::isfinite(rep.weak_constant);
}

bool cmd_multiplier(Run& run) {
  const double alpha = run.num("alpha"), beta = run.num("beta");
  const std::string check = run.str("check", "miyachi");
  const int order = run.integer("order", 3);
  if (check == "region") {
    const Region R = multiplier_region(alpha, beta, run.cfg.n);
    CsvWriter w(*run.os, {"vertex", "x", "y"});
    for (std::size_t i = 0; i < R.vertices.size(); ++i)
      w.row({static_cast<long long>(i + 1), R.vertices[i][0], R.vertices[i][1]});
    run.finish(w);
    return true;
  }
  const Symbol m = model_multiplier(alpha, beta);
  CsvWriter w(*run.os, {"order", "constant", "slope", "uniform"});
  bool pass = false;
  if (check == "miyachi") {
    const auto rep = miyachi_check(m, alpha, beta, order);
    for (const auto& e : rep.entries)
      w.row({static_cast<long long>(e.sigma), e.constant, e.slope, static_cast<long long>(e.uniform)});
    pass = rep.pass;
  } else if (check == "subdyadic") {
    const auto rep = subdyadic_check(m, alpha, beta, order);
    for (const auto& e : rep.entries)
      w.row({static_cast<long long>(e.order), e.constant, e.slope, static_cast<long long>(e.uniform)});
    pass = rep.pass;
  } else {
    throw ConfigError("--check must be miyachi, subdyadic or region");
  }
  run.finish(w);
  return pass;
}

bool cmd_kernel(Run& run) {
  const double a = run.num("a"), b = run.num("b");
  const auto t = oscillatory_kernel_transfer(a, b, run.cfg.n);
  if (!t.diagnostic.empty()) std::cerr << t.diagnostic << '\n';
  CsvWriter w(*run.os, {"alpha", "beta", "admissible", "envelope_constant", "envelope_slope", "envelope_pass"});
  if (!t.admissible) {
    w.row({t.alpha, t.beta, 0LL, std::nan(""), std::nan(""), 0LL});
    return false;
  }
  const auto env = kernel_envelope_check(a, b);
  w.row({t.alpha, t.beta, 1LL, env.constant, env.slope, static_cast<long long>(env.pass)});
  run.finish(w);
  return env.pass;
}

bool cmd_propagator(Run& run) {
  const Lattice lat = run.cfg.lattice();
  const int alpha = run.integer("alpha", 2);
  const double t = run.num("t", 1.0), beta = run.num("beta", 0.5);
  auto rng = run.rng(0);
  const GridFunction f = bumps(lat, rng), g = bumps(lat, rng);
  const double mass =
      std::abs(lp_norm(propagate(alpha, t, f), 2.0) - lp_norm(f, 2.0)) / std::max(lp_norm(f, 2.0), 1e-300);
  PropagatorOptions o;
  o.epsilon = run.cfg.epsilon;
  o.j_max = run.cfg.j_max;
  const auto rep = propagator_sparse_report(alpha, t, beta, f, g, exponent_pair(run), o);
  CsvWriter w(*run.os, {"quantity", "value"});
  w.row({std::string("mass_error"), mass});
  w.row({std::string("pairing"), rep.pairing});
  w.row({std::string("form"), rep.form});
  w.row({std::string("ratio"), rep.ratio});
  w.row({std::string("scale_shift"), static_cast<long long>(rep.scale_shift)});
  run.finish(w);
  return mass < 1e-10;
}

bool cmd_accept(Run& run) {
  acceptance::Options opt;
  opt.quick = run.cfg.quick;
  opt.seed = run.cfg.seed;
  opt.mislabel = run.str("mislabel", "0") == "1";
  if (run.has("only")) {
    std::stringstream ss(run.str("only"));
    std::string item;
    while (std::getline(ss, item, ',')) opt.only.push_back(parse_int(item));
  }
  std::unique_ptr<CsvWriter> w;
  if (!run.cfg.out.empty())
    w = std::make_unique<CsvWriter>(
        *run.os, std::vector<std::string>{"id", "name", "measured", "relation", "threshold", "pass", "seconds", "detail"});
  bool all = true;
  acceptance::run_all(opt, [&](const acceptance::Result& r) {
    std::cerr << acceptance::format_line(r) << std::endl;
    if (w)
      w->row({static_cast<long long>(r.id), r.name, r.measured, r.relation, r.threshold,
              static_cast<long long>(r.pass), r.seconds, r.detail});
    all = all && r.pass;
  });
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparsepdo: pseudodifferential operators, sparse forms and weights on a periodic lattice"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;

  auto make = [&](const std::string& name, const std::string& help, Handler h,
                  std::initializer_list<std::pair<const char*, const char*>> extra) {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name, help);
    c->handler = h;
    c->app->add_option("--config", c->config_path, "key = value file; flags override it");
    for (auto [key, text] : {std::pair{"n", "dimension (1)"}, {"L", "torus length (power of two)"},
                             {"N", "samples (power of two)"}, {"seed", "base seed"},
                             {"threads", "worker threads"}, {"out", "CSV path (default stdout)"},
                             {"symbol", "symbol preset, e.g. oscillatory:m=-0.5,rho=0"},
                             {"epsilon", "scale split"}, {"j_max", "largest frequency band"},
                             {"trials", "random trials"}, {"exponents", "r:s' pairs separated by ';'"}})
      c->add(key, text);
    for (auto [key, text] : extra) c->add(key, text);
    c->app->add_flag("--quick", c->quick, "smaller runs");
    c->app->add_flag("--plot", c->plot, "also write a gnuplot script next to --out");
    commands.push_back(std::move(c));
  };
  make("region", "vertices of the sparse-bound region", cmd_region, {{"m", "order"}, {"rho", "type"}});
  make("decay", "norm decay of the frequency pieces", cmd_decay,
       {{"norm", "22 | 1inf | kernel | rs | pieces"}, {"j_min", "first band"}, {"r", "r for --norm rs"},
        {"s", "s for --norm rs"}, {"l_range", "lo:hi for --norm pieces"}});
  make("dominate", "sparse domination ratios over random pairs", cmd_dominate,
       {{"r", "r"}, {"sprime", "s'"}});
  make("sharpness", "lower-bound ratios outside the region", cmd_sharpness,
       {{"m", "order"}, {"rho", "type"}, {"r", "r"}, {"sprime", "s'"}, {"j_min", "first band"}});
  make("weights", "weight characteristics and weighted bounds", cmd_weights,
       {{"weight", "const | power:a=.. | checkerboard:lambda=.. | spike:width=.."},
        {"check", "ap | rh | equiv | sparse | fs | cf"}, {"p", "p"}, {"q", "q for rh"}, {"r", "r"},
        {"s", "s"}, {"control", "maximal operator for fs: hl | lp:p=.. | gamma:gamma=.. | iterated:k=.."}});
  make("pointwise", "pointwise sparse domination", cmd_pointwise, {{"r", "r"}, {"dump", "collection output path"}});
  make("grand", "grand maximal function weak type and majorant", cmd_grand, {{"r", "weak type exponent"}});
  make("multiplier", "multiplier conditions", cmd_multiplier,
       {{"alpha", "alpha"}, {"beta", "beta"}, {"check", "miyachi | subdyadic | region"}, {"order", "max order"}});
  make("kernel", "oscillatory kernel exponent transfer", cmd_kernel, {{"a", "a"}, {"b", "b"}});
  make("propagator", "fractional Schroedinger propagator", cmd_propagator,
       {{"alpha", "integer alpha"}, {"t", "time"}, {"beta", "smoothing"}, {"r", "r"}, {"sprime", "s'"}});
  make("accept", "acceptance suite", cmd_accept,
       {{"only", "comma-separated criterion ids"}, {"mislabel", "1: forced class-check failure"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Command* chosen = nullptr;
  for (auto& c : commands)
    if (c->app->parsed()) chosen = c.get();

  Run run;
  std::ofstream file;
  try {
    if (!chosen->config_path.empty()) {
      std::ifstream in(chosen->config_path);
      if (!in) throw ConfigError("cannot open config file " + chosen->config_path);
      std::stringstream text;
      text << in.rdbuf();
      run.cfg = read_config(text);
      std::istringstream lines(text.str());
      std::string line;
      while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        key.erase(0, key.find_first_not_of(" \t"));
        run.given.insert(key);
      }
    }
    for (const auto& [key, opt] : chosen->options)
      if (opt->count() > 0) {
        run.cfg.set(key, chosen->values[key]);
        run.given.insert(key);
      }
    if (chosen->quick) run.cfg.quick = true;
    run.cfg.experiment = chosen->app->get_name();
    if (run.cfg.experiment == "accept" && run.has("mislabel")) run.cfg.extra["mislabel"] = run.str("mislabel");
    run.cfg.validate();
    run.plot = chosen->plot;
    default_threads() = run.cfg.threads;
    if (!run.cfg.out.empty()) {
      file.open(run.cfg.out);
      if (!file) throw ConfigError("cannot write " + run.cfg.out);
      run.os = &file;
    }
    const bool pass = chosen->handler(run);
    run.os->flush();
    if (run.nonfinite) {
      std::cerr << "non-finite value in the output\n";
      return 3;
    }
    return pass ? 0 : 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
