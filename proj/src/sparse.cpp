#include "sparsepdo/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sparsepdo {

double ExponentPair::s() const {
  if (s_prime == 1.0) return kInf;
  if (std::isinf(s_prime)) return 1.0;
  return s_prime / (s_prime - 1.0);
}

double Region::c() const { return -m / (n * (1.0 - rho)); }

Region region_vertices(double m, double rho, int n) {
  if (!(m < 0.0)) throw Error("region requires m < 0");
  if (!(rho < 1.0)) throw Error("region requires rho < 1");
  if (n < 1) throw Error("dimension must be positive");
  Region R;
  R.m = m;
  R.rho = rho;
  R.n = n;
  const double c = std::min(R.c(), 1.0);
  if (m <= -n * (1.0 - rho) / 2.0) {
    R.vertex_case = 1;
    R.vertices = {{{1.0, 0.0}, {1.0, c}, {c, 1.0}, {0.0, 1.0}}};
  } else {
    R.vertex_case = 2;
    R.vertices = {{{0.5 + c, 0.5 - c}, {0.5 + c, 0.5}, {0.5, 0.5 + c}, {0.5 - c, 0.5 + c}}};
  }
  return R;
}

namespace {

constexpr double kDomainTol = 1e-12;

enum class System { A, B };

struct SystemHit {
  System system;
  bool mirrored;
  double slack;
};

std::optional<SystemHit> best_system(double px, double py, double c) {
  std::optional<SystemHit> best;
  for (bool mirrored : {false, true}) {
    const double x = mirrored ? py : px;
    const double y = mirrored ? px : py;
    if (x > 1.0 + kDomainTol || y < -kDomainTol) continue;
    if (y <= 0.5 + kDomainTol && x + y >= 1.0 - kDomainTol) {
      const double s = c - (x - 0.5);
      if (!best || s > best->slack) best = SystemHit{System::A, mirrored, s};
    }
    if (y >= 0.5 - kDomainTol && y <= x + kDomainTol) {
      const double s = (c - (x + y - 1.0)) / std::sqrt(2.0);
      if (!best || s > best->slack) best = SystemHit{System::B, mirrored, s};
    }
  }
  return best;
}

}  // namespace

std::optional<double> region_slack(const ExponentPair& pt, const Region& R) {
  auto hit = best_system(pt.x(), pt.y(), R.c());
  if (!hit) return std::nullopt;
  return hit->slack;
}

bool in_region(const ExponentPair& pt, const Region& R, double margin) {
  if (margin < 0.0) throw Error("margin must be nonnegative");
  const auto s = region_slack(pt, R);
  return s && *s > 0.0 && *s >= margin;
}

bool in_closed_region(const ExponentPair& pt, const Region& R) {
  const auto s = region_slack(pt, R);
  return s && *s >= -kDomainTol;
}

SparseFormResult sparse_form(const SparseCollection& S, const GridFunction& f, const GridFunction& g, double r,
                             double s_prime) {
  if (!(r >= 1.0) || !(s_prime >= 1.0)) throw Error("sparse form exponents must be >= 1");
  if (!(f.lattice() == g.lattice())) throw Error("f and g live on different lattices");
  SparseFormResult out;
  out.collection = S;
  for (const auto& q : S.family.cubes()) {
    SparseTerm t;
    t.cube = q;
    t.measure = q.measure();
    t.avg_f = local_average(f, q, r);
    t.avg_g = local_average(g, q, s_prime);
    t.value = t.measure * t.avg_f * t.avg_g;
    out.value += t.value;
    out.terms.push_back(t);
  }
  return out;
}

GridFunction sparse_operator(const SparseCollection& S, const GridFunction& f, double r) {
  GridFunction out(f.lattice());
  for (const auto& q : S.family.cubes()) {
    const double avg = local_average(f, q, r);
    for (Index c : cube_cells(q, f.lattice())) out[c] += avg;
  }
  return out;
}

namespace {

void check_decay(const std::vector<ScaleLevel>& levels) {
  std::map<int, double> main;
  std::map<int, std::map<int, double>> tails;
  for (const auto& lv : levels) {
    if (lv.l)
      tails[lv.j][*lv.l] = lv.weight;
    else
      main[lv.j] = lv.weight;
  }
  auto decreasing = [](const std::map<int, double>& seq) {
    const double* prev = nullptr;
    for (const auto& [k, w] : seq) {
      if (prev && !(w < *prev)) return false;
      prev = &w;
    }
    return true;
  };
  bool ok = decreasing(main);
  for (const auto& [j, seq] : tails) ok = ok && decreasing(seq);
  if (!ok) throw Error("non-decaying weights");
}

double product_average(const GridFunction& f, const GridFunction& g, const DyadicCube& q, double r, double sp) {
  return local_average(f, q, r) * local_average(g, q, sp);
}

}  // namespace

CubeFamily random_sparse_family(const Lattice& lat, std::mt19937_64& rng, int k_lo, int k_hi, int max_cubes,
                                double eta, int attempts) {
  const int p = lat.length_log2();
  if (k_lo > k_hi || k_hi > p || k_lo < lat.cell_scale()) throw Error("scale range outside the lattice");
  std::vector<DyadicCube> cubes;
  for (int t = 0; t < attempts && int(cubes.size()) < max_cubes; ++t) {
    const int k = std::uniform_int_distribution<int>(k_lo, k_hi)(rng);
    const std::int64_t i = std::uniform_int_distribution<std::int64_t>(0, (std::int64_t(1) << (p - k)) - 1)(rng);
    auto trial = cubes;
    trial.push_back(DyadicCube(GridShift::zero(lat.dim()), k, {i, 0}));
    const CubeFamily fam(trial, p);
    if (fam.size() > cubes.size() && certify_sparse(fam, eta, lat).success) cubes = std::move(trial);
  }
  return CubeFamily(cubes, p);
}

DecayingSparseResult sparse_from_decaying(const std::vector<ScaleLevel>& levels, const GridFunction& f,
                                          const GridFunction& g, double r, double s_prime,
                                          const SparseFromDecayingOptions& options) {
  if (levels.empty()) throw Error("no scale levels");
  if (!(f.lattice() == g.lattice())) throw Error("f and g live on different lattices");
  for (const auto& lv : levels)
    if (!(lv.weight > 0.0) || !std::isfinite(lv.weight)) throw Error("level weights must be positive");
  if (!options.allow_nondecaying) check_decay(levels);

  const Lattice& lat = f.lattice();
  const int p = lat.length_log2();
  const int n = lat.dim();

  // Merge by scale.
  std::map<int, double, std::greater<>> weight_at;
  std::map<int, std::set<DyadicCube>, std::greater<>> cubes_at;
  std::optional<GridShift> shift;
  for (const auto& lv : levels) {
    if (lv.family.empty()) continue;
    const int k = lv.family.cubes().front().scale();
    for (const auto& q : lv.family.cubes()) {
      if (q.scale() != k) throw Error("a scale level mixes cube sizes");
      if (shift && q.shift() != *shift) throw Error("scale levels use different grids");
      shift = q.shift();
      cubes_at[k].insert(q.canonical(p));
    }
    weight_at[k] += lv.weight;
  }
  if (cubes_at.empty()) throw Error("no scale levels");

  DecayingSparseResult out;
  std::vector<DyadicCube> selected;
  int i = 0;
  for (const auto& [k, cubes] : cubes_at) {
    const double W = weight_at[k];
    const int parent_scale = std::min(k + i, p);
    out.level_scales.push_back(k);
    out.certificate_constant = std::max(out.certificate_constant, W * std::exp2(n * (parent_scale - k)));
    std::map<DyadicCube, std::pair<double, DyadicCube>> best;
    for (const auto& q : cubes) {
      const double v = product_average(f, g, q, r, s_prime);
      out.weighted_sum += W * q.measure() * v;
      DyadicCube anc = q;
      while (anc.scale() < parent_scale) anc = anc.parent();
      anc = anc.canonical(p);
      auto it = best.find(anc);
      if (it == best.end())
        best.emplace(anc, std::make_pair(v, q));
      else if (v > it->second.first)
        it->second = {v, q};
    }
    for (const auto& [anc, pick] : best) selected.push_back(pick.second);
    ++i;
  }

  CubeFamily family(selected, p);
  out.carleson = carleson_constant(family);
  out.form_value = sparse_form(SparseCollection{family, 0.5, std::nullopt}, f, g, r, s_prime).value;

  // Densest certifiable eta, starting from the Carleson bound.
  out.collection.family = family;
  for (double eta = std::min(0.99, 0.99 / out.carleson); eta > 1e-3; eta *= 0.9) {
    auto cert = certify_sparse(family, eta, lat);
    if (cert.success) {
      out.collection = cert.collection;
      break;
    }
  }

  // Main-level decay ratio q and residue classes N with q^-N > 4^n.
  std::map<int, double> main;
  for (const auto& lv : levels)
    if (!lv.l) main[lv.j] = lv.weight;
  double q = 0.0;
  for (auto it = main.begin(); it != main.end() && std::next(it) != main.end(); ++it)
    q = std::max(q, std::next(it)->second / it->second);
  if (q <= 0.0) {
    out.residue_classes = 1;
  } else if (q >= 1.0) {
    out.residue_classes = -1;
  } else {
    out.residue_classes = int(std::floor(n * std::log(4.0) / -std::log(q))) + 1;
  }
  return out;
}

double level_exponent(const ClassParams& p, const ExponentPair& pt, double eps, int n) {
  double x = pt.x(), y = pt.y();
  const double c = -p.m / (n * (1.0 - p.rho));
  const auto hit = best_system(x, y, c);
  System sys = System::A;
  if (hit) {
    sys = hit->system;
    if (hit->mirrored) std::swap(x, y);
  }
  const double inv_r = x, inv_s = 1.0 - y;
  double e = (-p.rho + eps) * n * (inv_r - inv_s) + p.m - n * (inv_s - inv_r);
  if (sys == System::A) e += (n * (1.0 - p.rho) / 2.0) * (2.0 * inv_s - 1.0);
  return e;
}

DominateResult dominate(const Symbol& a, const GridFunction& f, const GridFunction& g, const ExponentPair& pt,
                        const DominateOptions& opt) {
  if (!(f.lattice() == g.lattice())) throw Error("f and g live on different lattices");
  const Lattice& lat = f.lattice();
  DominateResult out;
  const double m = a.params.m, rho = a.params.rho;
  if (!(m < 0.0 && rho < 1.0 && in_region(pt, region_vertices(m, rho, 1), 0.02)))
    out.warning = "exponent point is not inside the sparse region";

  out.pairing = std::abs(inner_product(apply_T(a, f), g));
  if (!std::isfinite(out.pairing)) throw NumericalError("non-finite pairing");

  const int p = lat.length_log2();
  const double eps = opt.decomposition.epsilon;
  int j_max = max_frequency_index(lat);
  if (opt.decomposition.j_max > 0) j_max = std::min(j_max, opt.decomposition.j_max);
  const int k_min = lat.cell_scale() + int(std::ceil(std::log2(double(std::max(opt.min_cells, 1)))));
  auto clamp_scale = [&](int k) { return std::clamp(k, k_min, p); };

  const double e = level_exponent(a.params, pt, eps);
  const double tail_rate = -1.0 + (1.0 / pt.r - 1.0 / pt.s());
  std::vector<ScaleLevel> levels;
  for (int j = 0; j <= j_max; ++j) {
    const int l0 = int(std::floor(j * eps + 1e-12));
    const int k = clamp_scale(int(std::floor(-j * rho + j * eps + 1e-12)) + opt.scale_offset);
    levels.push_back({j, std::nullopt, tiling(lat, GridShift::zero(1), k), std::exp2(j * e)});
    if (!opt.include_tails) continue;
    int l_hi = l0;
    try {
      l_hi = spatial_range(a, j, lat).second;
    } catch (const Error&) {
    }
    for (int l = l0 + 1; l <= l_hi; ++l) {
      const int kt = clamp_scale(int(std::floor(l - j * rho + 1e-12)) + 1 + opt.scale_offset);
      levels.push_back({j, l, tiling(lat, GridShift::zero(1), kt), std::exp2(j * e + (l - l0) * tail_rate)});
    }
  }
  SparseFromDecayingOptions so;
  so.allow_nondecaying = !out.warning.empty();
  out.construction = sparse_from_decaying(levels, f, g, pt.r, pt.s_prime, so);
  out.sparse_value = out.construction.form_value;
  out.ratio = out.sparse_value > 0.0 ? out.pairing / out.sparse_value : 0.0;
  return out;
}

double best_single_cube_form(const GridFunction& f, const GridFunction& g, double r, double s_prime) {
  if (!(f.lattice() == g.lattice())) throw Error("f and g live on different lattices");
  const Lattice& lat = f.lattice();
  if (lat.dim() != 1) throw Error("single-cube search is one-dimensional");
  std::vector<Index> support;
  for (Index i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) > 0.0 || std::abs(g[i]) > 0.0) support.push_back(i);
  if (support.empty()) return 0.0;
  const int p = lat.length_log2();
  double best = 0.0;
  std::vector<char> mark(std::size_t(lat.size()), 0);
  for (const auto& shift : GridShift::all(1)) {
    for (int k = lat.cell_scale(); k <= p; ++k) {
      const CubeFamily tiles = tiling(lat, shift, k);
      for (const auto& q : tiles.cubes()) {
        const auto cells = cube_cells(q, lat);
        if (cells.size() < support.size()) continue;
        for (Index c : cells) mark[std::size_t(c)] = 1;
        bool all = true;
        for (Index c : support) all = all && mark[std::size_t(c)];
        for (Index c : cells) mark[std::size_t(c)] = 0;
        if (all) best = std::max(best, q.measure() * local_average(f, q, r) * local_average(g, q, s_prime));
      }
    }
  }
  return best;
}

namespace {

// |u|^(p-1) u/|u|, the duality map up to normalization.
ComplexVector duality_map(const ComplexVector& u, double p) {
  ComplexVector out(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    out[i] = a > 0.0 ? std::pow(a, p - 1.0) * (u[i] / a) : Complex(0.0);
  }
  return out;
}

double dual_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

}  // namespace

std::vector<SharpnessRow> sharpness_probe(double m, double rho, int n, const ExponentPair& pt,
                                          const std::vector<int>& j_list, const SharpnessOptions& opt) {
  if (n != 1) throw Error("sharpness probe is one-dimensional");
  const Lattice lat(1, opt.length, opt.samples);
  const Symbol a = model_oscillatory(m, rho);
  const double r = pt.r, s = pt.s();
  const double centre = opt.length / 2.0;
  const double dx = lat.spacing();
  std::vector<SharpnessRow> rows;
  for (int j : j_list) {
    if (j > max_frequency_index(lat)) throw Error("frequency piece exceeds Nyquist");
    const auto [l_lo, l_hi] = spatial_range(a, j, lat);
    const int l0 = int(std::floor(j * opt.epsilon + 1e-12));
    for (int l = std::max(l_lo, l0 - opt.l_window); l <= std::min(l_hi, l0 + opt.l_window); ++l) {
      const OperatorMatrix A = spatial_piece(a, j, l, lat);
      const double radius = std::exp2(l - j * rho);
      const double f_radius = std::max(radius / 4.0, 2.0 * dx);
      auto in_ball = [&](Index i) { return std::abs(lat.position(int(i)) - centre) <= f_radius; };
      auto in_annulus = [&](Index i) { return std::abs(lat.position(int(i)) - centre) >= 2.0 * f_radius; };

      // Start from a bump on the ball and refine with projected Boyd steps.
      ComplexVector fv = GridFunction::sample(lat, [&](double x) {
                           return Complex(smooth_cutoff(2.0 * std::abs(x - centre) / f_radius));
                         }).values();
      for (int it = 0; it < opt.refine_iterations; ++it) {
        ComplexVector Tf = A.apply(fv);
        for (Index i = 0; i < Tf.size(); ++i)
          if (!in_annulus(i)) Tf[i] = 0.0;
        ComplexVector w = A.apply_adjoint(std::isinf(s) ? Tf : duality_map(Tf, s));
        ComplexVector next = std::isinf(dual_exponent(r)) ? w : duality_map(w, dual_exponent(r));
        if (r == 1.0) {
          Index best = 0;
          for (Index i = 0; i < w.size(); ++i)
            if (in_ball(i) && std::abs(w[i]) > std::abs(w[best])) best = i;
          next.setZero();
          next[best] = 1.0;
        }
        for (Index i = 0; i < next.size(); ++i)
          if (!in_ball(i)) next[i] = 0.0;
        if (next.norm() == 0.0) break;
        fv = next / next.norm();
      }
      GridFunction f(lat, fv);
      GridFunction Tf = A.apply(f);
      GridFunction g(lat);
      if (std::isinf(s)) {
        Index best = -1;
        for (Index i = 0; i < Tf.size(); ++i)
          if (in_annulus(i) && (best < 0 || std::abs(Tf[i]) > std::abs(Tf[best]))) best = i;
        if (best >= 0 && std::abs(Tf[best]) > 0.0) g[best] = Tf[best] / std::abs(Tf[best]);
      } else {
        ComplexVector gv = duality_map(Tf.values(), s);
        for (Index i = 0; i < gv.size(); ++i)
          if (in_annulus(i)) g[i] = gv[i];
      }
      SharpnessRow row;
      row.j = j;
      row.l = l;
      row.pairing = std::abs(inner_product(Tf, g));
      row.form = best_single_cube_form(f, g, r, pt.s_prime);
      row.ratio = row.form > 0.0 ? row.pairing / row.form : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace sparsepdo
